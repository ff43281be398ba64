#include <doctest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "trackmine/mask.hpp"
#include "trackmine/types.hpp"

using namespace trackmine;

namespace {

RleMask random_rle(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h) {
  std::bernoulli_distribution bit(0.4);
  std::vector<std::uint8_t> pixels(std::size_t(w) * h);
  for (std::uint8_t& p : pixels) p = bit(rng) ? 1 : 0;
  return rle_from_pixels(pixels, w, h);
}

}  // namespace

TEST_CASE("mask_iou identity and disjoint cases") {
  const MaskGeometry box = MaskGeometry::from_box({0, 0, 10, 10});
  CHECK(mask_iou(box, box) == doctest::Approx(1.0));

  const MaskGeometry far = MaskGeometry::from_box({20, 20, 5, 5});
  CHECK(mask_iou(box, far) == 0.0);

  std::mt19937_64 rng(11);
  const MaskGeometry rle = MaskGeometry::from_rle(random_rle(rng, 8, 8));
  if (rle.rle().area() > 0) CHECK(mask_iou(rle, rle) == doctest::Approx(1.0));
}

TEST_CASE("mask_iou overlap arithmetic matches the pixel grid") {
  const MaskGeometry a = MaskGeometry::from_box({0, 0, 10, 10});
  const MaskGeometry b = MaskGeometry::from_box({5, 0, 10, 10});
  // intersection 50, union 150
  CHECK(mask_iou(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(mask_iou(a, b) == doctest::Approx(oracles::pixel_grid_iou(a, b, 16, 16)).epsilon(1e-12));
}

TEST_CASE("mask_iou both empty is zero, not a match") {
  const MaskGeometry empty_box = MaskGeometry::from_box({3, 3, 0, 5});
  CHECK(mask_iou(empty_box, empty_box) == 0.0);

  RleMask empty;
  empty.width = 4;
  empty.height = 4;
  empty.runs = {16};
  const MaskGeometry empty_rle = MaskGeometry::from_rle(empty);
  CHECK(mask_iou(empty_rle, empty_rle) == 0.0);
  CHECK(mask_iou(empty_rle, empty_box) == 0.0);
}

TEST_CASE("mask_iou rejects RLE canvas mismatch") {
  std::mt19937_64 rng(3);
  const MaskGeometry a = MaskGeometry::from_rle(random_rle(rng, 8, 8));
  const MaskGeometry b = MaskGeometry::from_rle(random_rle(rng, 9, 8));
  CHECK_THROWS_AS(mask_iou(a, b), std::invalid_argument);
}

TEST_CASE("mask_iou matches brute-force pixel counts on random RLE masks") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<std::uint32_t> dim(1, 32);
  for (int it = 0; it < 200; ++it) {
    const std::uint32_t w = dim(rng), h = dim(rng);
    const MaskGeometry a = MaskGeometry::from_rle(random_rle(rng, w, h));
    const MaskGeometry b = MaskGeometry::from_rle(random_rle(rng, w, h));
    const double expected = oracles::pixel_grid_iou(a, b, w, h);
    CHECK(mask_iou(a, b) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(mask_iou(a, b) == mask_iou(b, a));  // symmetry
  }
}

TEST_CASE("mixed RLE/box pairs rasterize the box onto the RLE canvas") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> coord(0, 12);
  for (int it = 0; it < 100; ++it) {
    const std::uint32_t w = 16, h = 16;
    const MaskGeometry rle = MaskGeometry::from_rle(random_rle(rng, w, h));
    const MaskGeometry box = MaskGeometry::from_box(
        {double(coord(rng)), double(coord(rng)), double(coord(rng)), double(coord(rng))});
    const double expected = oracles::pixel_grid_iou(rle, box, w, h);
    CHECK(mask_iou(rle, box) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(mask_iou(box, rle) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("validate_tracklet reports ordering and run-length violations") {
  Tracklet bad;
  bad.id = "t";
  for (std::int64_t f : {3, 1, 2}) {
    FrameObservation obs;
    obs.frame_index = f;
    obs.geometry = MaskGeometry::from_box({0, 0, 1, 1});
    bad.observations.push_back(obs);
  }
  const ValidationReport report = validate_tracklet(bad);
  REQUIRE(!report.ok());
  CHECK(report.violations.front() == "not sorted");

  Tracklet minimal;
  minimal.id = "ok";
  FrameObservation obs;
  obs.frame_index = 0;
  obs.geometry = MaskGeometry::from_box({0, 0, 2, 2});
  minimal.observations.push_back(obs);
  CHECK(validate_tracklet(minimal).ok());

  RleMask short_runs;
  short_runs.width = 4;
  short_runs.height = 4;
  short_runs.runs = {15};  // sums to width*height - 1
  Tracklet broken;
  broken.id = "rle";
  FrameObservation rle_obs;
  rle_obs.frame_index = 0;
  rle_obs.geometry = MaskGeometry::from_rle(short_runs);
  broken.observations.push_back(rle_obs);
  const ValidationReport rle_report = validate_tracklet(broken);
  REQUIRE(!rle_report.ok());
  CHECK(rle_report.violations.front().find("run-length sum mismatch") != std::string::npos);
}

TEST_CASE("rle round trip through pixels") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 50; ++it) {
    const RleMask m = random_rle(rng, 16, 9);
    const std::vector<std::uint8_t> pixels = rle_to_pixels(m);
    const RleMask back = rle_from_pixels(pixels, 16, 9);
    CHECK(back.runs == m.runs);
  }
}
