/*
 * Copyright (c) 2026, the trackmine authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "trackmine/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace trackmine {

void SyntheticSpec::validate() const {
  if (n_categories < 1) throw std::invalid_argument("synthetic: n_categories must be >= 1");
  if (!(zipf_exponent > 0.0)) throw std::invalid_argument("synthetic: zipf_exponent must be > 0");
  if (n_tracks < 1) throw std::invalid_argument("synthetic: n_tracks must be >= 1");
  if (embedding_dims < 1) throw std::invalid_argument("synthetic: embedding_dims must be >= 1");
  if (!(cluster_spread > 0.0)) throw std::invalid_argument("synthetic: cluster_spread must be > 0");
  if (!(center_separation > 0.0))
    throw std::invalid_argument("synthetic: center_separation must be > 0");
  if (outlier_fraction < 0.0 || outlier_fraction >= 1.0)
    throw std::invalid_argument("synthetic: outlier_fraction must be in [0,1)");
  if (tracking_error_fraction < 0.0 || tracking_error_fraction >= 1.0)
    throw std::invalid_argument("synthetic: tracking_error_fraction must be in [0,1)");
  if (outlier_fraction + tracking_error_fraction >= 1.0)
    throw std::invalid_argument("synthetic: outlier + error fractions must stay below 1");
  if (!(outlier_box_scale > 0.0))
    throw std::invalid_argument("synthetic: outlier_box_scale must be > 0");
}

std::vector<std::size_t> zipf_allocation(std::size_t n_categories, double exponent,
                                         std::size_t n_tracks) {
  std::vector<double> weights(n_categories);
  double total = 0.0;
  for (std::size_t r = 0; r < n_categories; ++r) {
    weights[r] = std::pow(double(r + 1), -exponent);
    total += weights[r];
  }
  std::vector<std::size_t> sizes(n_categories);
  std::vector<std::pair<double, std::size_t>> remainders(n_categories);
  std::size_t assigned = 0;
  for (std::size_t r = 0; r < n_categories; ++r) {
    const double quota = double(n_tracks) * weights[r] / total;
    sizes[r] = std::size_t(std::floor(quota));
    assigned += sizes[r];
    remainders[r] = {quota - std::floor(quota), r};
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;  // ties to the lower rank
  });
  for (std::size_t i = 0; i < n_tracks - assigned; ++i) ++sizes[remainders[i].second];
  return sizes;
}

namespace {

std::string track_name(std::size_t index) {
  std::ostringstream out;
  out << "trk";
  out.width(6);
  out.fill('0');
  out << index;
  return out.str();
}

std::string category_name(std::uint32_t index) {
  std::ostringstream out;
  out << "cat";
  out.width(2);
  out.fill('0');
  out << index;
  return out.str();
}

// Centers on a sphere with a minimum pairwise gap; the radius grows when
// rejection sampling stalls, and a hard attempt budget turns geometric
// infeasibility (for example many categories in one dimension) into an
// error.
std::vector<std::vector<double>> sample_centers(std::size_t n_categories, std::size_t dims,
                                                double separation, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double radius = separation;
  const std::size_t budget = 2000 * n_categories + 2000;
  std::size_t attempts = 0;

  std::vector<std::vector<double>> centers;
  while (centers.size() < n_categories) {
    if (++attempts > budget)
      throw std::runtime_error(
          "synthetic: cannot place " + std::to_string(n_categories) +
          " centers with the requested separation in " + std::to_string(dims) + " dimensions");
    if (attempts % 500 == 0) {
      radius *= 1.5;  // stalling: spread the sphere and start over
      centers.clear();
    }
    std::vector<double> candidate(dims);
    double norm2 = 0.0;
    for (double& v : candidate) {
      v = gauss(rng);
      norm2 += v * v;
    }
    if (norm2 <= 0.0) continue;
    const double scale = radius / std::sqrt(norm2);
    for (double& v : candidate) v *= scale;
    bool ok = true;
    for (const std::vector<double>& c : centers) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double diff = candidate[d] - c[d];
        d2 += diff * diff;
      }
      if (d2 < separation * separation) {
        ok = false;
        break;
      }
    }
    if (ok) centers.push_back(std::move(candidate));
  }
  return centers;
}

Track make_simple_track(const std::string& id, std::size_t track_index, std::size_t n_frames,
                        std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> start(0, 19);
  Track track;
  track.id = id;
  const std::int64_t f0 = start(rng);
  const double lane = double(track_index) * 50.0;
  for (std::size_t i = 0; i < n_frames; ++i) {
    FrameObservation obs;
    obs.frame_index = f0 + std::int64_t(i);
    obs.geometry = MaskGeometry::from_box({lane + 0.5 * double(i), 5.0, 12.0, 12.0});
    track.observations.push_back(obs);
  }
  return track;
}

}  // namespace

SyntheticCollection generate_collection(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  SyntheticCollection out;
  out.truth.category_sizes = zipf_allocation(spec.n_categories, spec.zipf_exponent, spec.n_tracks);
  out.truth.centers = sample_centers(spec.n_categories, spec.embedding_dims,
                                     spec.center_separation, rng);

  double radius2 = 0.0;
  for (double v : out.truth.centers[0]) radius2 += v * v;
  const double box_half = spec.outlier_box_scale * std::sqrt(radius2);

  // Category per track, shuffled so category blocks do not imprint order.
  std::vector<std::uint32_t> category;
  category.reserve(spec.n_tracks);
  for (std::size_t c = 0; c < spec.n_categories; ++c)
    category.insert(category.end(), out.truth.category_sizes[c], std::uint32_t(c));
  std::shuffle(category.begin(), category.end(), rng);

  // Disjoint outlier / tracking-error subsets.
  const std::size_t n_outliers = std::size_t(std::llround(spec.outlier_fraction * double(spec.n_tracks)));
  const std::size_t n_errors =
      std::size_t(std::llround(spec.tracking_error_fraction * double(spec.n_tracks)));
  std::vector<std::size_t> order(spec.n_tracks);
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> outlier(spec.n_tracks, false), error(spec.n_tracks, false);
  for (std::size_t i = 0; i < n_outliers; ++i) outlier[order[i]] = true;
  for (std::size_t i = 0; i < n_errors; ++i) error[order[n_outliers + i]] = true;

  out.truth.category = category;
  out.truth.outlier = outlier;
  out.truth.error = error;

  std::normal_distribution<double> jitter(0.0, spec.cluster_spread);
  std::uniform_real_distribution<double> box(-box_half, box_half);
  std::uniform_int_distribution<std::size_t> crop_count(3, 30);
  std::uniform_int_distribution<std::size_t> frame_count(3, 8);
  std::uniform_int_distribution<std::uint32_t> other(0, std::uint32_t(spec.n_categories - 1));

  out.crop_embeddings.dims = spec.embedding_dims;
  out.tracks.reserve(spec.n_tracks);
  for (std::size_t t = 0; t < spec.n_tracks; ++t) {
    const std::string id = track_name(t);
    AnnotatedTrack annotated;
    annotated.track = make_simple_track(id, t, frame_count(rng), rng);
    if (error[t]) {
      annotated.annotation = Annotation::TrackingError;
    } else {
      annotated.annotation = Annotation::Category;
      annotated.category = category_name(category[t]);
    }

    // Embedding source: own center, a drifted center for tracking errors,
    // or a uniform box point for outliers.
    std::vector<double> base(spec.embedding_dims);
    if (outlier[t]) {
      for (double& v : base) v = box(rng);
    } else {
      std::uint32_t source = category[t];
      if (error[t] && spec.n_categories > 1) {
        std::uint32_t drifted = other(rng);
        while (drifted == category[t]) drifted = other(rng);
        source = drifted;
      }
      base = out.truth.centers[source];
    }

    const std::size_t crops = crop_count(rng);
    for (std::size_t c = 0; c < crops; ++c) {
      for (std::size_t d = 0; d < spec.embedding_dims; ++d)
        out.crop_embeddings.data.push_back(float(base[d] + jitter(rng)));
      out.crop_embeddings.row_ids.push_back(id + "#" + std::to_string(c));
    }
    out.tracks.push_back(std::move(annotated));
  }
  out.crop_embeddings.rows = out.crop_embeddings.row_ids.size();
  return out;
}

SyntheticStream generate_tracklet_stream(const SyntheticSpec& spec, double fragmentation_rate,
                                         double junction_lambda) {
  spec.validate();
  if (fragmentation_rate < 0.0 || fragmentation_rate >= 1.0)
    throw std::invalid_argument("synthetic: fragmentation_rate must be in [0,1)");
  if (!(junction_lambda > 0.0) || junction_lambda > 1.0)
    throw std::invalid_argument("synthetic: junction_lambda must be in (0,1]");

  std::mt19937_64 rng(spec.seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull);
  std::uniform_int_distribution<std::int64_t> start(0, 19);
  std::uniform_int_distribution<std::int64_t> span(24, 48);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::int64_t kMinPiece = 8;  // keeps junction ratios near target

  SyntheticStream out;
  out.truth_track_count = spec.n_tracks;

  for (std::size_t t = 0; t < spec.n_tracks; ++t) {
    const std::string track_id = track_name(t);
    const std::int64_t f0 = start(rng);
    const std::int64_t length = span(rng);
    const double lane = double(t) * 100.0;

    auto box_at = [&](std::int64_t frame) {
      return MaskGeometry::from_box(
          {lane + 0.5 * double(frame - f0), 5.0 + double(t % 7), 12.0, 12.0});
    };

    // Cut the selection span into pieces of at least kMinPiece frames.
    std::vector<std::int64_t> bounds{f0};
    for (std::int64_t f = f0 + kMinPiece; f + kMinPiece <= f0 + length; ++f)
      if (unit(rng) < fragmentation_rate && f - bounds.back() >= kMinPiece) bounds.push_back(f);
    bounds.push_back(f0 + length);

    // Observations cover the selection span plus a junction overlap into
    // the next piece; shared frames carry identical masks, so the overlap
    // ratio lands in [junction_lambda, junction_lambda + 1/kMinPiece].
    // Overlaps are solved right to left because the ratio depends on the
    // next piece's full (already extended) length.
    const std::size_t n_pieces = bounds.size() - 1;
    std::vector<std::int64_t> obs_len(n_pieces);
    std::vector<std::int64_t> overlap(n_pieces, 0);
    for (std::size_t p = n_pieces; p-- > 0;) {
      const std::int64_t base_len = bounds[p + 1] - bounds[p];
      if (p + 1 < n_pieces) {
        const std::int64_t next_len = obs_len[p + 1];
        std::int64_t o = 1;
        for (int iter = 0; iter < 16; ++iter) {
          const std::int64_t needed = std::int64_t(
              std::ceil(junction_lambda * double(std::min(base_len + o, next_len)) - 1e-9));
          if (needed <= o) break;
          o = needed;
        }
        overlap[p] = std::min(o, next_len);
      }
      obs_len[p] = base_len + overlap[p];
    }

    for (std::size_t p = 0; p < n_pieces; ++p) {
      const std::int64_t sel_begin = bounds[p];
      const std::int64_t sel_end = bounds[p + 1];

      Tracklet piece;
      std::ostringstream pid;
      pid << track_id << ".p";
      pid.width(2);
      pid.fill('0');
      pid << p;
      piece.id = pid.str();
      piece.classifier_label = category_name(0);

      for (std::int64_t f = sel_begin; f < sel_begin + obs_len[p]; ++f) {
        FrameObservation obs;
        obs.frame_index = f;
        obs.geometry = box_at(f);
        piece.observations.push_back(obs);
      }

      out.tracklets.push_back(std::move(piece));
      out.truth_track_of.push_back(track_id);

      for (std::int64_t f = sel_begin; f < sel_end; ++f)
        out.timeline.selected[f].push_back(out.tracklets.back().id);
    }
  }
  return out;
}

}  // namespace trackmine
