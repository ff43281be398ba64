#include <doctest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "trackmine/balltree.hpp"
#include "trackmine/distance.hpp"

using namespace trackmine;

TEST_CASE("pairwise_distances closed forms") {
  EmbeddingMatrix m = EmbeddingMatrix::zeros(3, 3);
  m.row(1)[0] = 1.0f;  // e1
  m.row(2)[1] = 1.0f;  // e2
  m.row_ids = {"o", "e1", "e2"};

  const std::vector<std::size_t> queries{0, 1, 2};
  const std::vector<double> d = pairwise_distances(m, queries);
  CHECK(d[0 * 3 + 0] == 0.0);
  CHECK(d[1 * 3 + 1] == 0.0);
  CHECK(d[1 * 3 + 2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("pairwise_distances equals the naive double loop") {
  std::mt19937_64 rng(99);
  const EmbeddingMatrix m = oracles::random_matrix(rng, 1000, 50);
  std::vector<std::size_t> queries;
  for (std::size_t i = 0; i < 40; ++i) queries.push_back(i * 25);

  const std::vector<double> blocked = pairwise_distances(m, queries);
  const std::vector<double> naive = oracles::naive_pairwise(m, queries);
  REQUIRE(blocked.size() == naive.size());
  double max_err = 0.0;
  for (std::size_t i = 0; i < blocked.size(); ++i)
    max_err = std::max(max_err, std::abs(blocked[i] - naive[i]));
  CHECK(max_err < 1e-6);
  CHECK(max_err == 0.0);  // same kernel, same order: bit-identical
}

TEST_CASE("engine scheduling knobs never change results") {
  std::mt19937_64 rng(7);
  const EmbeddingMatrix m = oracles::random_matrix(rng, 257, 13);
  std::vector<std::size_t> queries{0, 5, 100, 256};

  EngineOptions serial;
  serial.threads = 1;
  EngineOptions wide;
  wide.threads = 8;
  wide.block_size = 7;
  CHECK(pairwise_distances(m, queries, serial) == pairwise_distances(m, queries, wide));

  const KnnResult a = brute_force_knn(m, 5, serial);
  const KnnResult b = brute_force_knn(m, 5, wide);
  CHECK(a.distances == b.distances);
  CHECK(a.indices == b.indices);
}

TEST_CASE("ball tree knn matches brute force exactly") {
  std::mt19937_64 rng(31);
  for (const std::size_t n : {2ul, 10ul, 64ul, 300ul}) {
    const EmbeddingMatrix m = oracles::random_matrix(rng, n, 8);
    const std::size_t k = std::min<std::size_t>(n - 1, 7);
    const BallTree tree(m);
    const KnnResult from_tree = tree.knn_all(k);
    const KnnResult brute = brute_force_knn(m, k);
    CHECK(from_tree.distances == brute.distances);
    CHECK(from_tree.indices == brute.indices);
  }
}

TEST_CASE("ball tree handles duplicate-heavy data") {
  EmbeddingMatrix m = EmbeddingMatrix::zeros(20, 4);
  for (std::size_t r = 10; r < 20; ++r) m.row(r)[0] = 2.0f;
  for (std::size_t r = 0; r < 20; ++r) m.row_ids[r] = "r" + std::to_string(r);
  const BallTree tree(m);
  const KnnResult knn = tree.knn_all(3);
  for (std::size_t p = 0; p < 20; ++p)
    CHECK(knn.distances[p * 3 + 2] == 0.0);  // three identical neighbors each
}

TEST_CASE("knn rejects out-of-range k") {
  std::mt19937_64 rng(1);
  const EmbeddingMatrix m = oracles::random_matrix(rng, 5, 3);
  CHECK_THROWS_AS(brute_force_knn(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_knn(m, 5), std::invalid_argument);
  const BallTree tree(m);
  CHECK_THROWS_AS(tree.knn_all(5), std::invalid_argument);
}

TEST_CASE("pairwise_distances rejects non-finite data") {
  EmbeddingMatrix m = EmbeddingMatrix::zeros(2, 2);
  m.data[1] = std::numeric_limits<float>::infinity();
  std::vector<std::size_t> queries{0};
  CHECK_THROWS_AS(pairwise_distances(m, queries), std::invalid_argument);
}
