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

#include <benchmark/benchmark.h>

#include <random>

#include "trackmine/balltree.hpp"
#include "trackmine/distance.hpp"

using namespace trackmine;

namespace {

EmbeddingMatrix uniform_rows(std::size_t rows, std::size_t dims, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EmbeddingMatrix m = EmbeddingMatrix::zeros(rows, dims);
  for (std::size_t r = 0; r < rows; ++r) {
    m.row_ids[r] = "r" + std::to_string(r);
    for (std::size_t d = 0; d < dims; ++d) m.row(r)[d] = float(u(rng));
  }
  return m;
}

}  // namespace

static void BM_PairwiseDistances(benchmark::State& state) {
  const EmbeddingMatrix data = uniform_rows(std::size_t(state.range(0)), 50);
  std::vector<std::size_t> queries;
  for (std::size_t i = 0; i < 64 && i < data.rows; ++i) queries.push_back(i);
  for (auto _ : state) {
    auto d = pairwise_distances(data, queries);
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(queries.size()) *
                          state.range(0));
}
BENCHMARK(BM_PairwiseDistances)->Arg(1000)->Arg(10000)->Arg(50000);

static void BM_BruteForceKnn(benchmark::State& state) {
  const EmbeddingMatrix data = uniform_rows(std::size_t(state.range(0)), 50);
  for (auto _ : state) {
    auto knn = brute_force_knn(data, 10);
    benchmark::DoNotOptimize(knn);
  }
}
BENCHMARK(BM_BruteForceKnn)->Arg(1000)->Arg(4000);

static void BM_BallTreeKnn(benchmark::State& state) {
  const EmbeddingMatrix data = uniform_rows(std::size_t(state.range(0)), 50);
  for (auto _ : state) {
    BallTree tree(data);
    auto knn = tree.knn_all(10);
    benchmark::DoNotOptimize(knn);
  }
}
BENCHMARK(BM_BallTreeKnn)->Arg(1000)->Arg(4000)->Arg(16000);

BENCHMARK_MAIN();
