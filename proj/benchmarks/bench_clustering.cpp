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

#include "trackmine/clustering.hpp"
#include "trackmine/synthetic.hpp"
#include "trackmine/embedding.hpp"

using namespace trackmine;

namespace {

EmbeddingMatrix blob_collection(std::size_t n_tracks, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_categories = 16;
  spec.n_tracks = n_tracks;
  spec.embedding_dims = 50;
  spec.center_separation = 80.0;
  spec.seed = seed;
  return summarize_tracks(generate_collection(spec).crop_embeddings);
}

}  // namespace

static void BM_KMeans(benchmark::State& state) {
  const EmbeddingMatrix data = blob_collection(std::size_t(state.range(0)), 3);
  KMeansConfig cfg;
  cfg.k = 16;
  cfg.seed = 7;
  cfg.n_init = 3;
  for (auto _ : state) {
    auto result = kmeans_fit(data, cfg);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_KMeans)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_HdbscanPrim(benchmark::State& state) {
  const EmbeddingMatrix data = blob_collection(std::size_t(state.range(0)), 4);
  HdbscanConfig cfg;
  cfg.min_cluster_size = 30;
  cfg.mst = MstStrategy::Prim;
  for (auto _ : state) {
    auto result = hdbscan_fit(data, cfg);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_HdbscanPrim)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_HdbscanBoruvka(benchmark::State& state) {
  const EmbeddingMatrix data = blob_collection(std::size_t(state.range(0)), 4);
  HdbscanConfig cfg;
  cfg.min_cluster_size = 30;
  cfg.mst = MstStrategy::Boruvka;
  for (auto _ : state) {
    auto result = hdbscan_fit(data, cfg);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_HdbscanBoruvka)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SummarizeTracks(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n_categories = 16;
  spec.n_tracks = std::size_t(state.range(0));
  spec.embedding_dims = 50;
  spec.center_separation = 80.0;
  spec.seed = 9;
  const SyntheticCollection collection = generate_collection(spec);
  for (auto _ : state) {
    auto tracks = summarize_tracks(collection.crop_embeddings);
    benchmark::DoNotOptimize(tracks);
  }
}
BENCHMARK(BM_SummarizeTracks)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
