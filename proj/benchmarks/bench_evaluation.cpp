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

#include "trackmine/evaluation.hpp"
#include "trackmine/mask.hpp"
#include "trackmine/track_merge.hpp"

using namespace trackmine;

static void BM_Ami(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::size_t n = std::size_t(state.range(0));
  std::uniform_int_distribution<std::int32_t> c(0, 35);
  std::vector<std::int32_t> truth(n), pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = c(rng);
    pred[i] = c(rng);
  }
  for (auto _ : state) {
    double v = ami(truth, pred);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Ami)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_MaskIouRle(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution fill(0.4);
  const std::uint32_t side = std::uint32_t(state.range(0));
  std::vector<std::uint8_t> pa(side * side), pb(side * side);
  for (auto& p : pa) p = fill(rng);
  for (auto& p : pb) p = fill(rng);
  const MaskGeometry a = MaskGeometry::from_rle(rle_from_pixels(pa, side, side));
  const MaskGeometry b = MaskGeometry::from_rle(rle_from_pixels(pb, side, side));
  for (auto _ : state) {
    double v = mask_iou(a, b);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_MaskIouRle)->Arg(64)->Arg(512);

static void BM_OverlapRatio(benchmark::State& state) {
  Tracklet a, b;
  a.id = "a";
  b.id = "b";
  for (std::int64_t f = 0; f < state.range(0); ++f) {
    FrameObservation oa, ob;
    oa.frame_index = f;
    ob.frame_index = f + state.range(0) / 2;
    oa.geometry = MaskGeometry::from_box({double(f), 0, 10, 10});
    ob.geometry = MaskGeometry::from_box({double(f), 1, 10, 10});
    a.observations.push_back(oa);
    b.observations.push_back(ob);
  }
  for (auto _ : state) {
    double v = overlap_ratio(a, b, 0.5);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_OverlapRatio)->Arg(50)->Arg(500);
