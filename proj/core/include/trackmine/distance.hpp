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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "trackmine/types.hpp"

namespace trackmine {

/// Squared Euclidean distance, accumulated in double left to right.
/// Every distance-based computation in the library routes through this
/// kernel so that all engines agree bit for bit.
inline double squared_distance(const float* a, const float* b, std::size_t dims) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dims; ++i) {
    const double d = double(a[i]) - double(b[i]);
    acc += d * d;
  }
  return acc;
}

double euclidean_distance(const float* a, const float* b, std::size_t dims);

/// Knobs for the blocked/parallel evaluation paths. Zero means pick a
/// default. Either setting changes scheduling only, never results.
struct EngineOptions {
  std::size_t block_size = 0;
  std::size_t threads = 0;

  std::size_t effective_threads() const;
  std::size_t effective_block() const;
};

/// Exact Euclidean distances from each query row to every data row.
/// Output is row-major, queries.size() x data.rows.
std::vector<double> pairwise_distances(const EmbeddingMatrix& data,
                                       std::span<const std::size_t> queries,
                                       const EngineOptions& opts = {});

/// k smallest distances (self excluded) from each query row to the data
/// rows, ascending; ties broken by lower row index. Used for core distances.
struct KnnResult {
  std::size_t k = 0;
  std::vector<double> distances;      // queries x k
  std::vector<std::uint32_t> indices; // queries x k
};

KnnResult brute_force_knn(const EmbeddingMatrix& data, std::size_t k,
                          const EngineOptions& opts = {});

/// Run fn(begin, end) over [0, n) split into contiguous chunks, one per
/// worker. fn must only write to disjoint state per chunk.
void parallel_for(std::size_t n, std::size_t n_threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace trackmine
