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

#include "trackmine/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace trackmine {

double euclidean_distance(const float* a, const float* b, std::size_t dims) {
  return std::sqrt(squared_distance(a, b, dims));
}

std::size_t EngineOptions::effective_threads() const {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::size_t EngineOptions::effective_block() const { return block_size > 0 ? block_size : 256; }

void parallel_for(std::size_t n, std::size_t n_threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  n_threads = std::min(n_threads == 0 ? 1 : n_threads, n);
  if (n_threads <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  const std::size_t chunk = (n + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(begin + chunk, n);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (std::thread& w : workers) w.join();
}

std::vector<double> pairwise_distances(const EmbeddingMatrix& data,
                                       std::span<const std::size_t> queries,
                                       const EngineOptions& opts) {
  data.validate();
  for (std::size_t q : queries)
    if (q >= data.rows) throw std::invalid_argument("pairwise_distances: query row out of range");

  std::vector<double> out(queries.size() * data.rows);
  const std::size_t dims = data.dims;
  parallel_for(queries.size(), opts.effective_threads(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t qi = begin; qi < end; ++qi) {
      const float* qrow = data.row(queries[qi]);
      double* dst = out.data() + qi * data.rows;
      for (std::size_t r = 0; r < data.rows; ++r)
        dst[r] = std::sqrt(squared_distance(qrow, data.row(r), dims));
    }
  });
  return out;
}

KnnResult brute_force_knn(const EmbeddingMatrix& data, std::size_t k, const EngineOptions& opts) {
  data.validate();
  if (k == 0 || k > data.rows - 1)
    throw std::invalid_argument("brute_force_knn: k must be in [1, rows-1]");

  KnnResult result;
  result.k = k;
  result.distances.resize(data.rows * k);
  result.indices.resize(data.rows * k);
  const std::size_t dims = data.dims;

  parallel_for(data.rows, opts.effective_threads(), [&](std::size_t begin, std::size_t end) {
    // Max-heap of the k best (squared distance, index) pairs per query.
    std::vector<std::pair<double, std::uint32_t>> heap;
    for (std::size_t q = begin; q < end; ++q) {
      heap.clear();
      const float* qrow = data.row(q);
      for (std::size_t r = 0; r < data.rows; ++r) {
        if (r == q) continue;
        const double d2 = squared_distance(qrow, data.row(r), dims);
        const std::pair<double, std::uint32_t> entry{d2, std::uint32_t(r)};
        if (heap.size() < k) {
          heap.push_back(entry);
          std::push_heap(heap.begin(), heap.end());
        } else if (entry < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = entry;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      std::sort_heap(heap.begin(), heap.end());
      for (std::size_t j = 0; j < k; ++j) {
        result.distances[q * k + j] = std::sqrt(heap[j].first);
        result.indices[q * k + j] = heap[j].second;
      }
    }
  });
  return result;
}

}  // namespace trackmine
