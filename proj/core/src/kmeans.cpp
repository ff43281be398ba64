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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "trackmine/clustering.hpp"

namespace trackmine {

std::size_t ClusteringResult::noise_count() const {
  std::size_t n = 0;
  for (std::int32_t a : assignments)
    if (a < 0) ++n;
  return n;
}

std::vector<std::int32_t> canonical_labels(const std::vector<std::int32_t>& labels) {
  std::vector<std::int32_t> out(labels.size());
  std::map<std::int32_t, std::int32_t> remap;
  std::int32_t next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      out[i] = -1;
      continue;
    }
    auto [it, inserted] = remap.emplace(labels[i], next);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

void KMeansConfig::validate() const {
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be >= 1");
  if (n_init < 1) throw std::invalid_argument("kmeans: n_init must be >= 1");
  if (!(tol >= 0.0)) throw std::invalid_argument("kmeans: tol must be >= 0");
}

namespace {

struct LloydState {
  std::vector<double> centers;       // k x dims
  std::vector<std::int32_t> labels;  // per point
  double inertia = std::numeric_limits<double>::infinity();
};

double point_center_d2(const float* p, const double* c, std::size_t dims) {
  double acc = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double diff = double(p[d]) - c[d];
    acc += diff * diff;
  }
  return acc;
}

// D^2-weighted seeding. All draws come from the caller's generator so the
// whole fit is a function of the config seed.
std::vector<double> kmeanspp_seed(const EmbeddingMatrix& data, std::size_t k,
                                  std::mt19937_64& rng) {
  const std::size_t n = data.rows, dims = data.dims;
  std::vector<double> centers(k * dims);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  const float* row0 = data.row(first(rng));
  for (std::size_t d = 0; d < dims; ++d) centers[d] = row0[d];

  std::vector<double> best_d2(n);
  for (std::size_t i = 0; i < n; ++i)
    best_d2[i] = point_center_d2(data.row(i), centers.data(), dims);

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : best_d2) total += v;
    std::size_t chosen;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += best_d2[i];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      // All remaining mass at distance zero (duplicate-only data).
      chosen = first(rng);
    }
    const float* row = data.row(chosen);
    double* dst = centers.data() + c * dims;
    for (std::size_t d = 0; d < dims; ++d) dst[d] = row[d];
    for (std::size_t i = 0; i < n; ++i)
      best_d2[i] = std::min(best_d2[i], point_center_d2(data.row(i), dst, dims));
  }
  return centers;
}

// Nearest-center assignment; ties go to the lower center index.
double assign_points(const EmbeddingMatrix& data, const std::vector<double>& centers,
                     std::size_t k, std::vector<std::int32_t>& labels,
                     const EngineOptions& engine, std::vector<double>* point_d2 = nullptr) {
  const std::size_t n = data.rows, dims = data.dims;
  const std::size_t n_threads = engine.effective_threads();
  // Mirrors the chunking inside parallel_for so begin/chunk recovers the
  // worker index; partial sums then merge in a fixed order.
  const std::size_t eff = std::min(n_threads == 0 ? 1 : n_threads, n);
  const std::size_t chunk = (n + eff - 1) / eff;
  std::vector<double> partial(eff, 0.0);
  parallel_for(n, n_threads, [&](std::size_t begin, std::size_t end) {
    const std::size_t tid = begin / chunk;
    double local = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const float* p = data.row(i);
      double best = point_center_d2(p, centers.data(), dims);
      std::int32_t best_c = 0;
      for (std::size_t c = 1; c < k; ++c) {
        const double d2 = point_center_d2(p, centers.data() + c * dims, dims);
        if (d2 < best) {
          best = d2;
          best_c = std::int32_t(c);
        }
      }
      labels[i] = best_c;
      if (point_d2) (*point_d2)[i] = best;
      local += best;
    }
    partial[tid] += local;
  });
  double inertia = 0.0;
  for (double v : partial) inertia += v;  // fixed merge order
  return inertia;
}

LloydState lloyd(const EmbeddingMatrix& data, const KMeansConfig& cfg, std::mt19937_64& rng) {
  const std::size_t n = data.rows, dims = data.dims, k = cfg.k;
  LloydState state;
  state.centers = kmeanspp_seed(data, k, rng);
  state.labels.assign(n, 0);
  std::vector<double> point_d2(n);
  std::vector<double> sums(k * dims);
  std::vector<std::size_t> counts(k);

  double prev_inertia = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    const double inertia = assign_points(data, state.centers, k, state.labels, cfg.engine, &point_d2);
    // Lloyd monotonicity holds in exact arithmetic; allow rounding slack.
    if (inertia > prev_inertia * (1.0 + 1e-9) + 1e-12)
      throw std::logic_error("kmeans: inertia increased across an iteration");
    state.inertia = inertia;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const float* p = data.row(i);
      double* dst = sums.data() + std::size_t(state.labels[i]) * dims;
      for (std::size_t d = 0; d < dims; ++d) dst[d] += p[d];
      ++counts[std::size_t(state.labels[i])];
    }
    // Re-seed any emptied cluster with the point farthest from its center
    // (ties to the lower point index).
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t farthest = 0;
      double far_d2 = -1.0;
      for (std::size_t i = 0; i < n; ++i)
        if (counts[std::size_t(state.labels[i])] > 1 && point_d2[i] > far_d2) {
          far_d2 = point_d2[i];
          farthest = i;
        }
      const float* p = data.row(farthest);
      --counts[std::size_t(state.labels[farthest])];
      double* old_sum = sums.data() + std::size_t(state.labels[farthest]) * dims;
      for (std::size_t d = 0; d < dims; ++d) old_sum[d] -= p[d];
      state.labels[farthest] = std::int32_t(c);
      double* dst = sums.data() + c * dims;
      for (std::size_t d = 0; d < dims; ++d) dst[d] = p[d];
      counts[c] = 1;
      point_d2[farthest] = 0.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
      double* dst = state.centers.data() + c * dims;
      const double inv = 1.0 / double(counts[c]);
      for (std::size_t d = 0; d < dims; ++d) dst[d] = sums[c * dims + d] * inv;
    }

    if (prev_inertia < std::numeric_limits<double>::infinity()) {
      const double change = prev_inertia - inertia;
      if (change >= 0.0 && change <= cfg.tol * std::max(prev_inertia, 1e-300)) break;
    }
    prev_inertia = inertia;
  }
  // Final assignment against the last centers.
  state.inertia = assign_points(data, state.centers, k, state.labels, cfg.engine, &point_d2);
  return state;
}

}  // namespace

ClusteringResult kmeans_fit(const EmbeddingMatrix& data, const KMeansConfig& cfg) {
  cfg.validate();
  data.validate();
  if (data.rows < cfg.k) throw std::invalid_argument("kmeans: fewer rows than clusters");

  std::mt19937_64 rng(cfg.seed);
  LloydState best;
  for (std::size_t restart = 0; restart < cfg.n_init; ++restart) {
    LloydState state = lloyd(data, cfg, rng);
    if (state.inertia < best.inertia) best = std::move(state);
  }

  ClusteringResult result;
  result.assignments = std::move(best.labels);
  result.outlier_score.resize(data.rows);
  for (std::size_t i = 0; i < data.rows; ++i) {
    const double d2 = point_center_d2(data.row(i), best.centers.data() +
                                                       std::size_t(result.assignments[i]) * data.dims,
                                      data.dims);
    result.outlier_score[i] = std::sqrt(d2);
  }

  // Compact away clusters that ended empty so labels stay dense.
  std::vector<std::int32_t> remap(cfg.k, -1);
  std::int32_t next = 0;
  for (std::int32_t a : result.assignments)
    if (remap[std::size_t(a)] < 0) remap[std::size_t(a)] = 0;
  for (std::size_t c = 0; c < cfg.k; ++c)
    if (remap[c] == 0) remap[c] = next++;
  for (std::int32_t& a : result.assignments) a = remap[std::size_t(a)];
  result.n_clusters = std::size_t(next);

  result.algorithm_meta = {{"algorithm", "kmeans"},
                           {"k", std::to_string(cfg.k)},
                           {"n_init", std::to_string(cfg.n_init)},
                           {"max_iters", std::to_string(cfg.max_iters)},
                           {"seed", std::to_string(cfg.seed)},
                           {"inertia", std::to_string(best.inertia)}};
  return result;
}

}  // namespace trackmine
