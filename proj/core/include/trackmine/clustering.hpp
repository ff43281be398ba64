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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trackmine/distance.hpp"
#include "trackmine/types.hpp"

namespace trackmine {

/// Flat clustering of embedding rows. Label -1 marks noise/outliers; the
/// remaining labels are dense 0..n_clusters-1. outlier_score is >= 0 with
/// higher meaning more outlying, and is defined for every point.
struct ClusteringResult {
  std::vector<std::int32_t> assignments;
  std::vector<double> outlier_score;
  std::size_t n_clusters = 0;
  std::map<std::string, std::string> algorithm_meta;

  std::size_t noise_count() const;
};

struct KMeansConfig {
  std::size_t k = 1;
  std::size_t max_iters = 300;
  std::size_t n_init = 10;
  std::uint64_t seed = 0;
  double tol = 1e-6;  // relative inertia-change stop threshold
  EngineOptions engine;

  void validate() const;
};

/// Lloyd iterations from k-means++ seeds, best of n_init restarts by final
/// inertia. Assignments are nearest-center labels (ties to the lower center
/// index); outlier_score is the Euclidean distance to the assigned center.
/// No point is labeled -1 here: outlier exclusion happens downstream by
/// score ranking. Throws std::invalid_argument for rows < k or non-finite
/// data.
ClusteringResult kmeans_fit(const EmbeddingMatrix& data, const KMeansConfig& cfg);

enum class MstStrategy : std::uint8_t {
  Auto,     // Prim up to 50k points, Boruvka + ball tree above
  Prim,
  Boruvka,
};

struct HdbscanConfig {
  std::size_t min_cluster_size = 30;
  std::size_t min_samples = 0;  // 0 = use min_cluster_size
  std::uint64_t seed = 0;       // reserved for randomized acceleration; exact mode ignores it
  MstStrategy mst = MstStrategy::Auto;
  EngineOptions engine;

  std::size_t effective_min_samples() const;
  void validate() const;
};

/// Density-based hierarchical clustering:
///   1. core distance  = distance to the min_samples-th nearest neighbor
///   2. mutual reachability d(a,b) = max(core_a, core_b, euclidean(a,b))
///   3. minimum spanning tree of the implicit complete graph
///   4. single-linkage hierarchy from the sorted MST edges
///   5. hierarchy condensed by min_cluster_size
///   6. clusters selected by maximum stability (excess of mass)
///   7. leftover points labeled -1, outlier scores from the density ratio
///      at each point's departure from the hierarchy
/// Deterministic given the data order; edge-weight ties break by lower
/// index pair. Fewer rows than min_cluster_size yields all-noise output.
ClusteringResult hdbscan_fit(const EmbeddingMatrix& data, const HdbscanConfig& cfg);

/// MST edge of the mutual-reachability graph.
struct MstEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double weight = 0.0;
};

/// Exposed for oracle tests and benchmarks: the MST stage alone.
std::vector<MstEdge> mutual_reachability_mst(const EmbeddingMatrix& data,
                                             const std::vector<double>& core_distances,
                                             MstStrategy strategy,
                                             const EngineOptions& opts = {});

/// Canonical form for permutation-invariant comparisons: labels renumbered
/// by first occurrence, -1 preserved.
std::vector<std::int32_t> canonical_labels(const std::vector<std::int32_t>& labels);

}  // namespace trackmine
