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
#include <limits>
#include <vector>

#include "trackmine/distance.hpp"
#include "trackmine/types.hpp"

namespace trackmine {

/// Exact metric tree over embedding rows. Construction is deterministic
/// (median split along the dimension of largest spread). Queries never
/// approximate: node bounds are inflated by one ulp so pruning stays
/// conservative under floating point.
class BallTree {
 public:
  struct Node {
    std::uint32_t begin = 0;   // range into point_order_
    std::uint32_t end = 0;
    std::int32_t left = -1;    // child node ids, -1 for leaves
    std::int32_t right = -1;
    double radius = 0.0;
    std::uint32_t center = 0;  // index into centers_
  };

  BallTree() = default;
  explicit BallTree(const EmbeddingMatrix& data, std::size_t leaf_size = 32);

  std::size_t size() const { return n_points_; }

  /// Distances to the k nearest other points of every point (ascending).
  KnnResult knn_all(std::size_t k, const EngineOptions& opts = {}) const;

  /// Attach per-point core distances; required before mutual-reachability
  /// queries. Also precomputes per-node minimum core distances.
  void set_core_distances(std::vector<double> core);
  const std::vector<double>& core_distances() const { return core_; }

  /// Edge candidate under the mutual-reachability order.
  struct Candidate {
    double weight = std::numeric_limits<double>::infinity();
    std::uint32_t a = 0;  // always a < b for valid candidates
    std::uint32_t b = 0;
    bool valid() const { return weight < std::numeric_limits<double>::infinity(); }
  };

  /// Minimum outgoing mutual-reachability edge from point q to any point in
  /// a different component, under the total order (weight, min id, max id).
  /// component[x] gives the component of point x; per-node uniform-component
  /// tags must be refreshed with update_components() after unions.
  Candidate nearest_foreign(std::uint32_t q, const std::vector<std::uint32_t>& component) const;

  /// Recompute per-node "all points share this component" tags, O(n).
  void update_components(const std::vector<std::uint32_t>& component);

  const EmbeddingMatrix* data() const { return data_; }

 private:
  std::int32_t build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size);
  void knn_point(std::uint32_t q, std::size_t k,
                 std::vector<std::pair<double, std::uint32_t>>& heap) const;

  const EmbeddingMatrix* data_ = nullptr;
  std::size_t n_points_ = 0;
  std::size_t dims_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> point_order_;   // leaf ranges index this
  std::vector<float> centers_;               // one row per node
  std::vector<double> core_;                 // per point, optional
  std::vector<double> node_min_core_;        // per node
  std::vector<std::int64_t> node_component_; // -1 = mixed
};

}  // namespace trackmine
