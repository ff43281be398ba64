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

#include "trackmine/balltree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trackmine {
namespace {

// Conservative inflation so float-derived bounds never prune a true result.
inline double inflate(double r) { return r * (1.0 + 1e-9) + 1e-12; }

}  // namespace

BallTree::BallTree(const EmbeddingMatrix& data, std::size_t leaf_size) {
  data.validate();
  if (data.rows == 0) throw std::invalid_argument("ball tree: empty data");
  data_ = &data;
  n_points_ = data.rows;
  dims_ = data.dims;
  point_order_.resize(n_points_);
  std::iota(point_order_.begin(), point_order_.end(), 0u);
  nodes_.reserve(2 * (n_points_ / std::max<std::size_t>(leaf_size, 1) + 1));
  build(0, std::uint32_t(n_points_), std::max<std::size_t>(leaf_size, 4));
}

std::int32_t BallTree::build(std::uint32_t begin, std::uint32_t end, std::size_t leaf_size) {
  const std::int32_t id = std::int32_t(nodes_.size());
  nodes_.push_back({});
  Node node;
  node.begin = begin;
  node.end = end;

  // Centroid in double, stored as float; all query math then reuses the
  // shared float kernel.
  std::vector<double> centroid(dims_, 0.0);
  for (std::uint32_t i = begin; i < end; ++i) {
    const float* row = data_->row(point_order_[i]);
    for (std::size_t d = 0; d < dims_; ++d) centroid[d] += row[d];
  }
  const double inv = 1.0 / double(end - begin);
  node.center = std::uint32_t(centers_.size() / std::max<std::size_t>(dims_, 1));
  for (std::size_t d = 0; d < dims_; ++d) centers_.push_back(float(centroid[d] * inv));
  const float* center = centers_.data() + std::size_t(node.center) * dims_;

  double max_d2 = 0.0;
  for (std::uint32_t i = begin; i < end; ++i)
    max_d2 = std::max(max_d2, squared_distance(center, data_->row(point_order_[i]), dims_));
  node.radius = inflate(std::sqrt(max_d2));

  // Split along the dimension of largest spread, at the median.
  bool split = end - begin > leaf_size;
  std::size_t split_dim = 0;
  if (split) {
    double best_spread = 0.0;
    for (std::size_t d = 0; d < dims_; ++d) {
      float lo = data_->row(point_order_[begin])[d];
      float hi = lo;
      for (std::uint32_t i = begin + 1; i < end; ++i) {
        const float v = data_->row(point_order_[i])[d];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double spread = double(hi) - double(lo);
      if (spread > best_spread) {
        best_spread = spread;
        split_dim = d;
      }
    }
    if (best_spread <= 0.0) split = false;  // all points identical
  }

  if (split) {
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(point_order_.begin() + begin, point_order_.begin() + mid,
                     point_order_.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                       const float va = data_->row(a)[split_dim];
                       const float vb = data_->row(b)[split_dim];
                       if (va != vb) return va < vb;
                       return a < b;
                     });
    node.left = build(begin, mid, leaf_size);
    node.right = build(mid, end, leaf_size);
  }
  nodes_[id] = node;
  return id;
}

void BallTree::knn_point(std::uint32_t q, std::size_t k,
                         std::vector<std::pair<double, std::uint32_t>>& heap) const {
  heap.clear();
  const float* qrow = data_->row(q);
  // Explicit stack of node ids, nearer child pushed last (visited first).
  std::vector<std::int32_t> stack;
  stack.push_back(0);
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[std::size_t(id)];
    const double d_center =
        std::sqrt(squared_distance(qrow, centers_.data() + std::size_t(node.center) * dims_, dims_));
    const double lb = std::max(0.0, d_center - node.radius);
    if (heap.size() == k && lb * lb > heap.front().first) continue;
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t p = point_order_[i];
        if (p == q) continue;
        const std::pair<double, std::uint32_t> entry{
            squared_distance(qrow, data_->row(p), dims_), p};
        if (heap.size() < k) {
          heap.push_back(entry);
          std::push_heap(heap.begin(), heap.end());
        } else if (entry < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = entry;
          std::push_heap(heap.begin(), heap.end());
        }
      }
    } else {
      const Node& l = nodes_[std::size_t(node.left)];
      const Node& r = nodes_[std::size_t(node.right)];
      const double dl =
          squared_distance(qrow, centers_.data() + std::size_t(l.center) * dims_, dims_);
      const double dr =
          squared_distance(qrow, centers_.data() + std::size_t(r.center) * dims_, dims_);
      if (dl <= dr) {
        stack.push_back(node.right);
        stack.push_back(node.left);
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
  }
}

KnnResult BallTree::knn_all(std::size_t k, const EngineOptions& opts) const {
  if (k == 0 || k > n_points_ - 1)
    throw std::invalid_argument("ball tree knn: k must be in [1, rows-1]");
  KnnResult result;
  result.k = k;
  result.distances.resize(n_points_ * k);
  result.indices.resize(n_points_ * k);
  parallel_for(n_points_, opts.effective_threads(), [&](std::size_t begin, std::size_t end) {
    std::vector<std::pair<double, std::uint32_t>> heap;
    heap.reserve(k + 1);
    for (std::size_t q = begin; q < end; ++q) {
      knn_point(std::uint32_t(q), k, heap);
      std::sort_heap(heap.begin(), heap.end());
      for (std::size_t j = 0; j < k; ++j) {
        result.distances[q * k + j] = std::sqrt(heap[j].first);
        result.indices[q * k + j] = heap[j].second;
      }
    }
  });
  return result;
}

void BallTree::set_core_distances(std::vector<double> core) {
  if (core.size() != n_points_)
    throw std::invalid_argument("ball tree: core distance count mismatch");
  core_ = std::move(core);
  node_min_core_.assign(nodes_.size(), 0.0);
  for (std::size_t id = nodes_.size(); id-- > 0;) {
    const Node& node = nodes_[id];
    if (node.left < 0) {
      double m = std::numeric_limits<double>::infinity();
      for (std::uint32_t i = node.begin; i < node.end; ++i)
        m = std::min(m, core_[point_order_[i]]);
      node_min_core_[id] = m;
    } else {
      node_min_core_[id] =
          std::min(node_min_core_[std::size_t(node.left)], node_min_core_[std::size_t(node.right)]);
    }
  }
}

void BallTree::update_components(const std::vector<std::uint32_t>& component) {
  if (component.size() != n_points_)
    throw std::invalid_argument("ball tree: component array mismatch");
  node_component_.assign(nodes_.size(), -1);
  for (std::size_t id = nodes_.size(); id-- > 0;) {
    const Node& node = nodes_[id];
    if (node.left < 0) {
      std::int64_t tag = component[point_order_[node.begin]];
      for (std::uint32_t i = node.begin + 1; i < node.end && tag >= 0; ++i)
        if (component[point_order_[i]] != std::uint32_t(tag)) tag = -1;
      node_component_[id] = tag;
    } else {
      const std::int64_t l = node_component_[std::size_t(node.left)];
      const std::int64_t r = node_component_[std::size_t(node.right)];
      node_component_[id] = (l >= 0 && l == r) ? l : -1;
    }
  }
}

BallTree::Candidate BallTree::nearest_foreign(std::uint32_t q,
                                              const std::vector<std::uint32_t>& component) const {
  if (core_.empty()) throw std::logic_error("ball tree: core distances not set");
  Candidate best;
  const std::uint32_t comp_q = component[q];
  const double core_q = core_[q];
  const float* qrow = data_->row(q);

  std::vector<std::int32_t> stack;
  stack.push_back(0);
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[std::size_t(id)];
    if (node_component_[std::size_t(id)] == std::int64_t(comp_q)) continue;
    const double d_center =
        std::sqrt(squared_distance(qrow, centers_.data() + std::size_t(node.center) * dims_, dims_));
    const double lb =
        std::max({core_q, node_min_core_[std::size_t(id)], d_center - node.radius});
    if (lb > best.weight) continue;
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t p = point_order_[i];
        if (p == q || component[p] == comp_q) continue;
        const double w =
            std::max({core_q, core_[p], std::sqrt(squared_distance(qrow, data_->row(p), dims_))});
        const std::uint32_t a = std::min(q, p), b = std::max(q, p);
        if (w < best.weight ||
            (w == best.weight && (a < best.a || (a == best.a && b < best.b)))) {
          best.weight = w;
          best.a = a;
          best.b = b;
        }
      }
    } else {
      const Node& l = nodes_[std::size_t(node.left)];
      const Node& r = nodes_[std::size_t(node.right)];
      const double dl =
          squared_distance(qrow, centers_.data() + std::size_t(l.center) * dims_, dims_);
      const double dr =
          squared_distance(qrow, centers_.data() + std::size_t(r.center) * dims_, dims_);
      if (dl <= dr) {
        stack.push_back(node.right);
        stack.push_back(node.left);
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
  }
  return best;
}

}  // namespace trackmine
