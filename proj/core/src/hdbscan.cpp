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
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "trackmine/balltree.hpp"
#include "trackmine/clustering.hpp"

namespace trackmine {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kPrimCutover = 50000;  // Auto: Prim below, Boruvka above

// Strict total order on edges: (weight, min index, max index). Makes the
// MST unique, so Prim, Boruvka, and the test oracles must produce the same
// edge set.
inline bool edge_less(double w1, std::uint32_t a1, std::uint32_t b1, double w2, std::uint32_t a2,
                      std::uint32_t b2) {
  if (w1 != w2) return w1 < w2;
  if (a1 != a2) return a1 < a2;
  return b1 < b2;
}

struct UnionFind {
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> size;

  explicit UnionFind(std::size_t n) : parent(n), size(n, 1) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const std::uint32_t next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  }
  std::uint32_t unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size[a] < size[b] || (size[a] == size[b] && b < a)) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
    return a;
  }
};

// Reusable worker pool for the per-step relax/argmin sweep of Prim's
// algorithm; a spawned thread per step would dominate the runtime.
class EpochPool {
 public:
  EpochPool(std::size_t n_workers, std::function<void(std::size_t)> task)
      : n_(n_workers), task_(std::move(task)) {
    threads_.reserve(n_);
    for (std::size_t t = 0; t < n_; ++t)
      threads_.emplace_back([this, t] { loop(t); });
  }
  ~EpochPool() {
    stop_.store(true, std::memory_order_release);
    epoch_.fetch_add(1, std::memory_order_release);
    epoch_.notify_all();
    for (std::thread& t : threads_) t.join();
  }
  void run_step() {
    done_.store(0, std::memory_order_release);
    epoch_.fetch_add(1, std::memory_order_release);
    epoch_.notify_all();
    for (;;) {
      const std::size_t d = done_.load(std::memory_order_acquire);
      if (d == n_) break;
      done_.wait(d, std::memory_order_acquire);
    }
  }

 private:
  void loop(std::size_t tid) {
    // Start from the construction-time epoch: a worker that comes up after
    // the first run_step() must still see that step as pending.
    std::uint64_t seen = 0;
    for (;;) {
      epoch_.wait(seen, std::memory_order_acquire);
      seen = epoch_.load(std::memory_order_acquire);
      if (stop_.load(std::memory_order_acquire)) return;
      task_(tid);
      if (done_.fetch_add(1, std::memory_order_acq_rel) + 1 == n_) done_.notify_all();
    }
  }

  std::size_t n_;
  std::function<void(std::size_t)> task_;
  std::vector<std::thread> threads_;
  std::atomic<std::uint64_t> epoch_{0};
  std::atomic<std::size_t> done_{0};
  std::atomic<bool> stop_{false};
};

std::vector<MstEdge> prim_mst(const EmbeddingMatrix& data, const std::vector<double>& core,
                              const EngineOptions& opts) {
  const std::size_t n = data.rows;
  const std::size_t dims = data.dims;
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  edges.reserve(n - 1);

  std::vector<char> in_tree(n, 0);
  std::vector<double> best_w(n, kInf);
  std::vector<std::uint32_t> best_partner(n, 0);

  std::uint32_t current = 0;
  in_tree[0] = 1;

  struct Local {
    double w = kInf;
    std::uint32_t u = 0;
    std::uint32_t partner = 0;
    char pad[40];  // keep slots on separate cache lines
  };

  const std::size_t n_threads =
      n >= 8192 ? std::min<std::size_t>(opts.effective_threads(), 64) : 1;
  const std::size_t chunk = (n + n_threads - 1) / n_threads;
  std::vector<Local> locals(n_threads);

  auto relax_range = [&](std::size_t tid) {
    const std::size_t begin = tid * chunk;
    const std::size_t end = std::min(begin + chunk, n);
    const float* vrow = data.row(current);
    const double core_v = core[current];
    Local local;
    for (std::size_t u = begin; u < end; ++u) {
      if (in_tree[u]) continue;
      const double d = std::sqrt(squared_distance(data.row(u), vrow, dims));
      const double w = std::max({core[u], core_v, d});
      const std::uint32_t a = std::min<std::uint32_t>(std::uint32_t(u), current);
      const std::uint32_t b = std::max<std::uint32_t>(std::uint32_t(u), current);
      const std::uint32_t pa = std::min(std::uint32_t(u), best_partner[u]);
      const std::uint32_t pb = std::max(std::uint32_t(u), best_partner[u]);
      if (edge_less(w, a, b, best_w[u], pa, pb)) {
        best_w[u] = w;
        best_partner[u] = current;
      }
      const std::uint32_t ca = std::min(std::uint32_t(u), best_partner[u]);
      const std::uint32_t cb = std::max(std::uint32_t(u), best_partner[u]);
      if (edge_less(best_w[u], ca, cb, local.w, std::min(local.u, local.partner),
                    std::max(local.u, local.partner))) {
        local.w = best_w[u];
        local.u = std::uint32_t(u);
        local.partner = best_partner[u];
      }
    }
    locals[tid] = local;
  };

  auto reduce_and_advance = [&]() {
    Local best;
    for (const Local& l : locals) {
      if (l.w == kInf) continue;
      if (edge_less(l.w, std::min(l.u, l.partner), std::max(l.u, l.partner), best.w,
                    std::min(best.u, best.partner), std::max(best.u, best.partner)))
        best = l;
    }
    edges.push_back({std::min(best.u, best.partner), std::max(best.u, best.partner), best.w});
    in_tree[best.u] = 1;
    best_w[best.u] = kInf;
    current = best.u;
  };

  if (n_threads <= 1) {
    for (std::size_t step = 0; step + 1 < n; ++step) {
      relax_range(0);
      reduce_and_advance();
    }
  } else {
    EpochPool pool(n_threads, relax_range);
    for (std::size_t step = 0; step + 1 < n; ++step) {
      pool.run_step();
      reduce_and_advance();
    }
  }
  return edges;
}

std::vector<MstEdge> boruvka_mst(BallTree& tree, const EngineOptions& opts) {
  const std::size_t n = tree.size();
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  edges.reserve(n - 1);

  UnionFind uf(n);
  std::vector<std::uint32_t> component(n);
  std::iota(component.begin(), component.end(), 0u);
  std::vector<BallTree::Candidate> per_point(n);
  std::vector<char> cached(n, 0);

  while (edges.size() + 1 < n) {
    tree.update_components(component);
    // A cached candidate stays optimal while its endpoint is foreign: the
    // foreign set only shrinks as components merge, and the cached edge is
    // still in it. Only points whose candidate was absorbed re-query.
    parallel_for(n, opts.effective_threads(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t p = begin; p < end; ++p) {
        if (cached[p]) {
          const std::uint32_t other = per_point[p].a == p ? per_point[p].b : per_point[p].a;
          if (component[other] != component[p]) continue;
        }
        per_point[p] = tree.nearest_foreign(std::uint32_t(p), component);
        cached[p] = 1;
      }
    });

    // Fold per-point candidates into one best outgoing edge per component.
    std::vector<BallTree::Candidate> best(n);
    std::vector<std::uint32_t> touched;
    for (std::size_t p = 0; p < n; ++p) {
      const BallTree::Candidate& cand = per_point[p];
      if (!cand.valid()) continue;
      BallTree::Candidate& slot = best[component[p]];
      if (!slot.valid()) touched.push_back(component[p]);
      if (edge_less(cand.weight, cand.a, cand.b, slot.weight, slot.a, slot.b)) slot = cand;
    }
    std::vector<BallTree::Candidate> round;
    round.reserve(touched.size());
    for (std::uint32_t c : touched) round.push_back(best[c]);
    std::sort(round.begin(), round.end(), [](const BallTree::Candidate& x, const BallTree::Candidate& y) {
      return edge_less(x.weight, x.a, x.b, y.weight, y.a, y.b);
    });
    bool progressed = false;
    for (const BallTree::Candidate& cand : round) {
      if (uf.find(cand.a) == uf.find(cand.b)) continue;
      uf.unite(cand.a, cand.b);
      edges.push_back({cand.a, cand.b, cand.weight});
      progressed = true;
    }
    if (!progressed) throw std::logic_error("boruvka: no progress in a round");
    for (std::size_t p = 0; p < n; ++p) component[p] = uf.find(std::uint32_t(p));
  }
  return edges;
}

// Dendrogram from sorted MST edges, scipy layout: leaves 0..n-1, internal
// node n+k merges at edge k's weight.
struct Dendrogram {
  std::size_t n_points = 0;
  std::vector<std::uint32_t> left, right;  // per internal node
  std::vector<double> height;
  std::vector<std::uint32_t> size;

  std::size_t size_of(std::uint32_t node) const {
    return node < n_points ? 1 : size[node - n_points];
  }
};

Dendrogram single_linkage(std::vector<MstEdge> edges, std::size_t n) {
  std::sort(edges.begin(), edges.end(), [](const MstEdge& x, const MstEdge& y) {
    return edge_less(x.weight, x.a, x.b, y.weight, y.a, y.b);
  });
  Dendrogram d;
  d.n_points = n;
  d.left.resize(edges.size());
  d.right.resize(edges.size());
  d.height.resize(edges.size());
  d.size.resize(edges.size());
  UnionFind uf(n);
  std::vector<std::uint32_t> dendro_of(n);
  std::iota(dendro_of.begin(), dendro_of.end(), 0u);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::uint32_t ra = uf.find(edges[k].a);
    const std::uint32_t rb = uf.find(edges[k].b);
    const std::uint32_t na = dendro_of[ra];
    const std::uint32_t nb = dendro_of[rb];
    d.left[k] = std::min(na, nb);
    d.right[k] = std::max(na, nb);
    d.height[k] = edges[k].weight;
    d.size[k] = std::uint32_t(d.size_of(na) + d.size_of(nb));
    dendro_of[uf.unite(ra, rb)] = std::uint32_t(n + k);
  }
  return d;
}

// Hierarchy pruned by minimum cluster size. Cluster 0 is the root.
struct CondensedTree {
  std::vector<std::int32_t> parent;      // per cluster, -1 for root
  std::vector<double> birth_lambda;      // per cluster
  std::vector<std::uint32_t> birth_size;
  std::vector<std::vector<std::int32_t>> children;
  std::vector<std::int32_t> point_cluster;  // cluster each point departs from
  std::vector<double> point_lambda;         // lambda at that departure

  std::size_t n_clusters() const { return parent.size(); }
};

void collect_leaves(const Dendrogram& d, std::uint32_t node, std::vector<std::uint32_t>& out) {
  std::vector<std::uint32_t> stack{node};
  while (!stack.empty()) {
    const std::uint32_t x = stack.back();
    stack.pop_back();
    if (x < d.n_points) {
      out.push_back(x);
    } else {
      stack.push_back(d.left[x - d.n_points]);
      stack.push_back(d.right[x - d.n_points]);
    }
  }
}

CondensedTree condense(const Dendrogram& d, std::size_t min_cluster_size) {
  const std::size_t n = d.n_points;
  CondensedTree tree;
  tree.point_cluster.assign(n, 0);
  tree.point_lambda.assign(n, 0.0);
  tree.parent.push_back(-1);
  tree.birth_lambda.push_back(0.0);
  tree.birth_size.push_back(std::uint32_t(n));
  tree.children.emplace_back();

  if (n < 2) {
    if (n == 1) {
      tree.point_cluster[0] = 0;
      tree.point_lambda[0] = kInf;
    }
    return tree;
  }

  struct Item {
    std::uint32_t node;     // dendrogram internal node
    std::int32_t cluster;   // condensed cluster it belongs to
  };
  std::vector<Item> stack{{std::uint32_t(n + d.left.size() - 1), 0}};
  std::vector<std::uint32_t> leaves;

  auto drop_points = [&](std::uint32_t node, std::int32_t cluster, double lambda) {
    leaves.clear();
    collect_leaves(d, node, leaves);
    for (std::uint32_t p : leaves) {
      tree.point_cluster[p] = cluster;
      tree.point_lambda[p] = lambda;
    }
  };

  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    const std::size_t k = item.node - n;
    const double h = d.height[k];
    const double lambda = h > 0.0 ? 1.0 / h : kInf;
    const std::uint32_t left = d.left[k];
    const std::uint32_t right = d.right[k];
    const std::size_t left_size = d.size_of(left);
    const std::size_t right_size = d.size_of(right);
    const bool left_big = left_size >= min_cluster_size;
    const bool right_big = right_size >= min_cluster_size;

    if (left_big && right_big) {
      for (const std::uint32_t child : {left, right}) {
        const std::int32_t id = std::int32_t(tree.n_clusters());
        tree.parent.push_back(item.cluster);
        tree.birth_lambda.push_back(lambda);
        tree.birth_size.push_back(std::uint32_t(d.size_of(child)));
        tree.children.emplace_back();
        tree.children[std::size_t(item.cluster)].push_back(id);
        if (child < n) {
          // A cluster this small only arises when min_cluster_size == 1,
          // which the config forbids; keep the point anyway.
          tree.point_cluster[child] = id;
          tree.point_lambda[child] = kInf;
        } else {
          stack.push_back({child, id});
        }
      }
    } else if (!left_big && !right_big) {
      drop_points(item.node, item.cluster, lambda);
    } else {
      const std::uint32_t small = left_big ? right : left;
      const std::uint32_t big = left_big ? left : right;
      drop_points(small, item.cluster, lambda);
      stack.push_back({big, item.cluster});
    }
  }
  return tree;
}

std::vector<double> cluster_stability(const CondensedTree& tree) {
  std::vector<double> stability(tree.n_clusters(), 0.0);
  auto contribution = [](double lambda, double birth) {
    if (std::isinf(lambda) && std::isinf(birth)) return 0.0;
    return lambda - birth;
  };
  for (std::size_t p = 0; p < tree.point_cluster.size(); ++p) {
    const std::int32_t c = tree.point_cluster[p];
    stability[std::size_t(c)] += contribution(tree.point_lambda[p], tree.birth_lambda[std::size_t(c)]);
  }
  for (std::size_t c = 1; c < tree.n_clusters(); ++c)
    stability[std::size_t(tree.parent[c])] +=
        contribution(tree.birth_lambda[c], tree.birth_lambda[std::size_t(tree.parent[c])]) *
        double(tree.birth_size[c]);
  return stability;
}

// Excess-of-mass selection; the root is never selectable.
std::vector<bool> select_clusters_eom(const CondensedTree& tree, const std::vector<double>& stability) {
  const std::size_t m = tree.n_clusters();
  std::vector<bool> selected(m, false);
  std::vector<double> subtree(m, 0.0);
  for (std::size_t c = m; c-- > 1;) {
    if (tree.children[c].empty()) {
      selected[c] = true;
      subtree[c] = stability[c];
    } else {
      double child_sum = 0.0;
      for (std::int32_t ch : tree.children[c]) child_sum += subtree[std::size_t(ch)];
      if (stability[c] >= child_sum) {
        selected[c] = true;
        subtree[c] = stability[c];
      } else {
        subtree[c] = child_sum;
      }
    }
  }
  // Keep only the topmost selected cluster on each root-to-leaf path.
  std::vector<bool> ancestor_selected(m, false);
  std::vector<bool> chosen(m, false);
  for (std::size_t c = 1; c < m; ++c) {
    const std::size_t parent = std::size_t(tree.parent[c]);
    ancestor_selected[c] = ancestor_selected[parent] || (parent != 0 && selected[parent]);
    chosen[c] = selected[c] && !ancestor_selected[c];
  }
  return chosen;
}

std::vector<double> glosh_scores(const CondensedTree& tree) {
  const std::size_t m = tree.n_clusters();
  std::vector<double> death(m, 0.0);
  for (std::size_t p = 0; p < tree.point_cluster.size(); ++p) {
    double& slot = death[std::size_t(tree.point_cluster[p])];
    slot = std::max(slot, tree.point_lambda[p]);
  }
  for (std::size_t c = m; c-- > 1;) {
    double& parent = death[std::size_t(tree.parent[c])];
    parent = std::max(parent, death[c]);
  }
  std::vector<double> scores(tree.point_cluster.size(), 0.0);
  for (std::size_t p = 0; p < scores.size(); ++p) {
    const double lambda = tree.point_lambda[p];
    const double dmax = death[std::size_t(tree.point_cluster[p])];
    double s;
    if (!std::isfinite(lambda)) {
      s = 0.0;  // the point persists to maximum density
    } else if (!std::isfinite(dmax)) {
      s = 1.0;
    } else if (dmax <= 0.0) {
      s = 0.0;
    } else {
      s = (dmax - lambda) / dmax;
    }
    scores[p] = std::clamp(s, 0.0, 1.0);
  }
  return scores;
}

ClusteringResult all_noise_result(std::size_t n, std::map<std::string, std::string> meta) {
  ClusteringResult result;
  result.assignments.assign(n, -1);
  result.outlier_score.assign(n, 0.0);
  result.n_clusters = 0;
  result.algorithm_meta = std::move(meta);
  return result;
}

}  // namespace

std::size_t HdbscanConfig::effective_min_samples() const {
  return min_samples == 0 ? min_cluster_size : min_samples;
}

void HdbscanConfig::validate() const {
  if (min_cluster_size < 2) throw std::invalid_argument("hdbscan: min_cluster_size must be >= 2");
  if (effective_min_samples() < 1) throw std::invalid_argument("hdbscan: min_samples must be >= 1");
}

std::vector<MstEdge> mutual_reachability_mst(const EmbeddingMatrix& data,
                                             const std::vector<double>& core_distances,
                                             MstStrategy strategy, const EngineOptions& opts) {
  if (core_distances.size() != data.rows)
    throw std::invalid_argument("mutual_reachability_mst: core distance count mismatch");
  const bool use_prim =
      strategy == MstStrategy::Prim || (strategy == MstStrategy::Auto && data.rows <= kPrimCutover);
  if (use_prim) return prim_mst(data, core_distances, opts);
  BallTree tree(data);
  tree.set_core_distances(core_distances);
  return boruvka_mst(tree, opts);
}

ClusteringResult hdbscan_fit(const EmbeddingMatrix& data, const HdbscanConfig& cfg) {
  cfg.validate();
  data.validate();
  const std::size_t n = data.rows;

  std::map<std::string, std::string> meta = {
      {"algorithm", "hdbscan"},
      {"min_cluster_size", std::to_string(cfg.min_cluster_size)},
      {"seed", std::to_string(cfg.seed)},
  };

  // Fewer rows than the minimum cluster size: nothing can ever form a
  // cluster, so every point is noise with a flat outlier score.
  if (n < cfg.min_cluster_size || n < 2) {
    meta["min_samples"] = std::to_string(cfg.effective_min_samples());
    meta["n_clusters"] = "0";
    meta["note"] = "fewer rows than min_cluster_size; all points noise";
    return all_noise_result(n, std::move(meta));
  }

  const std::size_t min_samples = std::min(cfg.effective_min_samples(), n - 1);
  meta["min_samples"] = std::to_string(min_samples);

  BallTree tree(data);
  const KnnResult knn = tree.knn_all(min_samples, cfg.engine);
  std::vector<double> core(n);
  for (std::size_t p = 0; p < n; ++p) core[p] = knn.distances[p * min_samples + min_samples - 1];

  const bool use_prim =
      cfg.mst == MstStrategy::Prim || (cfg.mst == MstStrategy::Auto && n <= kPrimCutover);
  std::vector<MstEdge> mst;
  if (use_prim) {
    mst = prim_mst(data, core, cfg.engine);
  } else {
    tree.set_core_distances(core);
    mst = boruvka_mst(tree, cfg.engine);
  }
  meta["mst_strategy"] = use_prim ? "prim" : "boruvka";

  const Dendrogram dendrogram = single_linkage(std::move(mst), n);
  const CondensedTree condensed = condense(dendrogram, cfg.min_cluster_size);
  const std::vector<double> stability = cluster_stability(condensed);
  const std::vector<bool> chosen = select_clusters_eom(condensed, stability);

  // Dense labels in cluster-creation order; ownership propagates down to
  // every condensed descendant.
  const std::size_t m = condensed.n_clusters();
  std::vector<std::int32_t> label_of_cluster(m, -1);
  std::int32_t next_label = 0;
  for (std::size_t c = 1; c < m; ++c)
    if (chosen[c]) label_of_cluster[c] = next_label++;
  std::vector<std::int32_t> owner(m, -1);
  for (std::size_t c = 1; c < m; ++c) {
    if (chosen[c])
      owner[c] = label_of_cluster[c];
    else
      owner[c] = owner[std::size_t(condensed.parent[c])];
  }

  ClusteringResult result;
  result.assignments.resize(n);
  for (std::size_t p = 0; p < n; ++p)
    result.assignments[p] = owner[std::size_t(condensed.point_cluster[p])];
  result.outlier_score = glosh_scores(condensed);
  result.n_clusters = std::size_t(next_label);
  meta["n_clusters"] = std::to_string(result.n_clusters);
  result.algorithm_meta = std::move(meta);
  return result;
}

}  // namespace trackmine
