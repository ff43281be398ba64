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

// End-to-end acceptance suite. Each criterion prints exactly one
// [PASS]/[FAIL]/[SKIP] line; the process exits non-zero when any
// criterion fails.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "trackmine/clustering.hpp"
#include "trackmine/embedding.hpp"
#include "trackmine/evaluation.hpp"
#include "trackmine/io.hpp"
#include "trackmine/mask.hpp"
#include "trackmine/synthetic.hpp"
#include "trackmine/track_merge.hpp"

using namespace trackmine;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& name, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << criterion << ". " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++failures;
}

void report_skip(int criterion, const std::string& name, const std::string& why) {
  std::cout << "[SKIP] " << criterion << ". " << name << " (" << why << ")" << std::endl;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double peak_rss_gb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return double(usage.ru_maxrss) / (1024.0 * 1024.0);  // ru_maxrss is in KiB on Linux
}

// ---------------------------------------------------------------- criterion 1

struct MergeInstance {
  std::vector<Tracklet> tracklets;
  SelectionTimeline timeline;
};

MergeInstance random_merge_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> n_tracklets(1, 20);
  std::uniform_int_distribution<std::int64_t> frame(0, 49);
  std::uniform_int_distribution<int> coord(0, 16);
  std::uniform_int_distribution<int> extent(1, 8);
  std::bernoulli_distribution use_rle(0.4);
  std::bernoulli_distribution selected(0.5);
  std::bernoulli_distribution fill(0.45);

  MergeInstance inst;
  const std::size_t n = n_tracklets(rng);
  for (std::size_t i = 0; i < n; ++i) {
    Tracklet t;
    t.id = "t" + std::to_string(100 + i);
    std::int64_t a = frame(rng), b = frame(rng);
    if (a > b) std::swap(a, b);
    for (std::int64_t f = a; f <= b; ++f) {
      FrameObservation obs;
      obs.frame_index = f;
      if (use_rle(rng)) {
        std::vector<std::uint8_t> pixels(24 * 24);
        for (std::uint8_t& p : pixels) p = fill(rng) ? 1 : 0;
        obs.geometry = MaskGeometry::from_rle(rle_from_pixels(pixels, 24, 24));
      } else {
        obs.geometry = MaskGeometry::from_box(
            {double(coord(rng)), double(coord(rng)), double(extent(rng)), double(extent(rng))});
      }
      t.observations.push_back(obs);
    }
    for (std::int64_t f = a; f <= b; ++f)
      if (selected(rng)) inst.timeline.selected[f].push_back(t.id);
    inst.tracklets.push_back(std::move(t));
  }
  return inst;
}

void criterion_1_merge_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260810);
  MergeConfig cfg;
  std::size_t mismatches = 0;
  for (int it = 0; it < 500; ++it) {
    MergeInstance inst = random_merge_instance(rng);
    TrackletStore store(inst.tracklets);
    const std::vector<Track> actual = merge_tracklets(store, inst.timeline, cfg);
    const std::vector<oracles::BruteTrack> expected =
        oracles::brute_merge(inst.tracklets, inst.timeline, cfg.gamma, cfg.lambda_min, 24, 24);
    bool ok = actual.size() == expected.size();
    for (std::size_t i = 0; ok && i < actual.size(); ++i) {
      ok = actual[i].tracklet_ids == expected[i].tracklet_ids &&
           actual[i].junction_overlaps.size() == expected[i].junction_lambdas.size();
      for (std::size_t j = 0; ok && j < expected[i].junction_lambdas.size(); ++j)
        ok = std::abs(actual[i].junction_overlaps[j] - expected[i].junction_lambdas[j]) <= 1e-12;
    }
    if (!ok) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "500 instances, " << mismatches << " mismatches, " << elapsed << " s";
  report(1, mismatches == 0 && elapsed < 10.0, "tracklet merge equals the brute-force merger",
         detail.str());
}

// ---------------------------------------------------------------- criterion 2

void criterion_2_ami_exactness() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> n_dist(2, 10);
  std::uniform_int_distribution<std::int32_t> classes(1, 4);
  std::size_t bad = 0;
  double worst = 0.0;
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = n_dist(rng);
    std::vector<std::int32_t> truth(n), pred(n);
    std::uniform_int_distribution<std::int32_t> ct(0, classes(rng) - 1), cp(0, classes(rng) - 1);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = ct(rng);
      pred[i] = cp(rng);
    }

    std::map<std::int32_t, std::size_t> ca, cb;
    for (std::int32_t v : truth) ++ca[v];
    for (std::int32_t v : pred) ++cb[v];
    std::vector<std::size_t> a, b;
    for (auto& [k, v] : ca) a.push_back(v);
    for (auto& [k, v] : cb) b.push_back(v);

    const double emi = oracles::table_enumeration_emi(a, b);
    const double mi = oracles::oracle_mi(truth, pred);
    const double ht = oracles::oracle_entropy(truth);
    const double hp = oracles::oracle_entropy(pred);
    double expected;
    if (std::abs(mi - ht) < 1e-14 && std::abs(mi - hp) < 1e-14)
      expected = 1.0;
    else
      expected = (mi - emi) / (0.5 * (ht + hp) - emi);
    const double got = ami(truth, pred);
    worst = std::max(worst, std::abs(got - expected));
    if (std::abs(got - expected) > 1e-9) ++bad;
  }

  bool identity_ok = true;
  for (int it = 0; it < 50; ++it) {
    const std::size_t n = n_dist(rng);
    std::vector<std::int32_t> labels(n);
    std::uniform_int_distribution<std::int32_t> c(0, 2);
    for (std::int32_t& v : labels) v = c(rng);
    if (ami(labels, labels) != 1.0) identity_ok = false;
  }
  const bool single_ok = ami({0, 0, 1, 1, 2}, {9, 9, 9, 9, 9}) == 0.0 &&
                         ami({0, 1, 0, 1}, {5, 5, 5, 5}) == 0.0;

  std::ostringstream detail;
  detail << "200 cases, max deviation " << worst << ", identity exact: " << (identity_ok ? "yes" : "no")
         << ", single-cluster zero: " << (single_ok ? "yes" : "no");
  report(2, bad == 0 && identity_ok && single_ok, "AMI matches the exhaustive permutation oracle",
         detail.str());
}

// ---------------------------------------------------------------- criterion 3

void criterion_3_hierarchy_oracle() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> n_points(4, 12);
  std::uniform_int_distribution<std::size_t> mcs_dist(2, 4);
  std::size_t extraction_bad = 0;
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = n_points(rng);
    const EmbeddingMatrix data = oracles::random_matrix(rng, n, 2);
    HdbscanConfig cfg;
    cfg.min_cluster_size = mcs_dist(rng);
    cfg.min_samples = 1 + std::size_t(it) % 3;
    const ClusteringResult actual = hdbscan_fit(data, cfg);
    const oracles::OracleClustering expected = oracles::oracle_density_clustering(
        data, cfg.min_cluster_size, std::min(cfg.min_samples, n - 1));

    std::map<std::int32_t, std::set<std::size_t>> groups;
    std::set<std::size_t> noise;
    for (std::size_t i = 0; i < n; ++i) {
      if (actual.assignments[i] < 0)
        noise.insert(i);
      else
        groups[actual.assignments[i]].insert(i);
    }
    std::set<std::set<std::size_t>> clusters;
    for (auto& [label, members] : groups) clusters.insert(std::move(members));
    if (clusters != expected.clusters || noise != expected.noise) ++extraction_bad;
  }

  std::size_t mst_bad = 0;
  for (const std::size_t n : {50ul, 120ul, 200ul}) {
    for (int rep = 0; rep < 3; ++rep) {
      const EmbeddingMatrix data = oracles::random_matrix(rng, n, 2);
      const std::vector<double> core = oracles::brute_core_distances(data, 4);
      std::vector<MstEdge> actual = mutual_reachability_mst(data, core, MstStrategy::Prim);
      std::vector<MstEdge> expected = oracles::brute_mst(data, core);
      auto canon = [](std::vector<MstEdge>& edges) {
        std::sort(edges.begin(), edges.end(), [](const MstEdge& x, const MstEdge& y) {
          if (x.a != y.a) return x.a < y.a;
          return x.b < y.b;
        });
      };
      canon(actual);
      canon(expected);
      bool ok = actual.size() == expected.size();
      for (std::size_t i = 0; ok && i < actual.size(); ++i)
        ok = actual[i].a == expected[i].a && actual[i].b == expected[i].b &&
             actual[i].weight == expected[i].weight;
      if (!ok) ++mst_bad;
    }
  }

  std::ostringstream detail;
  detail << "300 extraction instances (" << extraction_bad << " bad), 9 MST instances ("
         << mst_bad << " bad)";
  report(3, extraction_bad == 0 && mst_bad == 0,
         "HDBSCAN matches the brute-force hierarchy oracle", detail.str());
}

// ---------------------------------------------------------------- criterion 4

void criterion_4_kmeans_optimality() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> n_dist(3, 12);
  std::uniform_int_distribution<std::size_t> k_dist(1, 3);
  std::uniform_real_distribution<double> value(-10.0, 10.0);
  int optimal = 0;
  for (int it = 0; it < 100; ++it) {
    const std::size_t n = n_dist(rng);
    std::size_t k = std::min(k_dist(rng), n);
    EmbeddingMatrix data = EmbeddingMatrix::zeros(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      data.row(i)[0] = float(value(rng));
      data.row_ids[i] = "p" + std::to_string(i);
    }
    KMeansConfig cfg;
    cfg.k = k;
    cfg.n_init = 50;
    cfg.seed = std::uint64_t(1000 + it);
    const ClusteringResult result = kmeans_fit(data, cfg);

    // Inertia recomputed from the returned assignment.
    std::map<std::int32_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[result.assignments[i]].push_back(i);
    double inertia = 0.0;
    for (const auto& [label, members] : groups) {
      double mean = 0.0;
      for (std::size_t i : members) mean += data.row(i)[0];
      mean /= double(members.size());
      for (std::size_t i : members) inertia += std::pow(double(data.row(i)[0]) - mean, 2);
    }
    const double optimum = oracles::exhaustive_kmeans_optimum(data, k);
    if (inertia <= optimum + 1e-9) ++optimal;
  }
  std::ostringstream detail;
  detail << optimal << "/100 instances reached the exhaustive optimum (threshold 95)";
  report(4, optimal >= 95, "k-means++ reaches the small-scale optimum", detail.str());
}

// ---------------------------------------------------------------- criterion 5

void criterion_5_separable_recovery() {
  const auto start = Clock::now();
  SyntheticSpec spec;
  spec.n_categories = 36;
  spec.zipf_exponent = 1.1;
  spec.n_tracks = 12000;
  spec.embedding_dims = 50;
  spec.cluster_spread = 1.0;
  spec.center_separation = 100.0;
  spec.seed = 5;
  const SyntheticCollection collection = generate_collection(spec);
  const EmbeddingMatrix tracks = summarize_tracks(collection.crop_embeddings);

  HdbscanConfig cfg;
  cfg.min_cluster_size = 30;
  const ClusteringResult result = hdbscan_fit(tracks, cfg);

  // Restrict the score to categories with at least 30 members.
  std::vector<std::size_t> eligible;
  for (std::size_t t = 0; t < spec.n_tracks; ++t)
    if (collection.truth.category_sizes[collection.truth.category[t]] >= 30) eligible.push_back(t);
  std::vector<std::int32_t> truth, pred;
  std::size_t eligible_noise = 0;
  for (std::size_t t : eligible) {
    if (result.assignments[t] < 0) {
      ++eligible_noise;
      continue;
    }
    truth.push_back(std::int32_t(collection.truth.category[t]));
    pred.push_back(result.assignments[t]);
  }
  const double score = ami(truth, pred);

  // Categories under the cutoff must end in noise or stay out of the
  // eligible clusters entirely.
  bool small_ok = true;
  for (std::size_t t = 0; t < spec.n_tracks; ++t) {
    if (collection.truth.category_sizes[collection.truth.category[t]] >= 30) continue;
    if (result.assignments[t] >= 0) small_ok = false;
  }

  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "AMI " << score << " over " << truth.size() << " tracks, " << eligible_noise
         << " eligible in noise, clusters " << result.n_clusters << ", " << elapsed << " s";
  report(5, score >= 0.99 && small_ok && elapsed < 60.0,
         "36-category separable collection recovered by HDBSCAN", detail.str());
}

// ---------------------------------------------------------------- criterion 6

LabeledEvalSet evalset_from_truth(const SyntheticCollection& collection,
                                  const ClusteringResult& result) {
  LabeledEvalSet s;
  for (std::size_t t = 0; t < collection.tracks.size(); ++t) {
    s.ids.push_back(collection.tracks[t].track.id);
    s.truth.push_back("cat" + std::to_string(collection.truth.category[t]));
    s.pred.push_back(result.assignments[t]);
    s.outlier_score.push_back(result.outlier_score[t]);
  }
  return s;
}

// Mirrors the documented exclusion rule to find which points leave at f.
std::vector<bool> excluded_at(const LabeledEvalSet& s, double f) {
  const std::size_t n = s.size();
  std::vector<std::size_t> priority(n);
  std::iota(priority.begin(), priority.end(), std::size_t(0));
  std::sort(priority.begin(), priority.end(), [&](std::size_t x, std::size_t y) {
    if (s.outlier_score[x] != s.outlier_score[y]) return s.outlier_score[x] > s.outlier_score[y];
    return s.ids[x] < s.ids[y];
  });
  const std::size_t m = std::size_t(std::ceil(f * double(n) - 1e-9));
  std::vector<bool> excluded(n, false);
  for (std::size_t i = 0; i < std::min(m, n); ++i) excluded[priority[i]] = true;
  std::size_t noise = 0;
  for (std::int32_t p : s.pred)
    if (p < 0) ++noise;
  if (noise > 0 && f >= double(noise) / double(n) - 1e-12)
    for (std::size_t i = 0; i < n; ++i)
      if (s.pred[i] < 0) excluded[i] = true;
  return excluded;
}

void criterion_6_outlier_curve() {
  SyntheticSpec spec;
  spec.n_categories = 36;
  spec.zipf_exponent = 1.1;
  spec.n_tracks = 8000;
  spec.embedding_dims = 50;
  spec.cluster_spread = 1.0;
  spec.center_separation = 100.0;
  spec.outlier_fraction = 0.1;
  // At the default box scale the outlier cloud carries ~50x the variance of
  // the category structure and oracle-k k-means provably spends its centers
  // there (captured outliers then sit at distance zero and can never be
  // ranked out). Scale 1.0 keeps outliers ~4x beyond every category center
  // while the distance ranking stays meaningful.
  spec.outlier_box_scale = 1.0;
  spec.seed = 6;
  const SyntheticCollection collection = generate_collection(spec);
  const EmbeddingMatrix tracks = summarize_tracks(collection.crop_embeddings);

  bool all_ok = true;
  std::ostringstream detail;
  for (const std::string algo : {"kmeans", "hdbscan"}) {
    ClusteringResult result;
    if (algo == "kmeans") {
      KMeansConfig cfg;
      cfg.k = 36;
      cfg.seed = 66;
      result = kmeans_fit(tracks, cfg);
    } else {
      HdbscanConfig cfg;
      cfg.min_cluster_size = 30;
      result = hdbscan_fit(tracks, cfg);
    }
    const LabeledEvalSet evalset = evalset_from_truth(collection, result);
    const EvaluationCurve curve = outlier_curve(evalset, {0.0, 0.1});

    double ami_0 = 0.0, ami_01 = 0.0;
    for (const CurvePoint& p : curve.points) {
      if (p.outlier_fraction == 0.0) ami_0 = p.ami;
      if (p.outlier_fraction == 0.1) ami_01 = p.ami;
    }

    const std::vector<bool> excluded = excluded_at(evalset, 0.1);
    std::size_t planted = 0, caught = 0;
    for (std::size_t t = 0; t < spec.n_tracks; ++t) {
      if (!collection.truth.outlier[t]) continue;
      ++planted;
      if (excluded[t]) ++caught;
    }
    const double recall = double(caught) / double(planted);
    const bool ok = ami_01 > ami_0 && recall >= 0.95;
    all_ok = all_ok && ok;
    detail << algo << ": ami 0->" << ami_0 << " 0.1->" << ami_01 << ", outlier recall " << recall
           << "; ";
  }
  report(6, all_ok, "excluding the outlier fraction lifts AMI and catches planted outliers",
         detail.str());
}

// ---------------------------------------------------------------- criterion 7

void criterion_7_pca_fidelity() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = 1200, dims = 1536, rank = 50;

  // Random rank-50 frame scaled per component, plus an offset.
  std::vector<std::vector<double>> basis(rank, std::vector<double>(dims));
  for (auto& row : basis)
    for (double& v : row) v = gauss(rng);
  EmbeddingMatrix data = EmbeddingMatrix::zeros(n, dims);
  for (std::size_t r = 0; r < n; ++r) {
    data.row_ids[r] = "r" + std::to_string(r);
    std::vector<double> point(dims, 0.0);
    for (std::size_t c = 0; c < rank; ++c) {
      const double coeff = gauss(rng) * (1.0 + double(rank - c) * 0.1);
      for (std::size_t d = 0; d < dims; ++d) point[d] += coeff * basis[c][d];
    }
    for (std::size_t d = 0; d < dims; ++d) data.row(r)[d] = float(point[d] + 0.25);
  }

  const PcaModel model = pca_fit(data, rank);
  const EmbeddingMatrix reduced = pca_transform(model, data);
  const EmbeddingMatrix restored = pca_inverse_transform(model, reduced);

  double mean_err = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double err = 0.0;
    for (std::size_t d = 0; d < dims; ++d)
      err += std::pow(double(restored.row(r)[d]) - double(data.row(r)[d]), 2);
    mean_err += std::sqrt(err);
  }
  mean_err /= double(n);

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  double worst_distortion = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    double d_full = 0.0, d_red = 0.0;
    for (std::size_t d = 0; d < dims; ++d)
      d_full += std::pow(double(data.row(a)[d]) - double(data.row(b)[d]), 2);
    for (std::size_t d = 0; d < rank; ++d)
      d_red += std::pow(double(reduced.row(a)[d]) - double(reduced.row(b)[d]), 2);
    d_full = std::sqrt(d_full);
    d_red = std::sqrt(d_red);
    if (d_full > 0.0) worst_distortion = std::max(worst_distortion, std::abs(d_red - d_full) / d_full);
  }

  std::ostringstream detail;
  detail << "mean reconstruction error " << mean_err << ", max pairwise distortion "
         << worst_distortion * 100.0 << "%";
  report(7, mean_err < 1e-4 && worst_distortion < 0.01,
         "PCA recovers a 50-dim subspace of 1536-dim space", detail.str());
}

// ---------------------------------------------------------------- criterion 8

EmbeddingMatrix performance_blobs(std::size_t n, std::size_t dims, std::size_t categories) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::normal_distribution<double> dir(0.0, 1.0);
  // Zipf-sized blobs on a sphere of radius 100, like the mined collections.
  const std::vector<std::size_t> sizes = zipf_allocation(categories, 1.1, n);
  std::vector<std::vector<double>> centers;
  while (centers.size() < categories) {
    std::vector<double> c(dims);
    double norm = 0.0;
    for (double& v : c) {
      v = dir(rng);
      norm += v * v;
    }
    const double scale = 100.0 / std::sqrt(norm);
    for (double& v : c) v *= scale;
    bool ok = true;
    for (const auto& other : centers) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < dims; ++d) d2 += std::pow(c[d] - other[d], 2);
      if (d2 < 100.0) ok = false;
    }
    if (ok) centers.push_back(std::move(c));
  }
  EmbeddingMatrix data = EmbeddingMatrix::zeros(n, dims);
  std::size_t row = 0;
  for (std::size_t b = 0; b < categories; ++b)
    for (std::size_t i = 0; i < sizes[b] && row < n; ++i, ++row) {
      data.row_ids[row] = "p" + std::to_string(row);
      for (std::size_t d = 0; d < dims; ++d)
        data.row(row)[d] = float(centers[b][d] + jitter(rng));
    }
  return data;
}

void criterion_8_scale() {
  const EmbeddingMatrix data = performance_blobs(100000, 50, 36);

  auto start = Clock::now();
  HdbscanConfig hcfg;
  hcfg.min_cluster_size = 30;
  const ClusteringResult hdbscan_result = hdbscan_fit(data, hcfg);
  const double hdbscan_s = seconds_since(start);

  start = Clock::now();
  KMeansConfig kcfg;
  kcfg.k = 36;
  kcfg.seed = 88;
  const ClusteringResult kmeans_result = kmeans_fit(data, kcfg);
  const double kmeans_s = seconds_since(start);

  const double rss = peak_rss_gb();
  std::ostringstream detail;
  detail << "hdbscan " << hdbscan_s << " s (" << hdbscan_result.n_clusters << " clusters, "
         << hdbscan_result.algorithm_meta.at("mst_strategy") << "), kmeans " << kmeans_s
         << " s (" << kmeans_result.n_clusters << " clusters), peak rss " << rss << " GB";
  report(8, hdbscan_s < 600.0 && kmeans_s < 60.0 && rss < 8.0,
         "100k x 50 clustering inside the time and memory budget", detail.str());
}

// ---------------------------------------------------------------- criterion 9

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

void criterion_9_determinism() {
  const char* bin = std::getenv("TRACKMINE_BIN");
  if (!bin) {
    report(9, false, "CLI determinism", "TRACKMINE_BIN not set");
    return;
  }
  const fs::path base =
      fs::temp_directory_path() / ("trackmine_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(base);
  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(bin) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };

  bool ok = true;
  for (const char* sub : {"a", "b"}) {
    const fs::path dir = base / sub;
    ok = ok && run("simulate --out " + dir.string() +
                   " --seed 99 --categories 8 --zipf 1.1 --tracks 600 --dims 16"
                   " --spread 1 --separation 100 --outlier-frac 0.05 --fragmentation 0.3") == 0;
    ok = ok && run("merge --tracklets " + (dir / "tracklets.jsonl").string() + " --timeline " +
                   (dir / "timeline.jsonl").string() + " --out " + (dir / "merged.jsonl").string()) == 0;
    ok = ok && run("summarize --embeddings " + (dir / "crop_embeddings.emb").string() + " --out " +
                   (dir / "tracks.emb").string()) == 0;
    ok = ok && run("reduce --embeddings " + (dir / "tracks.emb").string() + " --out " +
                   (dir / "reduced.emb").string() + " --dims 8") == 0;
    ok = ok && run("cluster --embeddings " + (dir / "reduced.emb").string() +
                   " --algo hdbscan --min-cluster-size 10 --seed 5 --out " +
                   (dir / "hdbscan.csv").string()) == 0;
    ok = ok && run("cluster --embeddings " + (dir / "reduced.emb").string() +
                   " --algo kmeans --k 8 --seed 5 --out " + (dir / "kmeans.csv").string()) == 0;
    ok = ok && run("evaluate --clusters " + (dir / "hdbscan.csv").string() + " --annotations " +
                   (dir / "annotations.csv").string() +
                   " --min-instances 10 --fractions 0:0.3:0.05 --out " +
                   (dir / "curve.csv").string()) == 0;
  }

  std::size_t differing = 0;
  const std::vector<std::string> artifacts = {
      "tracks.jsonl", "annotations.csv", "crop_embeddings.emb", "truth.json",
      "tracklets.jsonl", "timeline.jsonl", "merged.jsonl", "tracks.emb",
      "reduced.emb", "hdbscan.csv", "kmeans.csv", "curve.csv"};
  for (const std::string& name : artifacts)
    if (slurp(base / "a" / name) != slurp(base / "b" / name)) ++differing;

  fs::remove_all(base);
  std::ostringstream detail;
  detail << artifacts.size() << " artifacts compared, " << differing << " differ";
  report(9, ok && differing == 0, "reruns with identical seeds are byte-identical", detail.str());
}

// --------------------------------------------------------------- criterion 10

void criterion_10_released_data() {
  const char* env = std::getenv("TRACKMINE_KTC_DIR");
  fs::path dir = env ? fs::path(env) : fs::path("data/ktc");
  if (!fs::exists(dir / "tracks.jsonl") && !fs::exists(dir / "annotations.csv")) {
    report_skip(10, "released-collection statistics",
                "released data not present; set TRACKMINE_KTC_DIR to enable");
    return;
  }
  const io::IngestReport report_data = io::ingest_validate(dir);
  const bool totals_ok = report_data.total_tracks == 8005 && report_data.error_tracks == 745;
  const double rate = double(report_data.error_tracks) /
                      double(std::max<std::size_t>(report_data.labeled_tracks, 1));
  const bool rate_ok = std::abs(rate - 0.093) < 0.001;

  bool heads_ok = true;
  const std::vector<io::AnnotationRow> annotations =
      io::read_annotations_csv(dir / "annotations.csv", io::ParseMode::Lenient, nullptr);
  std::vector<AnnotatedTrack> tracks;
  for (const io::AnnotationRow& row : annotations) {
    AnnotatedTrack t;
    t.annotation = row.annotation;
    t.category = row.category;
    tracks.push_back(std::move(t));
  }
  const CategoryDistribution dist = distribution_report(tracks, 30);
  const std::vector<std::pair<std::string, std::size_t>> expected_heads = {
      {"car", 2405}, {"greenery", 1124}, {"window", 370}, {"person", 272}};
  for (std::size_t i = 0; i < expected_heads.size(); ++i) {
    if (i >= dist.counts.size() || dist.counts[i] != expected_heads[i]) heads_ok = false;
  }

  std::ostringstream detail;
  detail << "total " << report_data.total_tracks << ", errors " << report_data.error_tracks
         << " (" << rate * 100.0 << "%)";
  report(10, totals_ok && rate_ok && heads_ok, "released-collection statistics reproduced",
         detail.str());
}

}  // namespace

int main() {
  std::cout << "trackmine acceptance suite" << std::endl;
  criterion_1_merge_oracle();
  criterion_2_ami_exactness();
  criterion_3_hierarchy_oracle();
  criterion_4_kmeans_optimality();
  criterion_5_separable_recovery();
  criterion_6_outlier_curve();
  criterion_7_pca_fidelity();
  criterion_8_scale();
  criterion_9_determinism();
  criterion_10_released_data();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
