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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "trackmine/clustering.hpp"
#include "trackmine/embedding.hpp"
#include "trackmine/evaluation.hpp"
#include "trackmine/io.hpp"
#include "trackmine/synthetic.hpp"
#include "trackmine/track_merge.hpp"

namespace {

namespace fs = std::filesystem;
using namespace trackmine;

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("TRACKMINE_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "debug") return 0;
    if (v == "info") return 1;
    if (v == "warn") return 2;
    return 3;  // error / quiet
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() <= 1) std::cerr << "[trackmine] " << msg << "\n";
}

// Fractions come either as "start:stop:step" or a comma list.
std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double start = 0.0, stop = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
      throw CLI::ValidationError("--fractions", "expected start:stop:step");
    for (std::size_t i = 0;; ++i) {
      // Snap accumulated fractions so 0.05 * 3 prints as 0.15.
      const double f = std::round((start + double(i) * step) * 1e12) / 1e12;
      if (f > stop + 1e-12) break;
      out.push_back(std::min(f, 1.0));
    }
    return out;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::strtod(item.c_str(), nullptr));
  }
  if (out.empty()) throw CLI::ValidationError("--fractions", "no fractions given");
  return out;
}

std::set<std::string> read_category_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io::DataError(path.string() + ": cannot open for reading");
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.insert(line);
  return out;
}

struct MergeArgs {
  std::string tracklets, timeline, out;
  double gamma = 0.5;
  double lambda_min = 0.5;
  std::uint64_t proposals_per_frame = 0;
};

int run_merge(const MergeArgs& args) {
  TrackletStore store(io::read_tracklets_jsonl(args.tracklets));
  const SelectionTimeline timeline = io::read_timeline_jsonl(args.timeline);
  MergeConfig cfg;
  cfg.gamma = args.gamma;
  cfg.lambda_min = args.lambda_min;
  const std::vector<Track> tracks = merge_tracklets(store, timeline, cfg);
  io::write_tracks_jsonl(args.out, tracks);
  log_info("merged " + std::to_string(store.size()) + " tracklets into " +
           std::to_string(tracks.size()) + " tracks");
  if (args.proposals_per_frame > 0) {
    const std::size_t frames = timeline.selected.size();
    const CompressionStats stats =
        compression_report(store.size(), tracks.size(), args.proposals_per_frame, frames);
    std::cerr << stats.to_text();
  }
  return 0;
}

struct SummarizeArgs {
  std::string embeddings, out;
  std::string mode = "closest-to-mean";
};

int run_summarize(const SummarizeArgs& args) {
  const EmbeddingMatrix crops = io::read_embeddings(args.embeddings);
  const SummaryMode mode =
      args.mode == "mean" ? SummaryMode::Mean : SummaryMode::ClosestToMean;
  const EmbeddingMatrix tracks = summarize_tracks(crops, mode);
  io::write_embeddings(args.out, tracks);
  log_info("summarized " + std::to_string(crops.rows) + " crops into " +
           std::to_string(tracks.rows) + " track embeddings");
  return 0;
}

struct ReduceArgs {
  std::string embeddings, out, model_in, model_out;
  std::size_t dims = 50;
};

int run_reduce(const ReduceArgs& args) {
  const EmbeddingMatrix input = io::read_embeddings(args.embeddings);
  PcaModel model;
  if (!args.model_in.empty()) {
    model = io::read_pca_model(args.model_in);
  } else {
    model = pca_fit(input, args.dims);
  }
  const EmbeddingMatrix reduced = pca_transform(model, input);
  io::write_embeddings(args.out, reduced);
  if (!args.model_out.empty()) io::write_pca_model(args.model_out, model);
  log_info("reduced " + std::to_string(input.dims) + " dims to " + std::to_string(model.k));
  return 0;
}

struct ClusterArgs {
  std::string embeddings, out;
  std::string algo = "hdbscan";
  std::size_t k = 0;
  std::size_t min_cluster_size = 30;
  std::size_t min_samples = 0;
  std::uint64_t seed = 0;
  std::size_t n_init = 10;
  std::size_t max_iters = 300;
  double tol = 1e-6;
  std::string mst = "auto";
  std::size_t threads = 0;
  std::size_t block_size = 0;
};

int run_cluster(const ClusterArgs& args) {
  const EmbeddingMatrix data = io::read_embeddings(args.embeddings);
  EngineOptions engine;
  engine.threads = args.threads;
  engine.block_size = args.block_size;

  ClusteringResult result;
  if (args.algo == "kmeans") {
    if (args.k == 0) throw CLI::ValidationError("--k", "kmeans requires --k");
    KMeansConfig cfg;
    cfg.k = args.k;
    cfg.n_init = args.n_init;
    cfg.max_iters = args.max_iters;
    cfg.tol = args.tol;
    cfg.seed = args.seed;
    cfg.engine = engine;
    result = kmeans_fit(data, cfg);
  } else if (args.algo == "hdbscan") {
    HdbscanConfig cfg;
    cfg.min_cluster_size = args.min_cluster_size;
    cfg.min_samples = args.min_samples;
    cfg.seed = args.seed;
    cfg.engine = engine;
    if (args.mst == "prim")
      cfg.mst = MstStrategy::Prim;
    else if (args.mst == "boruvka")
      cfg.mst = MstStrategy::Boruvka;
    result = hdbscan_fit(data, cfg);
  } else {
    throw CLI::ValidationError("--algo", "expected kmeans or hdbscan");
  }

  io::write_clusters_csv(args.out, data.row_ids, result);
  std::string meta;
  for (const auto& [key, value] : result.algorithm_meta) meta += " " + key + "=" + value;
  log_info("clustered " + std::to_string(data.rows) + " rows:" + meta);
  return 0;
}

struct EvaluateArgs {
  std::string clusters, annotations, out;
  std::size_t min_instances = 30;
  std::string fractions = "0:0.5:0.05";
  std::string norm = "mean";
};

int run_evaluate(const EvaluateArgs& args) {
  const std::vector<io::ClusterFileRow> clusters = io::read_clusters_csv(args.clusters);
  const std::vector<io::AnnotationRow> annotations = io::read_annotations_csv(args.annotations);

  EvalFilterResult filter;
  std::size_t unannotated = 0;
  const LabeledEvalSet evalset =
      io::build_evalset(clusters, annotations, args.min_instances, &filter, &unannotated);
  log_info("excluded: " + std::to_string(unannotated) + " unannotated, " +
           std::to_string(filter.excluded_unknown) + " unknown, " +
           std::to_string(filter.excluded_error) + " tracking errors, " +
           std::to_string(filter.excluded_rare) + " in categories below " +
           std::to_string(args.min_instances) + " instances; evaluating " +
           std::to_string(filter.retained));
  if (evalset.size() == 0) throw io::DataError("evaluate: no tracks left after filtering");

  const AmiNormalization norm =
      args.norm == "max" ? AmiNormalization::MaxEntropy : AmiNormalization::MeanEntropy;
  const EvaluationCurve curve = outlier_curve(evalset, parse_fractions(args.fractions), norm);
  if (args.out.empty())
    io::write_curve_csv(std::cout, curve);
  else
    io::write_curve_csv(fs::path(args.out), curve);
  return 0;
}

struct SimulateArgs {
  std::string out;
  SyntheticSpec spec;
  double fragmentation = 0.3;
  double junction_lambda = 0.6;
};

int run_simulate(const SimulateArgs& args) {
  fs::create_directories(args.out);
  const fs::path dir(args.out);

  const SyntheticCollection collection = generate_collection(args.spec);
  std::vector<Track> tracks;
  std::vector<io::AnnotationRow> annotations;
  io::TruthSidecar truth;
  tracks.reserve(collection.tracks.size());
  for (std::size_t i = 0; i < collection.tracks.size(); ++i) {
    const AnnotatedTrack& t = collection.tracks[i];
    tracks.push_back(t.track);
    io::AnnotationRow row;
    row.track_id = t.track.id;
    row.annotation = t.annotation;
    row.category = t.category;
    annotations.push_back(std::move(row));
    truth.track_ids.push_back(t.track.id);
  }
  truth.category = collection.truth.category;
  truth.outlier = collection.truth.outlier;
  truth.error = collection.truth.error;
  truth.n_categories = args.spec.n_categories;

  io::write_tracks_jsonl(dir / "tracks.jsonl", tracks);
  io::write_annotations_csv(dir / "annotations.csv", annotations);
  io::write_embeddings(dir / "crop_embeddings.emb", collection.crop_embeddings);
  io::write_truth_json(dir / "truth.json", truth);

  const SyntheticStream stream =
      generate_tracklet_stream(args.spec, args.fragmentation, args.junction_lambda);
  io::write_tracklets_jsonl(dir / "tracklets.jsonl", stream.tracklets);
  io::write_timeline_jsonl(dir / "timeline.jsonl", stream.timeline);

  log_info("wrote synthetic collection (" + std::to_string(tracks.size()) + " tracks, " +
           std::to_string(collection.crop_embeddings.rows) + " crops, " +
           std::to_string(stream.tracklets.size()) + " tracklets) to " + args.out);
  return 0;
}

struct ReportArgs {
  std::string clusters, annotations, known, out;
  std::size_t min_cluster_display = 80;
  std::size_t cutoff = 30;
  std::string format = "text";
};

int run_report(const ReportArgs& args) {
  const std::vector<io::AnnotationRow> annotations = io::read_annotations_csv(args.annotations);
  std::vector<AnnotatedTrack> tracks;
  tracks.reserve(annotations.size());
  for (const io::AnnotationRow& row : annotations) {
    AnnotatedTrack t;
    t.track.id = row.track_id;
    t.annotation = row.annotation;
    t.category = row.category;
    tracks.push_back(std::move(t));
  }
  const CategoryDistribution dist = distribution_report(tracks, args.cutoff);

  ClusterSummary summary;
  bool have_clusters = false;
  if (!args.clusters.empty()) {
    have_clusters = true;
    const std::vector<io::ClusterFileRow> clusters = io::read_clusters_csv(args.clusters);
    std::map<std::string, const io::AnnotationRow*> by_id;
    for (const io::AnnotationRow& row : annotations) by_id.emplace(row.track_id, &row);
    LabeledEvalSet evalset;
    std::vector<std::int32_t> assignments;
    for (const io::ClusterFileRow& row : clusters) {
      auto it = by_id.find(row.row_id);
      if (it == by_id.end() || it->second->annotation != Annotation::Category) continue;
      evalset.ids.push_back(row.row_id);
      evalset.truth.push_back(it->second->category);
      evalset.pred.push_back(row.label);
      evalset.outlier_score.push_back(row.outlier_score);
      assignments.push_back(row.label);
    }
    const std::set<std::string> known =
        args.known.empty() ? std::set<std::string>{} : read_category_list(args.known);
    summary = cluster_report(assignments, evalset, args.min_cluster_display, known);
  }

  std::ostringstream text;
  if (args.format == "json") {
    nlohmann::json j;
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& [category, count] : dist.counts)
      counts.push_back({{"category", category}, {"count", count}});
    j["distribution"] = {{"counts", std::move(counts)},
                         {"cutoff", dist.cutoff},
                         {"categories_below_cutoff", dist.categories_below_cutoff},
                         {"total_tracks", dist.total_tracks},
                         {"labeled_tracks", dist.labeled_tracks},
                         {"unknown_tracks", dist.unknown_tracks},
                         {"error_tracks", dist.error_tracks},
                         {"error_rate", dist.error_rate}};
    if (have_clusters) {
      nlohmann::json rows = nlohmann::json::array();
      for (const ClusterRow& row : summary.clusters)
        rows.push_back({{"label", row.label},
                        {"size", row.size},
                        {"dominant_category", row.dominant_category},
                        {"purity", row.purity},
                        {"novel", row.novel}});
      j["clusters"] = {{"rows", std::move(rows)},
                       {"total_clusters", summary.total_clusters},
                       {"noise_points", summary.noise_points},
                       {"min_cluster_display", summary.min_cluster_display}};
    }
    text << j.dump(2) << "\n";
  } else {
    text << dist.to_text();
    if (have_clusters) text << "\n" << summary.to_text();
  }

  if (args.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(args.out);
    if (!out) throw io::DataError(args.out + ": cannot open for writing");
    out << text.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"object discovery from mined tracks: merge, embed, cluster, evaluate"};
  app.require_subcommand(1);
  app.set_config("--config")->description("TOML config file; command-line flags win");

  MergeArgs merge_args;
  CLI::App* merge = app.add_subcommand("merge", "merge tracklets into tracks");
  merge->add_option("--tracklets", merge_args.tracklets, "tracklets JSONL")->required();
  merge->add_option("--timeline", merge_args.timeline, "per-frame selection JSONL")->required();
  merge->add_option("--out", merge_args.out, "output tracks JSONL")->required();
  merge->add_option("--gamma", merge_args.gamma, "per-frame mask IoU match threshold");
  merge->add_option("--lambda-min", merge_args.lambda_min, "minimum overlap ratio to continue");
  merge->add_option("--proposals-per-frame", merge_args.proposals_per_frame,
                    "when set, print the compression report");

  SummarizeArgs summarize_args;
  CLI::App* summarize = app.add_subcommand("summarize", "crop embeddings to track embeddings");
  summarize->add_option("--embeddings", summarize_args.embeddings, "crop embeddings (.emb)")
      ->required();
  summarize->add_option("--out", summarize_args.out, "output track embeddings (.emb)")->required();
  summarize->add_option("--mode", summarize_args.mode, "closest-to-mean|mean")
      ->check(CLI::IsMember({"closest-to-mean", "mean"}));

  ReduceArgs reduce_args;
  CLI::App* reduce = app.add_subcommand("reduce", "PCA dimensionality reduction");
  reduce->add_option("--embeddings", reduce_args.embeddings, "input embeddings (.emb)")->required();
  reduce->add_option("--out", reduce_args.out, "output embeddings (.emb)")->required();
  reduce->add_option("--dims", reduce_args.dims, "components to keep");
  reduce->add_option("--model-in", reduce_args.model_in, "apply an existing PCA model (JSON)");
  reduce->add_option("--model-out", reduce_args.model_out, "save the fitted PCA model (JSON)");

  ClusterArgs cluster_args;
  CLI::App* cluster = app.add_subcommand("cluster", "cluster track embeddings");
  cluster->add_option("--embeddings", cluster_args.embeddings, "track embeddings (.emb)")
      ->required();
  cluster->add_option("--out", cluster_args.out, "output clusters CSV")->required();
  cluster->add_option("--algo", cluster_args.algo, "kmeans|hdbscan")
      ->check(CLI::IsMember({"kmeans", "hdbscan"}));
  cluster->add_option("--k", cluster_args.k, "number of clusters (kmeans)");
  cluster->add_option("--min-cluster-size", cluster_args.min_cluster_size, "hdbscan cluster floor");
  cluster->add_option("--min-samples", cluster_args.min_samples,
                      "core-distance neighbor count (0 = min-cluster-size)");
  cluster->add_option("--seed", cluster_args.seed, "RNG seed");
  cluster->add_option("--n-init", cluster_args.n_init, "kmeans restarts");
  cluster->add_option("--max-iters", cluster_args.max_iters, "kmeans iteration cap");
  cluster->add_option("--tol", cluster_args.tol, "kmeans relative inertia tolerance");
  cluster->add_option("--mst", cluster_args.mst, "auto|prim|boruvka")
      ->check(CLI::IsMember({"auto", "prim", "boruvka"}));
  cluster->add_option("--threads", cluster_args.threads, "worker threads (0 = hardware)");
  cluster->add_option("--block-size", cluster_args.block_size, "engine block size (0 = default)");

  EvaluateArgs evaluate_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "AMI outlier-fraction curve");
  evaluate->add_option("--clusters", evaluate_args.clusters, "clusters CSV")->required();
  evaluate->add_option("--annotations", evaluate_args.annotations, "annotations CSV")->required();
  evaluate->add_option("--out", evaluate_args.out, "curve CSV (default stdout)");
  evaluate->add_option("--min-instances", evaluate_args.min_instances,
                       "category floor for evaluation");
  evaluate->add_option("--fractions", evaluate_args.fractions, "start:stop:step or comma list");
  evaluate->add_option("--norm", evaluate_args.norm, "mean|max entropy normalization")
      ->check(CLI::IsMember({"mean", "max"}));

  SimulateArgs simulate_args;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic collection");
  simulate->add_option("--out", simulate_args.out, "output directory")->required();
  simulate->add_option("--seed", simulate_args.spec.seed, "RNG seed");
  simulate->add_option("--categories", simulate_args.spec.n_categories, "category count");
  simulate->add_option("--zipf", simulate_args.spec.zipf_exponent, "Zipf exponent");
  simulate->add_option("--tracks", simulate_args.spec.n_tracks, "track count");
  simulate->add_option("--dims", simulate_args.spec.embedding_dims, "embedding dimensionality");
  simulate->add_option("--spread", simulate_args.spec.cluster_spread, "per-category jitter sigma");
  simulate->add_option("--separation", simulate_args.spec.center_separation,
                       "minimum center separation");
  simulate->add_option("--outlier-frac", simulate_args.spec.outlier_fraction,
                       "fraction of far-outlier tracks");
  simulate->add_option("--outlier-box-scale", simulate_args.spec.outlier_box_scale,
                       "outlier box half-width as a multiple of the center radius");
  simulate->add_option("--error-frac", simulate_args.spec.tracking_error_fraction,
                       "fraction of tracking-error tracks");
  simulate->add_option("--fragmentation", simulate_args.fragmentation,
                       "per-frame tracklet cut probability");
  simulate->add_option("--junction-lambda", simulate_args.junction_lambda,
                       "target overlap ratio at junctions");

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "distribution and cluster summaries");
  report->add_option("--annotations", report_args.annotations, "annotations CSV")->required();
  report->add_option("--clusters", report_args.clusters, "clusters CSV (optional)");
  report->add_option("--known", report_args.known, "file of known category names, one per line");
  report->add_option("--min-cluster-display", report_args.min_cluster_display,
                     "list clusters of at least this size");
  report->add_option("--cutoff", report_args.cutoff, "rare-category cutoff");
  report->add_option("--format", report_args.format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  report->add_option("--out", report_args.out, "output path (default stdout)");

  std::string ingest_dir;
  CLI::App* ingest = app.add_subcommand("ingest", "validate a dataset directory");
  ingest->add_option("--dir", ingest_dir, "dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1
  }

  try {
    if (merge->parsed()) return run_merge(merge_args);
    if (summarize->parsed()) return run_summarize(summarize_args);
    if (reduce->parsed()) return run_reduce(reduce_args);
    if (cluster->parsed()) return run_cluster(cluster_args);
    if (evaluate->parsed()) return run_evaluate(evaluate_args);
    if (simulate->parsed()) return run_simulate(simulate_args);
    if (report->parsed()) return run_report(report_args);
    if (ingest->parsed()) {
      std::cout << io::ingest_validate(ingest_dir).to_text();
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const io::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
