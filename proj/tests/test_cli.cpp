#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "trackmine/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* bin = std::getenv("TRACKMINE_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "TRACKMINE_BIN must point at the trackmine binary");
  return bin;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("trackmine_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::string dir_arg(const fs::path& p) { return "'" + p.string() + "'"; }

void simulate_small(const fs::path& dir, int seed = 7) {
  const int code = run("simulate --out " + dir_arg(dir) + " --seed " + std::to_string(seed) +
                       " --categories 5 --zipf 1.1 --tracks 250 --dims 12 --spread 1" +
                       " --separation 100 --outlier-frac 0.1 --fragmentation 0.3");
  REQUIRE(code == 0);
}

}  // namespace

TEST_CASE("cli: full pipeline runs and produces the documented artifacts") {
  TempDir t;
  const fs::path dir = t.path;
  simulate_small(dir);

  CHECK(run("merge --tracklets " + dir_arg(dir / "tracklets.jsonl") + " --timeline " +
            dir_arg(dir / "timeline.jsonl") + " --out " + dir_arg(dir / "merged.jsonl")) == 0);
  const std::vector<trackmine::io::TrackRecord> merged =
      trackmine::io::read_tracks_jsonl(dir / "merged.jsonl");
  CHECK(merged.size() == 250);  // junction lambda 0.6 >= default threshold

  CHECK(run("summarize --embeddings " + dir_arg(dir / "crop_embeddings.emb") + " --out " +
            dir_arg(dir / "tracks.emb")) == 0);
  CHECK(run("reduce --embeddings " + dir_arg(dir / "tracks.emb") + " --out " +
            dir_arg(dir / "reduced.emb") + " --dims 6 --model-out " + dir_arg(dir / "pca.json")) ==
        0);
  CHECK(run("cluster --embeddings " + dir_arg(dir / "reduced.emb") +
            " --algo hdbscan --min-cluster-size 10 --out " + dir_arg(dir / "hdbscan.csv")) == 0);
  CHECK(run("cluster --embeddings " + dir_arg(dir / "reduced.emb") +
            " --algo kmeans --k 5 --seed 3 --out " + dir_arg(dir / "kmeans.csv")) == 0);
  CHECK(run("evaluate --clusters " + dir_arg(dir / "hdbscan.csv") + " --annotations " +
            dir_arg(dir / "annotations.csv") + " --min-instances 10 --fractions 0:0.3:0.1" +
            " --out " + dir_arg(dir / "curve.csv")) == 0);
  CHECK(run("report --annotations " + dir_arg(dir / "annotations.csv") + " --clusters " +
            dir_arg(dir / "hdbscan.csv") + " --min-cluster-display 10 --out " +
            dir_arg(dir / "report.txt")) == 0);
  CHECK(run("ingest --dir " + dir_arg(dir) + " > " + dir_arg(dir / "ingest.txt")) == 0);

  const std::string curve = slurp(dir / "curve.csv");
  CHECK(curve.rfind("fraction,ami,n,distinguished\n", 0) == 0);
  CHECK(slurp(dir / "report.txt").find("tracks total") != std::string::npos);
  CHECK(slurp(dir / "ingest.txt").find("tracks (total):    250") != std::string::npos);
}

TEST_CASE("cli: identical seeds give byte-identical artifacts") {
  TempDir a, b;
  simulate_small(a.path, 42);
  simulate_small(b.path, 42);
  for (const char* name :
       {"tracks.jsonl", "annotations.csv", "crop_embeddings.emb", "truth.json",
        "tracklets.jsonl", "timeline.jsonl"}) {
    CHECK_MESSAGE(slurp(a.path / name) == slurp(b.path / name), name);
  }

  for (const fs::path& dir : {a.path, b.path}) {
    REQUIRE(run("summarize --embeddings " + dir_arg(dir / "crop_embeddings.emb") + " --out " +
                dir_arg(dir / "tracks.emb")) == 0);
    REQUIRE(run("cluster --embeddings " + dir_arg(dir / "tracks.emb") +
                " --algo kmeans --k 5 --seed 11 --out " + dir_arg(dir / "kmeans.csv")) == 0);
  }
  CHECK(slurp(a.path / "kmeans.csv") == slurp(b.path / "kmeans.csv"));

  TempDir c;
  simulate_small(c.path, 43);
  CHECK(slurp(a.path / "crop_embeddings.emb") != slurp(c.path / "crop_embeddings.emb"));
}

TEST_CASE("cli: exit codes distinguish usage and data errors") {
  TempDir t;
  CHECK(run("cluster --embeddings nowhere.emb") == 1);         // missing required --out
  CHECK(run("frobnicate") == 1);                               // unknown subcommand
  CHECK(run("cluster --embeddings nowhere.emb --out x.csv") == 2);  // unreadable file

  const fs::path bad = t.path / "bad.emb";
  std::ofstream(bad) << "not an embedding file";
  CHECK(run("cluster --embeddings " + dir_arg(bad) + " --out " + dir_arg(t.path / "x.csv")) == 2);

  const fs::path csv = t.path / "bad.csv";
  std::ofstream(csv) << "row_id,label,outlier_score\nx,notanint,0.5\n";
  CHECK(run("evaluate --clusters " + dir_arg(csv) + " --annotations " + dir_arg(csv)) == 2);

  // kmeans without --k is a usage error.
  simulate_small(t.path);
  REQUIRE(run("summarize --embeddings " + dir_arg(t.path / "crop_embeddings.emb") + " --out " +
              dir_arg(t.path / "tracks.emb")) == 0);
  CHECK(run("cluster --embeddings " + dir_arg(t.path / "tracks.emb") +
            " --algo kmeans --out " + dir_arg(t.path / "k.csv")) == 1);
}

TEST_CASE("cli: config file supplies defaults, flags win") {
  TempDir t;
  simulate_small(t.path);
  REQUIRE(run("summarize --embeddings " + dir_arg(t.path / "crop_embeddings.emb") + " --out " +
              dir_arg(t.path / "tracks.emb")) == 0);

  const fs::path config = t.path / "trackmine.toml";
  {
    std::ofstream out(config);
    out << "[cluster]\n";
    out << "algo = \"kmeans\"\n";
    out << "k = 5\n";
    out << "seed = 9\n";
  }
  CHECK(run("--config " + dir_arg(config) + " cluster --embeddings " +
            dir_arg(t.path / "tracks.emb") + " --out " + dir_arg(t.path / "from_config.csv")) == 0);
  const std::vector<trackmine::io::ClusterFileRow> rows =
      trackmine::io::read_clusters_csv(t.path / "from_config.csv");
  std::set<std::int32_t> labels;
  for (const auto& row : rows) labels.insert(row.label);
  CHECK(labels.size() == 5);  // k came from the config file

  // The command line overrides the config value.
  CHECK(run("--config " + dir_arg(config) + " cluster --embeddings " +
            dir_arg(t.path / "tracks.emb") + " --k 3 --out " +
            dir_arg(t.path / "flag_wins.csv")) == 0);
  const std::vector<trackmine::io::ClusterFileRow> flag_rows =
      trackmine::io::read_clusters_csv(t.path / "flag_wins.csv");
  std::set<std::int32_t> flag_labels;
  for (const auto& row : flag_rows) flag_labels.insert(row.label);
  CHECK(flag_labels.size() == 3);
}

TEST_CASE("cli: evaluate logs exclusions and writes the distinguished point") {
  TempDir t;
  simulate_small(t.path, 19);
  REQUIRE(run("summarize --embeddings " + dir_arg(t.path / "crop_embeddings.emb") + " --out " +
              dir_arg(t.path / "tracks.emb")) == 0);
  REQUIRE(run("cluster --embeddings " + dir_arg(t.path / "tracks.emb") +
              " --algo hdbscan --min-cluster-size 10 --out " + dir_arg(t.path / "clusters.csv")) ==
          0);
  REQUIRE(run("evaluate --clusters " + dir_arg(t.path / "clusters.csv") + " --annotations " +
              dir_arg(t.path / "annotations.csv") + " --min-instances 10" +
              " --fractions 0:0.4:0.1 --out " + dir_arg(t.path / "curve.csv")) == 0);
  const trackmine::EvaluationCurve curve = trackmine::io::read_curve_csv(t.path / "curve.csv");
  CHECK(curve.points.size() >= 5);
  // 10% planted outliers: the native noise fraction must appear and carry
  // a better AMI than the unfiltered point.
  REQUIRE(curve.distinguished_point.has_value());
  const trackmine::CurvePoint& d = curve.points[*curve.distinguished_point];
  CHECK(d.outlier_fraction > 0.0);
  CHECK(d.ami >= curve.points[0].ami);
}
