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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trackmine/clustering.hpp"
#include "trackmine/embedding.hpp"
#include "trackmine/evaluation.hpp"
#include "trackmine/track_merge.hpp"
#include "trackmine/types.hpp"

namespace trackmine::io {

/// Raised on malformed input; what() names the file plus the offending
/// line or byte offset.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseMode : std::uint8_t {
  Strict,   // abort at the first malformed line
  Lenient,  // skip malformed lines, collect diagnostics
};

struct ParseDiagnostics {
  std::vector<std::string> errors;  // one entry per skipped line
};

// --- tracks: JSON lines, one object per line ------------------------------
// {"id": ..., "label": <name or null>, "tracklet_ids": [...],
//  "observations": [{"frame": n, "geometry": {"box": [x,y,w,h]}
//                                          | {"rle": {"w":..,"h":..,"runs":[..]}},
//                    "score": s?}, ...], "junction_overlaps": [...] }
// Unknown fields are preserved verbatim and written back on rewrite.

struct TrackRecord {
  Track track;
  std::string extra_json;  // unrecognized fields, "" when none
};

std::vector<TrackRecord> read_tracks_jsonl(const std::filesystem::path& path,
                                           ParseMode mode = ParseMode::Strict,
                                           ParseDiagnostics* diag = nullptr);
void write_tracks_jsonl(const std::filesystem::path& path, const std::vector<TrackRecord>& tracks);
void write_tracks_jsonl(const std::filesystem::path& path, const std::vector<Track>& tracks);

// --- tracklets + timeline: JSON lines --------------------------------------
// tracklet: {"id":..., "label": <name>?, "confidence": c?, "observations":[...]}
// timeline: {"frame": n, "selected": ["id", ...]}

std::vector<Tracklet> read_tracklets_jsonl(const std::filesystem::path& path,
                                           ParseMode mode = ParseMode::Strict,
                                           ParseDiagnostics* diag = nullptr);
void write_tracklets_jsonl(const std::filesystem::path& path, const std::vector<Tracklet>& tracklets);

SelectionTimeline read_timeline_jsonl(const std::filesystem::path& path,
                                      ParseMode mode = ParseMode::Strict,
                                      ParseDiagnostics* diag = nullptr);
void write_timeline_jsonl(const std::filesystem::path& path, const SelectionTimeline& timeline);

// --- embeddings: binary -----------------------------------------------------
// magic "EMB1", little-endian u64 rows, u64 dims, rows*dims float32 LE,
// then one UTF-8 row id per line. Byte length must match the header.

EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m);

// --- annotations: CSV with header "track_id,annotation" --------------------
// annotation is one of  category:<name> | unknown | tracking_error

struct AnnotationRow {
  std::string track_id;
  Annotation annotation;
  std::string category;  // for Annotation::Category
};

std::vector<AnnotationRow> read_annotations_csv(const std::filesystem::path& path,
                                                ParseMode mode = ParseMode::Strict,
                                                ParseDiagnostics* diag = nullptr);
void write_annotations_csv(const std::filesystem::path& path,
                           const std::vector<AnnotationRow>& rows);

// --- clustering results: CSV with header "row_id,label,outlier_score" ------

struct ClusterFileRow {
  std::string row_id;
  std::int32_t label;
  double outlier_score;
};

std::vector<ClusterFileRow> read_clusters_csv(const std::filesystem::path& path);
void write_clusters_csv(const std::filesystem::path& path,
                        const std::vector<std::string>& row_ids, const ClusteringResult& result);

// --- evaluation curves: CSV with header "fraction,ami,n,distinguished" -----

void write_curve_csv(std::ostream& out, const EvaluationCurve& curve);
void write_curve_csv(const std::filesystem::path& path, const EvaluationCurve& curve);
EvaluationCurve read_curve_csv(const std::filesystem::path& path);

// --- PCA model: JSON --------------------------------------------------------

void write_pca_model(const std::filesystem::path& path, const PcaModel& model);
PcaModel read_pca_model(const std::filesystem::path& path);

// --- synthetic truth sidecar: JSON ------------------------------------------

struct TruthSidecar {
  std::vector<std::string> track_ids;
  std::vector<std::uint32_t> category;
  std::vector<bool> outlier;
  std::vector<bool> error;
  std::size_t n_categories = 0;
};

void write_truth_json(const std::filesystem::path& path, const TruthSidecar& truth);
TruthSidecar read_truth_json(const std::filesystem::path& path);

// --- directory-level ingestion ---------------------------------------------

/// Cross-file referential integrity over a dataset directory
/// (tracks.jsonl, annotations.csv, *.emb, timeline.jsonl when present).
struct IngestReport {
  std::size_t total_tracks = 0;
  std::size_t labeled_tracks = 0;
  std::size_t unknown_tracks = 0;
  std::size_t error_tracks = 0;
  std::size_t category_tracks = 0;
  std::optional<std::size_t> frames;
  std::size_t embedding_rows = 0;
  std::vector<std::string> dangling_references;  // non-fatal
  std::vector<std::string> parse_errors;

  std::string to_text() const;
};

IngestReport ingest_validate(const std::filesystem::path& dir);

/// Join cluster rows with annotations into an evaluation set. Tracks
/// missing an annotation are skipped and counted.
LabeledEvalSet build_evalset(const std::vector<ClusterFileRow>& clusters,
                             const std::vector<AnnotationRow>& annotations,
                             std::size_t min_instances,
                             EvalFilterResult* filter_out = nullptr,
                             std::size_t* unannotated_out = nullptr);

/// Round-trip-exact decimal formatting used by every writer.
std::string format_double(double v);
std::string format_float(float v);

}  // namespace trackmine::io
