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

#include "trackmine/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace trackmine::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_at_byte(const std::filesystem::path& path, std::uint64_t offset,
                               const std::string& what) {
  throw DataError(path.string() + ": byte " + std::to_string(offset) + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw DataError(path.string() + ": cannot open for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path,
                          std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  return out;
}

MaskGeometry geometry_from_json(const json& j) {
  if (j.contains("box")) {
    const json& b = j.at("box");
    if (!b.is_array() || b.size() != 4) throw DataError("geometry: box must be [x,y,w,h]");
    return MaskGeometry::from_box(
        {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()});
  }
  if (j.contains("rle")) {
    const json& r = j.at("rle");
    RleMask m;
    m.width = r.at("w").get<std::uint32_t>();
    m.height = r.at("h").get<std::uint32_t>();
    m.runs = r.at("runs").get<std::vector<std::uint64_t>>();
    return MaskGeometry::from_rle(std::move(m));
  }
  throw DataError("geometry: expected 'box' or 'rle'");
}

json geometry_to_json(const MaskGeometry& g) {
  json j;
  if (g.is_rle()) {
    const RleMask& m = g.rle();
    j["rle"] = {{"w", m.width}, {"h", m.height}, {"runs", m.runs}};
  } else {
    const BoundingBox& b = g.box();
    j["box"] = {b.x, b.y, b.w, b.h};
  }
  return j;
}

std::vector<FrameObservation> observations_from_json(const json& arr) {
  if (!arr.is_array()) throw DataError("observations must be an array");
  std::vector<FrameObservation> out;
  out.reserve(arr.size());
  for (const json& o : arr) {
    FrameObservation obs;
    obs.frame_index = o.at("frame").get<std::int64_t>();
    obs.geometry = geometry_from_json(o.at("geometry"));
    if (o.contains("score")) obs.proposal_score = o.at("score").get<double>();
    out.push_back(std::move(obs));
  }
  return out;
}

json observations_to_json(const std::vector<FrameObservation>& observations) {
  json arr = json::array();
  for (const FrameObservation& obs : observations) {
    json o;
    o["frame"] = obs.frame_index;
    o["geometry"] = geometry_to_json(obs.geometry);
    if (obs.proposal_score) o["score"] = *obs.proposal_score;
    arr.push_back(std::move(o));
  }
  return arr;
}

// Shared line-by-line driver handling strict/lenient semantics.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, ParseMode mode, ParseDiagnostics* diag,
                    Fn&& fn) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      fn(json::parse(line), line_no);
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      if (mode == ParseMode::Strict) fail(path, line_no, e.what());
      if (diag) diag->errors.push_back(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string format_float(float v) {
  char buf[64];
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

// --- tracks -----------------------------------------------------------------

std::vector<TrackRecord> read_tracks_jsonl(const std::filesystem::path& path, ParseMode mode,
                                           ParseDiagnostics* diag) {
  std::vector<TrackRecord> out;
  for_each_jsonl(path, mode, diag, [&](json j, std::size_t) {
    TrackRecord record;
    record.track.id = j.at("id").get<std::string>();
    if (j.contains("label") && !j.at("label").is_null())
      record.track.label.category = j.at("label").get<std::string>();
    if (j.contains("tracklet_ids"))
      record.track.tracklet_ids = j.at("tracklet_ids").get<std::vector<std::string>>();
    if (j.contains("observations"))
      record.track.observations = observations_from_json(j.at("observations"));
    if (j.contains("junction_overlaps"))
      record.track.junction_overlaps = j.at("junction_overlaps").get<std::vector<double>>();
    j.erase("id");
    j.erase("label");
    j.erase("tracklet_ids");
    j.erase("observations");
    j.erase("junction_overlaps");
    if (!j.empty()) record.extra_json = j.dump();
    out.push_back(std::move(record));
  });
  return out;
}

void write_tracks_jsonl(const std::filesystem::path& path, const std::vector<TrackRecord>& tracks) {
  std::ofstream out = open_output(path);
  for (const TrackRecord& record : tracks) {
    json j = record.extra_json.empty() ? json::object() : json::parse(record.extra_json);
    j["id"] = record.track.id;
    j["label"] = record.track.label.category ? json(*record.track.label.category) : json();
    j["tracklet_ids"] = record.track.tracklet_ids;
    j["observations"] = observations_to_json(record.track.observations);
    j["junction_overlaps"] = record.track.junction_overlaps;
    out << j.dump() << "\n";
  }
}

void write_tracks_jsonl(const std::filesystem::path& path, const std::vector<Track>& tracks) {
  std::vector<TrackRecord> records;
  records.reserve(tracks.size());
  for (const Track& t : tracks) records.push_back({t, ""});
  write_tracks_jsonl(path, records);
}

// --- tracklets + timeline ----------------------------------------------------

std::vector<Tracklet> read_tracklets_jsonl(const std::filesystem::path& path, ParseMode mode,
                                           ParseDiagnostics* diag) {
  std::vector<Tracklet> out;
  for_each_jsonl(path, mode, diag, [&](const json& j, std::size_t) {
    Tracklet t;
    t.id = j.at("id").get<std::string>();
    if (j.contains("label") && !j.at("label").is_null())
      t.classifier_label = j.at("label").get<std::string>();
    if (j.contains("confidence")) t.classifier_confidence = j.at("confidence").get<double>();
    t.observations = observations_from_json(j.at("observations"));
    out.push_back(std::move(t));
  });
  return out;
}

void write_tracklets_jsonl(const std::filesystem::path& path, const std::vector<Tracklet>& tracklets) {
  std::ofstream out = open_output(path);
  for (const Tracklet& t : tracklets) {
    json j;
    j["id"] = t.id;
    if (t.classifier_label) j["label"] = *t.classifier_label;
    if (t.classifier_confidence) j["confidence"] = *t.classifier_confidence;
    j["observations"] = observations_to_json(t.observations);
    out << j.dump() << "\n";
  }
}

SelectionTimeline read_timeline_jsonl(const std::filesystem::path& path, ParseMode mode,
                                      ParseDiagnostics* diag) {
  SelectionTimeline timeline;
  for_each_jsonl(path, mode, diag, [&](const json& j, std::size_t) {
    const std::int64_t frame = j.at("frame").get<std::int64_t>();
    std::vector<std::string> ids = j.at("selected").get<std::vector<std::string>>();
    std::vector<std::string>& slot = timeline.selected[frame];
    slot.insert(slot.end(), ids.begin(), ids.end());
  });
  return timeline;
}

void write_timeline_jsonl(const std::filesystem::path& path, const SelectionTimeline& timeline) {
  std::ofstream out = open_output(path);
  for (const auto& [frame, ids] : timeline.selected) {
    json j;
    j["frame"] = frame;
    j["selected"] = ids;
    out << j.dump() << "\n";
  }
}

// --- embeddings ---------------------------------------------------------------

namespace {
constexpr char kEmbeddingMagic[4] = {'E', 'M', 'B', '1'};
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < 20 || std::memcmp(bytes.data(), kEmbeddingMagic, 4) != 0)
    fail_at_byte(path, 0, "missing EMB1 magic");
  std::uint64_t rows = 0, dims = 0;
  std::memcpy(&rows, bytes.data() + 4, 8);
  std::memcpy(&dims, bytes.data() + 12, 8);
  const std::uint64_t payload = rows * dims * 4;
  if (rows != 0 && (payload / 4) / rows != dims) fail_at_byte(path, 4, "row/dim overflow");
  if (bytes.size() < 20 + payload)
    fail_at_byte(path, bytes.size(), "truncated data section (header wants more)");

  EmbeddingMatrix m;
  m.rows = rows;
  m.dims = dims;
  m.data.resize(std::size_t(rows) * std::size_t(dims));
  std::memcpy(m.data.data(), bytes.data() + 20, payload);

  std::size_t pos = std::size_t(20 + payload);
  m.row_ids.reserve(rows);
  for (std::uint64_t r = 0; r < rows; ++r) {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) fail_at_byte(path, pos, "missing row id line");
    m.row_ids.emplace_back(bytes, pos, nl - pos);
    pos = nl + 1;
  }
  if (pos != bytes.size()) fail_at_byte(path, pos, "trailing bytes after row ids");
  try {
    m.validate();
  } catch (const std::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return m;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m) {
  m.validate();
  std::ofstream out = open_output(path, std::ios::out | std::ios::binary);
  out.write(kEmbeddingMagic, 4);
  const std::uint64_t rows = m.rows, dims = m.dims;
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&dims), 8);
  out.write(reinterpret_cast<const char*>(m.data.data()),
            std::streamsize(m.data.size() * sizeof(float)));
  for (const std::string& id : m.row_ids) {
    if (id.find('\n') != std::string::npos)
      throw DataError(path.string() + ": row id contains a newline");
    out << id << "\n";
  }
}

// --- annotations ----------------------------------------------------------------

std::vector<AnnotationRow> read_annotations_csv(const std::filesystem::path& path, ParseMode mode,
                                                ParseDiagnostics* diag) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != "track_id,annotation")
    fail(path, 1, "expected header 'track_id,annotation'");
  ++line_no;

  std::vector<AnnotationRow> out;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    auto reject = [&](const std::string& why) {
      if (mode == ParseMode::Strict) fail(path, line_no, why);
      if (diag) diag->errors.push_back(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    if (comma == std::string::npos) {
      reject("missing comma");
      continue;
    }
    AnnotationRow row;
    row.track_id = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (value == "unknown") {
      row.annotation = Annotation::UnknownValid;
    } else if (value == "tracking_error") {
      row.annotation = Annotation::TrackingError;
    } else if (value.rfind("category:", 0) == 0) {
      row.annotation = Annotation::Category;
      row.category = value.substr(9);
      if (row.category.empty()) {
        reject("empty category name");
        continue;
      }
    } else {
      reject("unknown annotation '" + value + "'");
      continue;
    }
    if (!seen.insert(row.track_id).second) {
      reject("duplicate track_id '" + row.track_id + "'");
      continue;
    }
    out.push_back(std::move(row));
  }
  return out;
}

void write_annotations_csv(const std::filesystem::path& path, const std::vector<AnnotationRow>& rows) {
  std::ofstream out = open_output(path);
  out << "track_id,annotation\n";
  for (const AnnotationRow& row : rows) {
    out << row.track_id << ",";
    switch (row.annotation) {
      case Annotation::UnknownValid:
        out << "unknown";
        break;
      case Annotation::TrackingError:
        out << "tracking_error";
        break;
      case Annotation::Category:
        out << "category:" << row.category;
        break;
    }
    out << "\n";
  }
}

// --- clustering results -----------------------------------------------------------

std::vector<ClusterFileRow> read_clusters_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != "row_id,label,outlier_score")
    fail(path, 1, "expected header 'row_id,label,outlier_score'");
  ++line_no;

  std::vector<ClusterFileRow> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t c2 = line.rfind(',');
    const std::size_t c1 = c2 == std::string::npos ? std::string::npos : line.rfind(',', c2 - 1);
    if (c1 == std::string::npos) fail(path, line_no, "expected three columns");
    ClusterFileRow row;
    row.row_id = line.substr(0, c1);
    const std::string label = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string score = line.substr(c2 + 1);
    auto [p1, e1] = std::from_chars(label.data(), label.data() + label.size(), row.label);
    if (e1 != std::errc() || p1 != label.data() + label.size())
      fail(path, line_no, "bad label '" + label + "'");
    auto [p2, e2] = std::from_chars(score.data(), score.data() + score.size(), row.outlier_score);
    if (e2 != std::errc() || p2 != score.data() + score.size())
      fail(path, line_no, "bad outlier score '" + score + "'");
    out.push_back(std::move(row));
  }
  return out;
}

void write_clusters_csv(const std::filesystem::path& path, const std::vector<std::string>& row_ids,
                        const ClusteringResult& result) {
  if (row_ids.size() != result.assignments.size())
    throw std::invalid_argument("write_clusters_csv: row id count mismatch");
  std::ofstream out = open_output(path);
  out << "row_id,label,outlier_score\n";
  for (std::size_t i = 0; i < row_ids.size(); ++i)
    out << row_ids[i] << "," << result.assignments[i] << ","
        << format_double(result.outlier_score[i]) << "\n";
}

// --- evaluation curves --------------------------------------------------------------

void write_curve_csv(std::ostream& out, const EvaluationCurve& curve) {
  out << "fraction,ami,n,distinguished\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const CurvePoint& p = curve.points[i];
    out << format_double(p.outlier_fraction) << "," << format_double(p.ami) << "," << p.n_evaluated
        << "," << (curve.distinguished_point && *curve.distinguished_point == i ? 1 : 0) << "\n";
  }
}

void write_curve_csv(const std::filesystem::path& path, const EvaluationCurve& curve) {
  std::ofstream out = open_output(path);
  write_curve_csv(out, curve);
}

EvaluationCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != "fraction,ami,n,distinguished")
    fail(path, 1, "expected header 'fraction,ami,n,distinguished'");
  ++line_no;

  EvaluationCurve curve;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string fraction, ami_text, n, distinguished;
    if (!std::getline(row, fraction, ',') || !std::getline(row, ami_text, ',') ||
        !std::getline(row, n, ',') || !std::getline(row, distinguished))
      fail(path, line_no, "expected four columns");
    CurvePoint p;
    p.outlier_fraction = std::strtod(fraction.c_str(), nullptr);
    p.ami = std::strtod(ami_text.c_str(), nullptr);
    p.n_evaluated = std::size_t(std::strtoull(n.c_str(), nullptr, 10));
    p.defined = !std::isnan(p.ami);
    if (distinguished == "1") curve.distinguished_point = curve.points.size();
    curve.points.push_back(p);
  }
  return curve;
}

// --- PCA model -------------------------------------------------------------------------

void write_pca_model(const std::filesystem::path& path, const PcaModel& model) {
  json j;
  j["dims"] = model.dims;
  j["k"] = model.k;
  j["mean"] = model.mean;
  j["explained_variance"] = model.explained_variance;
  json comps = json::array();
  for (std::size_t c = 0; c < model.k; ++c)
    comps.push_back(std::vector<double>(model.components.begin() + c * model.dims,
                                        model.components.begin() + (c + 1) * model.dims));
  j["components"] = std::move(comps);
  open_output(path) << j.dump(2) << "\n";
}

PcaModel read_pca_model(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(open_input(path));
  } catch (const std::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  PcaModel model;
  model.dims = j.at("dims").get<std::size_t>();
  model.k = j.at("k").get<std::size_t>();
  model.mean = j.at("mean").get<std::vector<double>>();
  model.explained_variance = j.at("explained_variance").get<std::vector<double>>();
  for (const json& row : j.at("components")) {
    const std::vector<double> comp = row.get<std::vector<double>>();
    model.components.insert(model.components.end(), comp.begin(), comp.end());
  }
  if (model.mean.size() != model.dims || model.components.size() != model.k * model.dims ||
      model.explained_variance.size() != model.k)
    throw DataError(path.string() + ": inconsistent model shape");
  return model;
}

// --- truth sidecar ------------------------------------------------------------------------

void write_truth_json(const std::filesystem::path& path, const TruthSidecar& truth) {
  json j;
  j["track_ids"] = truth.track_ids;
  j["category"] = truth.category;
  j["outlier"] = std::vector<int>(truth.outlier.begin(), truth.outlier.end());
  j["error"] = std::vector<int>(truth.error.begin(), truth.error.end());
  j["n_categories"] = truth.n_categories;
  open_output(path) << j.dump() << "\n";
}

TruthSidecar read_truth_json(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(open_input(path));
  } catch (const std::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  TruthSidecar truth;
  truth.track_ids = j.at("track_ids").get<std::vector<std::string>>();
  truth.category = j.at("category").get<std::vector<std::uint32_t>>();
  for (int v : j.at("outlier").get<std::vector<int>>()) truth.outlier.push_back(v != 0);
  for (int v : j.at("error").get<std::vector<int>>()) truth.error.push_back(v != 0);
  truth.n_categories = j.at("n_categories").get<std::size_t>();
  return truth;
}

// --- ingestion ---------------------------------------------------------------------------

IngestReport ingest_validate(const std::filesystem::path& dir) {
  IngestReport report;
  ParseDiagnostics diag;

  std::set<std::string> track_ids;
  std::set<std::int64_t> frames;
  bool have_tracks = false;

  const std::filesystem::path tracks_path = dir / "tracks.jsonl";
  if (std::filesystem::exists(tracks_path)) {
    have_tracks = true;
    const std::vector<TrackRecord> tracks =
        read_tracks_jsonl(tracks_path, ParseMode::Lenient, &diag);
    report.total_tracks = tracks.size();
    for (const TrackRecord& r : tracks) {
      if (!track_ids.insert(r.track.id).second)
        report.dangling_references.push_back("duplicate track id '" + r.track.id + "'");
      for (const FrameObservation& obs : r.track.observations) frames.insert(obs.frame_index);
    }
  }

  const std::filesystem::path annotations_path = dir / "annotations.csv";
  if (std::filesystem::exists(annotations_path)) {
    const std::vector<AnnotationRow> rows =
        read_annotations_csv(annotations_path, ParseMode::Lenient, &diag);
    report.labeled_tracks = rows.size();
    for (const AnnotationRow& row : rows) {
      switch (row.annotation) {
        case Annotation::UnknownValid:
          ++report.unknown_tracks;
          break;
        case Annotation::TrackingError:
          ++report.error_tracks;
          break;
        case Annotation::Category:
          ++report.category_tracks;
          break;
      }
      if (have_tracks && !track_ids.count(row.track_id))
        report.dangling_references.push_back("annotation for unknown track '" + row.track_id + "'");
    }
    if (!have_tracks) report.total_tracks = rows.size();
  }

  const std::filesystem::path timeline_path = dir / "timeline.jsonl";
  if (std::filesystem::exists(timeline_path)) {
    const SelectionTimeline timeline = read_timeline_jsonl(timeline_path, ParseMode::Lenient, &diag);
    for (const auto& [frame, ids] : timeline.selected) frames.insert(frame);
  }

  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".emb") continue;
    try {
      const EmbeddingMatrix m = read_embeddings(entry.path());
      report.embedding_rows += m.rows;
      if (have_tracks) {
        for (const std::string& id : m.row_ids) {
          const std::string track = id.substr(0, id.find('#'));
          if (!track_ids.count(track)) {
            report.dangling_references.push_back(entry.path().filename().string() +
                                                 ": row id for unknown track '" + track + "'");
            if (report.dangling_references.size() > 1000) break;  // cap the listing
          }
        }
      }
    } catch (const DataError& e) {
      diag.errors.push_back(e.what());
    }
  }

  if (!frames.empty()) report.frames = frames.size();
  report.parse_errors = std::move(diag.errors);
  return report;
}

std::string IngestReport::to_text() const {
  std::ostringstream out;
  out << "tracks (total):    " << total_tracks << "\n";
  out << "tracks (labeled):  " << labeled_tracks << "\n";
  out << "tracks (category): " << category_tracks << "\n";
  out << "tracks (unknown):  " << unknown_tracks << "\n";
  out << "tracking errors:   " << error_tracks;
  if (labeled_tracks > 0) {
    out << " (" << format_double(std::round(10000.0 * double(error_tracks) /
                                            double(labeled_tracks)) /
                                 100.0)
        << "%)";
  }
  out << "\n";
  if (frames) out << "frames:            " << *frames << "\n";
  out << "embedding rows:    " << embedding_rows << "\n";
  out << "dangling refs:     " << dangling_references.size() << "\n";
  for (const std::string& d : dangling_references) out << "  " << d << "\n";
  out << "parse errors:      " << parse_errors.size() << "\n";
  for (const std::string& e : parse_errors) out << "  " << e << "\n";
  return out.str();
}

LabeledEvalSet build_evalset(const std::vector<ClusterFileRow>& clusters,
                             const std::vector<AnnotationRow>& annotations,
                             std::size_t min_instances, EvalFilterResult* filter_out,
                             std::size_t* unannotated_out) {
  std::map<std::string, const AnnotationRow*> by_id;
  for (const AnnotationRow& row : annotations) by_id.emplace(row.track_id, &row);

  std::vector<const ClusterFileRow*> matched;
  std::vector<Annotation> ann;
  std::vector<std::string> categories;
  std::size_t unannotated = 0;
  for (const ClusterFileRow& row : clusters) {
    auto it = by_id.find(row.row_id);
    if (it == by_id.end()) {
      ++unannotated;
      continue;
    }
    matched.push_back(&row);
    ann.push_back(it->second->annotation);
    categories.push_back(it->second->category);
  }

  const EvalFilterResult filter = eval_filter(ann, categories, min_instances);
  LabeledEvalSet evalset;
  for (std::size_t i = 0; i < matched.size(); ++i) {
    if (!filter.keep[i]) continue;
    evalset.ids.push_back(matched[i]->row_id);
    evalset.truth.push_back(categories[i]);
    evalset.pred.push_back(matched[i]->label);
    evalset.outlier_score.push_back(matched[i]->outlier_score);
  }
  if (filter_out) *filter_out = filter;
  if (unannotated_out) *unannotated_out = unannotated;
  return evalset;
}

}  // namespace trackmine::io
