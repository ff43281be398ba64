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
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace trackmine {

/// Run-length encoded binary mask on a fixed canvas. Runs alternate
/// background/foreground, starting with background, in row-major scan order.
/// The run lengths must sum to exactly width * height.
struct RleMask {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint64_t> runs;

  std::uint64_t pixel_count() const { return std::uint64_t(width) * height; }
  /// Foreground area in pixels (sum of odd-indexed runs).
  std::uint64_t area() const;
};

/// Axis-aligned box in pixel coordinates; fractional coordinates allowed.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
};

/// Per-frame object mask: either a pixel-exact RLE mask or a box.
struct MaskGeometry {
  std::variant<RleMask, BoundingBox> shape;

  bool is_rle() const { return std::holds_alternative<RleMask>(shape); }
  const RleMask& rle() const { return std::get<RleMask>(shape); }
  const BoundingBox& box() const { return std::get<BoundingBox>(shape); }

  static MaskGeometry from_rle(RleMask m) { return MaskGeometry{std::move(m)}; }
  static MaskGeometry from_box(BoundingBox b) { return MaskGeometry{b}; }
};

struct FrameObservation {
  std::int64_t frame_index = 0;
  MaskGeometry geometry;
  std::optional<double> proposal_score;  // in [0,1] when present
};

/// A short per-frame-selected trajectory fragment. Observations are kept
/// sorted strictly ascending by frame index.
struct Tracklet {
  std::string id;
  std::vector<FrameObservation> observations;
  std::optional<std::string> classifier_label;
  std::optional<double> classifier_confidence;

  std::size_t length() const { return observations.size(); }
  /// Observation at a given frame, or nullptr when the tracklet skips it.
  const FrameObservation* at_frame(std::int64_t frame) const;
};

/// Category assignment of a merged track.
struct TrackLabel {
  std::optional<std::string> category;  // nullopt = unknown object

  bool known() const { return category.has_value(); }
};

/// A maximal chain of tracklets merged by the overlap criterion.
/// junction_overlaps[i] is the overlap ratio recorded when tracklet i+1
/// was appended; each value was >= the configured merge threshold.
struct Track {
  std::string id;
  std::vector<std::string> tracklet_ids;
  std::vector<FrameObservation> observations;
  TrackLabel label;
  std::vector<double> junction_overlaps;
};

/// Manual annotation attached to a track for evaluation only.
enum class Annotation : std::uint8_t {
  Category,       // a named category, see AnnotatedTrack::category
  UnknownValid,   // a valid object outside the annotation taxonomy
  TrackingError,  // the track diverged from the tracked object
};

struct AnnotatedTrack {
  Track track;
  Annotation annotation = Annotation::UnknownValid;
  std::string category;  // set iff annotation == Annotation::Category
};

/// Dense row-major matrix of 32-bit feature vectors with one external id per
/// row. Every stored value must be finite.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dims = 0;
  std::vector<float> data;          // rows * dims, row-major
  std::vector<std::string> row_ids; // size == rows

  const float* row(std::size_t r) const { return data.data() + r * dims; }
  float* row(std::size_t r) { return data.data() + r * dims; }

  static EmbeddingMatrix zeros(std::size_t rows, std::size_t dims);
  /// Throws std::invalid_argument when shape, id count, or finiteness is off.
  void validate() const;
};

/// Result of a non-throwing validation pass; empty == valid.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_mask(const MaskGeometry& geometry);
ValidationReport validate_tracklet(const Tracklet& tracklet);
ValidationReport validate_track(const Track& track, double lambda_min);

}  // namespace trackmine
