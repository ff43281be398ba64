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

#include "trackmine/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace trackmine {

std::uint64_t RleMask::area() const {
  std::uint64_t a = 0;
  for (std::size_t i = 1; i < runs.size(); i += 2) a += runs[i];
  return a;
}

const FrameObservation* Tracklet::at_frame(std::int64_t frame) const {
  auto it = std::lower_bound(observations.begin(), observations.end(), frame,
                             [](const FrameObservation& o, std::int64_t f) { return o.frame_index < f; });
  if (it != observations.end() && it->frame_index == frame) return &*it;
  return nullptr;
}

EmbeddingMatrix EmbeddingMatrix::zeros(std::size_t rows, std::size_t dims) {
  EmbeddingMatrix m;
  m.rows = rows;
  m.dims = dims;
  m.data.assign(rows * dims, 0.0f);
  m.row_ids.resize(rows);
  return m;
}

void EmbeddingMatrix::validate() const {
  if (data.size() != rows * dims)
    throw std::invalid_argument("embedding matrix: data length != rows * dims");
  if (row_ids.size() != rows)
    throw std::invalid_argument("embedding matrix: row id count != rows");
  for (float v : data)
    if (!std::isfinite(v)) throw std::invalid_argument("embedding matrix: non-finite value");
}

ValidationReport validate_mask(const MaskGeometry& geometry) {
  ValidationReport report;
  if (geometry.is_rle()) {
    const RleMask& m = geometry.rle();
    std::uint64_t total = 0;
    for (std::uint64_t r : m.runs) total += r;
    if (total != m.pixel_count()) report.violations.push_back("run-length sum mismatch");
  } else {
    const BoundingBox& b = geometry.box();
    if (!(b.w >= 0.0) || !(b.h >= 0.0)) report.violations.push_back("negative box extent");
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h))
      report.violations.push_back("non-finite box coordinate");
  }
  return report;
}

ValidationReport validate_tracklet(const Tracklet& tracklet) {
  ValidationReport report;
  if (tracklet.observations.empty()) report.violations.push_back("empty tracklet");
  for (std::size_t i = 1; i < tracklet.observations.size(); ++i) {
    if (tracklet.observations[i].frame_index <= tracklet.observations[i - 1].frame_index) {
      report.violations.push_back(
          tracklet.observations[i].frame_index == tracklet.observations[i - 1].frame_index
              ? "duplicate frame index"
              : "not sorted");
      break;
    }
  }
  for (const FrameObservation& obs : tracklet.observations) {
    ValidationReport mask_report = validate_mask(obs.geometry);
    for (std::string& v : mask_report.violations)
      report.violations.push_back("frame " + std::to_string(obs.frame_index) + ": " + v);
    if (obs.proposal_score && (*obs.proposal_score < 0.0 || *obs.proposal_score > 1.0))
      report.violations.push_back("frame " + std::to_string(obs.frame_index) +
                                  ": proposal score outside [0,1]");
  }
  if (tracklet.classifier_confidence &&
      (*tracklet.classifier_confidence < 0.0 || *tracklet.classifier_confidence > 1.0))
    report.violations.push_back("classifier confidence outside [0,1]");
  return report;
}

ValidationReport validate_track(const Track& track, double lambda_min) {
  ValidationReport report;
  for (std::size_t i = 1; i < track.observations.size(); ++i)
    if (track.observations[i].frame_index <= track.observations[i - 1].frame_index) {
      report.violations.push_back("observations not strictly ascending");
      break;
    }
  if (!track.tracklet_ids.empty() &&
      track.junction_overlaps.size() != track.tracklet_ids.size() - 1)
    report.violations.push_back("junction count != tracklet count - 1");
  for (double lambda : track.junction_overlaps)
    if (lambda < lambda_min) {
      report.violations.push_back("junction overlap below threshold");
      break;
    }
  std::set<std::string> seen(track.tracklet_ids.begin(), track.tracklet_ids.end());
  if (seen.size() != track.tracklet_ids.size())
    report.violations.push_back("duplicate tracklet id");
  return report;
}

}  // namespace trackmine
