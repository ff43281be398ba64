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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trackmine/types.hpp"

namespace trackmine {

struct MergeConfig {
  double gamma = 0.5;       // per-frame mask-IoU match threshold, in (0,1]
  double lambda_min = 0.5;  // minimum overlap ratio to continue a track, in (0,1]

  void validate() const;  // throws std::invalid_argument
};

/// Per-frame model-selection output: which tracklets are "selected" at each
/// frame. The merge sweep visits exactly the frames present in the map; an
/// entry with an empty list is a real "nothing selected" event, a missing
/// frame is a non-event.
struct SelectionTimeline {
  std::map<std::int64_t, std::vector<std::string>> selected;

  std::vector<std::int64_t> frames() const;
};

/// Indexed tracklet collection with id lookup.
class TrackletStore {
 public:
  TrackletStore() = default;
  explicit TrackletStore(std::vector<Tracklet> tracklets);

  std::size_t size() const { return tracklets_.size(); }
  const Tracklet& at(std::size_t index) const { return tracklets_[index]; }
  const std::vector<Tracklet>& all() const { return tracklets_; }
  /// Index of a tracklet id, or nullopt when unknown.
  std::optional<std::size_t> find(const std::string& id) const;

 private:
  std::vector<Tracklet> tracklets_;
  std::map<std::string, std::size_t> index_;
};

/// Fraction of shared frames whose masks match (IoU > gamma), over the
/// length of the shorter tracklet. Frames present in only one tracklet do
/// not count as matches. Symmetric in its tracklet arguments.
double overlap_ratio(const Tracklet& a, const Tracklet& b, double gamma);

/// Merge per-frame-selected tracklets into tracks with a single forward
/// sweep over the timeline.
///
/// At each frame, an active track whose current tracklet is re-selected
/// continues unchanged. Tracks whose tracklet lost selection compete for the
/// tracklets newly selected at that frame (never yet part of any track):
/// pairs are matched greedily by highest overlap ratio >= cfg.lambda_min,
/// ties broken by lower candidate tracklet id, then lower current tracklet
/// id. Unmatched dying tracks terminate; unmatched new tracklets start new
/// tracks. Every selected tracklet ends up in exactly one track.
///
/// Throws std::invalid_argument when the timeline references an unknown
/// tracklet id.
std::vector<Track> merge_tracklets(const TrackletStore& tracklets,
                                   const SelectionTimeline& timeline,
                                   const MergeConfig& cfg);

/// Proposal-to-track compression ratios, per frame and per sequence.
struct CompressionStats {
  std::uint64_t proposals_total = 0;
  double proposals_per_tracklet = 0.0;
  double tracklets_per_track = 0.0;
  double proposals_per_track = 0.0;
  bool defined = true;  // false when a denominator was zero

  std::string to_text() const;
};

CompressionStats compression_report(std::uint64_t tracklets_in, std::uint64_t tracks_out,
                                    std::uint64_t proposals_per_frame, std::uint64_t frames);

}  // namespace trackmine
