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

#include "trackmine/track_merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trackmine/mask.hpp"

namespace trackmine {

void MergeConfig::validate() const {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("merge config: gamma must be in (0,1]");
  if (!(lambda_min > 0.0) || lambda_min > 1.0)
    throw std::invalid_argument("merge config: lambda_min must be in (0,1]");
}

std::vector<std::int64_t> SelectionTimeline::frames() const {
  std::vector<std::int64_t> out;
  out.reserve(selected.size());
  for (const auto& [frame, ids] : selected) out.push_back(frame);
  return out;
}

TrackletStore::TrackletStore(std::vector<Tracklet> tracklets) : tracklets_(std::move(tracklets)) {
  for (std::size_t i = 0; i < tracklets_.size(); ++i) {
    auto [it, inserted] = index_.emplace(tracklets_[i].id, i);
    if (!inserted)
      throw std::invalid_argument("tracklet store: duplicate id '" + tracklets_[i].id + "'");
  }
}

std::optional<std::size_t> TrackletStore::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double overlap_ratio(const Tracklet& a, const Tracklet& b, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("overlap_ratio: gamma must be in (0,1]");
  if (a.observations.empty() || b.observations.empty()) return 0.0;
  std::size_t matches = 0;
  // Both observation lists are frame-sorted; walk them in lockstep.
  std::size_t ia = 0, ib = 0;
  while (ia < a.observations.size() && ib < b.observations.size()) {
    const std::int64_t fa = a.observations[ia].frame_index;
    const std::int64_t fb = b.observations[ib].frame_index;
    if (fa < fb) {
      ++ia;
    } else if (fb < fa) {
      ++ib;
    } else {
      if (mask_iou(a.observations[ia].geometry, b.observations[ib].geometry) > gamma) ++matches;
      ++ia;
      ++ib;
    }
  }
  return double(matches) / double(std::min(a.length(), b.length()));
}

namespace {

struct ActiveTrack {
  std::vector<std::size_t> members;  // tracklet indices in chain order
  std::vector<double> lambdas;       // one per junction
  std::size_t current() const { return members.back(); }
};

TrackLabel majority_label(const std::vector<std::size_t>& members, const TrackletStore& store) {
  std::map<std::string, std::size_t> votes;  // label -> observation count
  for (std::size_t idx : members) {
    const Tracklet& t = store.at(idx);
    if (t.classifier_label) votes[*t.classifier_label] += t.length();
  }
  if (votes.empty()) return TrackLabel{};
  auto best = votes.begin();
  for (auto it = std::next(votes.begin()); it != votes.end(); ++it)
    if (it->second > best->second) best = it;  // ties keep the earlier name
  return TrackLabel{best->first};
}

Track finalize_track(ActiveTrack&& active, std::size_t ordinal, const TrackletStore& store) {
  Track track;
  std::ostringstream id;
  id << "T";
  id.width(6);
  id.fill('0');
  id << ordinal;
  track.id = id.str();
  track.junction_overlaps = std::move(active.lambdas);
  // Merge observations; when junction frames exist in two tracklets the
  // earlier tracklet in the chain wins.
  std::map<std::int64_t, const FrameObservation*> merged;
  for (std::size_t idx : active.members) {
    track.tracklet_ids.push_back(store.at(idx).id);
    for (const FrameObservation& obs : store.at(idx).observations)
      merged.emplace(obs.frame_index, &obs);
  }
  track.observations.reserve(merged.size());
  for (const auto& [frame, obs] : merged) track.observations.push_back(*obs);
  track.label = majority_label(active.members, store);
  return track;
}

}  // namespace

std::vector<Track> merge_tracklets(const TrackletStore& tracklets,
                                   const SelectionTimeline& timeline, const MergeConfig& cfg) {
  cfg.validate();

  // Resolve and validate the timeline up front.
  std::map<std::int64_t, std::vector<std::size_t>> frames;
  for (const auto& [frame, ids] : timeline.selected) {
    std::vector<std::size_t>& resolved = frames[frame];
    std::set<std::size_t> dedupe;
    for (const std::string& id : ids) {
      auto idx = tracklets.find(id);
      if (!idx)
        throw std::invalid_argument("timeline references unknown tracklet id '" + id + "'");
      if (dedupe.insert(*idx).second) resolved.push_back(*idx);
    }
  }

  std::vector<bool> consumed(tracklets.size(), false);
  std::vector<ActiveTrack> active;
  std::vector<ActiveTrack> done;

  for (const auto& [frame, selected] : frames) {
    std::set<std::size_t> selected_set(selected.begin(), selected.end());

    std::vector<std::size_t> dying;  // indices into `active`
    for (std::size_t t = 0; t < active.size(); ++t)
      if (!selected_set.count(active[t].current())) dying.push_back(t);

    std::vector<std::size_t> candidates;
    for (std::size_t idx : selected)
      if (!consumed[idx]) candidates.push_back(idx);

    // Greedy best-lambda matching between dying tracks and fresh tracklets.
    // Ties break by lower candidate id, then lower current-tracklet id.
    std::vector<bool> track_taken(dying.size(), false);
    std::vector<bool> cand_taken(candidates.size(), false);
    if (!dying.empty() && !candidates.empty()) {
      struct Pair {
        double lambda;
        std::size_t track_pos;
        std::size_t cand_pos;
      };
      std::vector<Pair> pairs;
      pairs.reserve(dying.size() * candidates.size());
      for (std::size_t tp = 0; tp < dying.size(); ++tp) {
        const Tracklet& current = tracklets.at(active[dying[tp]].current());
        for (std::size_t cp = 0; cp < candidates.size(); ++cp) {
          const double lambda = overlap_ratio(current, tracklets.at(candidates[cp]), cfg.gamma);
          if (lambda >= cfg.lambda_min) pairs.push_back({lambda, tp, cp});
        }
      }
      std::sort(pairs.begin(), pairs.end(), [&](const Pair& x, const Pair& y) {
        if (x.lambda != y.lambda) return x.lambda > y.lambda;
        const std::string& cx = tracklets.at(candidates[x.cand_pos]).id;
        const std::string& cy = tracklets.at(candidates[y.cand_pos]).id;
        if (cx != cy) return cx < cy;
        return tracklets.at(active[dying[x.track_pos]].current()).id <
               tracklets.at(active[dying[y.track_pos]].current()).id;
      });
      for (const Pair& p : pairs) {
        if (track_taken[p.track_pos] || cand_taken[p.cand_pos]) continue;
        track_taken[p.track_pos] = true;
        cand_taken[p.cand_pos] = true;
        ActiveTrack& track = active[dying[p.track_pos]];
        track.members.push_back(candidates[p.cand_pos]);
        track.lambdas.push_back(p.lambda);
        consumed[candidates[p.cand_pos]] = true;
      }
    }

    // Unmatched dying tracks terminate, highest index first to keep the
    // erase positions stable.
    for (std::size_t i = dying.size(); i-- > 0;) {
      if (track_taken[i]) continue;
      done.push_back(std::move(active[dying[i]]));
      active.erase(active.begin() + std::ptrdiff_t(dying[i]));
    }

    // Unmatched fresh tracklets start new tracks.
    for (std::size_t cp = 0; cp < candidates.size(); ++cp) {
      if (cand_taken[cp]) continue;
      consumed[candidates[cp]] = true;
      active.push_back(ActiveTrack{{candidates[cp]}, {}});
    }
  }

  for (ActiveTrack& track : active) done.push_back(std::move(track));

  // Deterministic output order: by first tracklet's first selected frame is
  // already implied by construction order of `done`; sort instead by first
  // member id for a stable, input-order-independent listing.
  std::sort(done.begin(), done.end(), [&](const ActiveTrack& x, const ActiveTrack& y) {
    return tracklets.at(x.members.front()).id < tracklets.at(y.members.front()).id;
  });

  std::vector<Track> out;
  out.reserve(done.size());
  for (std::size_t i = 0; i < done.size(); ++i)
    out.push_back(finalize_track(std::move(done[i]), i + 1, tracklets));
  return out;
}

CompressionStats compression_report(std::uint64_t tracklets_in, std::uint64_t tracks_out,
                                    std::uint64_t proposals_per_frame, std::uint64_t frames) {
  CompressionStats stats;
  stats.proposals_total = proposals_per_frame * frames;
  const double inf = std::numeric_limits<double>::infinity();
  stats.defined = tracklets_in > 0 && tracks_out > 0;
  stats.proposals_per_tracklet =
      tracklets_in > 0 ? double(stats.proposals_total) / double(tracklets_in) : inf;
  stats.tracklets_per_track = tracks_out > 0 ? double(tracklets_in) / double(tracks_out) : inf;
  stats.proposals_per_track =
      tracks_out > 0 ? double(stats.proposals_total) / double(tracks_out) : inf;
  return stats;
}

std::string CompressionStats::to_text() const {
  std::ostringstream out;
  out << "proposals total:        " << proposals_total << "\n";
  out << "proposals per tracklet: " << proposals_per_tracklet << "\n";
  out << "tracklets per track:    " << tracklets_per_track << "\n";
  out << "proposals per track:    " << proposals_per_track;
  if (!defined) out << "  (undefined: zero denominator)";
  out << "\n";
  return out.str();
}

}  // namespace trackmine
