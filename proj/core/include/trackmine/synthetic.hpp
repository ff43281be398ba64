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
#include <string>
#include <vector>

#include "trackmine/track_merge.hpp"
#include "trackmine/types.hpp"

namespace trackmine {

/// Parameters of a generated long-tail track collection.
struct SyntheticSpec {
  std::size_t n_categories = 36;
  double zipf_exponent = 1.1;
  std::size_t n_tracks = 12000;
  std::size_t embedding_dims = 50;
  double cluster_spread = 1.0;      // per-dimension jitter sigma
  double center_separation = 100.0; // minimum pairwise center distance
  double outlier_fraction = 0.0;
  double tracking_error_fraction = 0.0;
  /// Half-width of the outlier box as a multiple of the center-sphere
  /// radius. At the default, outlier norms sit roughly 40x beyond the
  /// category centers; around 1 they land near 4x, still clearly outside
  /// every cluster but no longer dominating the total variance.
  double outlier_box_scale = 10.0;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

/// Ground truth emitted alongside a synthetic collection.
struct SyntheticTruth {
  std::vector<std::uint32_t> category;  // per track
  std::vector<bool> outlier;            // per track
  std::vector<bool> error;              // per track
  std::vector<std::vector<double>> centers;  // n_categories x dims
  std::vector<std::size_t> category_sizes;   // the exact Zipf allocation
};

struct SyntheticCollection {
  std::vector<AnnotatedTrack> tracks;
  EmbeddingMatrix crop_embeddings;  // row ids "<track>#<n>"
  SyntheticTruth truth;
};

/// Deterministic per seed: same spec, same bytes.
///
/// Category sizes follow rank^(-zipf_exponent) with largest-remainder
/// rounding; centers sit on a sphere with pairwise separation of at least
/// center_separation; crops are center + Gaussian jitter (3..30 per track);
/// outlier tracks are uniform in a box 10x the center radius; error tracks
/// borrow a different category's center. Throws when no center layout can
/// satisfy the separation.
SyntheticCollection generate_collection(const SyntheticSpec& spec);

/// Exact largest-remainder Zipf allocation of n_tracks over n_categories.
std::vector<std::size_t> zipf_allocation(std::size_t n_categories, double exponent,
                                         std::size_t n_tracks);

struct SyntheticStream {
  std::vector<Tracklet> tracklets;
  SelectionTimeline timeline;
  /// Original track id of each tracklet.
  std::vector<std::string> truth_track_of;
  std::size_t truth_track_count = 0;
};

/// Cut each true track's frame span into overlapping tracklet pieces and
/// interleave them into a per-frame selection timeline. Junction pieces
/// share identically-masked frames so the recorded overlap ratio is at
/// least junction_lambda by construction; merging should reassemble the
/// original tracks whenever junction_lambda clears the merge threshold.
SyntheticStream generate_tracklet_stream(const SyntheticSpec& spec, double fragmentation_rate,
                                         double junction_lambda = 0.6);

}  // namespace trackmine
