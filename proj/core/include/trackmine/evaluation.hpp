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
#include <set>
#include <string>
#include <vector>

#include "trackmine/types.hpp"

namespace trackmine {

enum class AmiNormalization : std::uint8_t {
  MeanEntropy,  // (MI - E[MI]) / (avg(Ht, Hp) - E[MI]); the default
  MaxEntropy,   // (MI - E[MI]) / (max(Ht, Hp) - E[MI])
};

/// Adjusted mutual information between two labelings of the same points.
///
/// MI and entropies use natural logs; the expected MI is the exact
/// permutation-model value (hypergeometric sum over the contingency table).
/// Identical partitions (up to relabeling) return exactly 1.0, including
/// the degenerate single-cluster-vs-itself case. Callers must pre-filter
/// any -1 labels. Throws std::invalid_argument on length mismatch or empty
/// input.
double ami(const std::vector<std::int32_t>& truth, const std::vector<std::int32_t>& pred,
           AmiNormalization norm = AmiNormalization::MeanEntropy);

/// Unadjusted mutual information in nats (exposed for reporting).
double mutual_information(const std::vector<std::int32_t>& truth,
                          const std::vector<std::int32_t>& pred);

/// Exact expected mutual information under the permutation model.
double expected_mutual_information(const std::vector<std::int32_t>& truth,
                                   const std::vector<std::int32_t>& pred);

/// Shannon entropy of a labeling, natural log.
double label_entropy(const std::vector<std::int32_t>& labels);

/// Aligned evaluation columns for one setup: ids, ground-truth categories,
/// predicted labels (-1 allowed), outlier scores.
struct LabeledEvalSet {
  std::vector<std::string> ids;
  std::vector<std::string> truth;
  std::vector<std::int32_t> pred;
  std::vector<double> outlier_score;

  std::size_t size() const { return ids.size(); }
  void validate() const;  // throws on ragged columns
};

struct CurvePoint {
  double outlier_fraction = 0.0;
  double ami = 0.0;          // NaN when undefined
  std::size_t n_evaluated = 0;
  bool defined = true;
};

struct EvaluationCurve {
  std::vector<CurvePoint> points;                 // strictly increasing fraction
  std::optional<std::size_t> distinguished_point; // the clusterer's own noise fraction
  std::map<std::string, std::string> config_meta;
};

/// AMI as a function of the excluded outlier fraction.
///
/// For each fraction f, the ceil(f*N) points with the highest outlier score
/// are excluded (ties: lower id excluded first). Once f reaches the
/// predicted-noise fraction, all -1 points are forced into the excluded
/// set. Noise points that survive exclusion enter the AMI as one extra
/// cluster. When the set carries -1 predictions, the native noise fraction
/// is added as a curve point and marked distinguished.
EvaluationCurve outlier_curve(const LabeledEvalSet& evalset, std::vector<double> fractions,
                              AmiNormalization norm = AmiNormalization::MeanEntropy);

/// Which tracks survive evaluation filtering, and why the rest fell out.
struct EvalFilterResult {
  std::vector<bool> keep;  // aligned with the input tracks
  std::size_t retained = 0;
  std::size_t excluded_unknown = 0;
  std::size_t excluded_error = 0;
  std::size_t excluded_rare = 0;  // category below min_instances
  std::map<std::string, std::size_t> retained_per_category;
};

/// Drop unknown-valid and tracking-error tracks plus every category with
/// fewer than min_instances annotated tracks (strictly fewer: a category
/// with exactly min_instances members stays).
EvalFilterResult eval_filter(const std::vector<AnnotatedTrack>& tracks, std::size_t min_instances);
EvalFilterResult eval_filter(const std::vector<Annotation>& annotations,
                             const std::vector<std::string>& categories,
                             std::size_t min_instances);

struct CategoryDistribution {
  std::vector<std::pair<std::string, std::size_t>> counts;  // descending
  std::size_t cutoff = 30;          // categories below this are "rare"
  std::size_t categories_below_cutoff = 0;
  std::size_t total_tracks = 0;
  std::size_t labeled_tracks = 0;   // category-annotated
  std::size_t unknown_tracks = 0;
  std::size_t error_tracks = 0;
  double error_rate = 0.0;          // errors / total

  std::string to_text() const;
};

CategoryDistribution distribution_report(const std::vector<AnnotatedTrack>& tracks,
                                         std::size_t cutoff = 30);

struct ClusterRow {
  std::int32_t label = 0;
  std::size_t size = 0;
  std::string dominant_category;
  std::size_t dominant_count = 0;
  double purity = 0.0;
  bool novel = false;  // dominant category outside the known-category list
};

struct ClusterSummary {
  std::vector<ClusterRow> clusters;  // sorted by size descending
  std::size_t total_clusters = 0;    // before the display cutoff
  std::size_t noise_points = 0;
  std::size_t min_cluster_display = 0;

  std::string to_text() const;
};

/// Per-cluster size, dominant ground-truth category, purity and novelty,
/// listing only clusters of at least min_cluster_display points.
ClusterSummary cluster_report(const std::vector<std::int32_t>& assignments,
                              const LabeledEvalSet& evalset,
                              std::size_t min_cluster_display,
                              const std::set<std::string>& known_categories = {});

}  // namespace trackmine
