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

#include "trackmine/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace trackmine {
namespace {

struct Contingency {
  std::size_t n = 0;
  std::vector<std::size_t> row_counts;  // truth marginals
  std::vector<std::size_t> col_counts;  // pred marginals
  struct Cell {
    std::size_t row, col, count;
  };
  std::vector<Cell> cells;  // only non-zero cells
};

Contingency build_contingency(const std::vector<std::int32_t>& truth,
                              const std::vector<std::int32_t>& pred) {
  if (truth.size() != pred.size())
    throw std::invalid_argument("ami: label vectors differ in length");
  if (truth.empty()) throw std::invalid_argument("ami: empty input");

  std::map<std::int32_t, std::size_t> row_of, col_of;
  for (std::int32_t t : truth) row_of.emplace(t, row_of.size());
  for (std::int32_t p : pred) col_of.emplace(p, col_of.size());

  Contingency c;
  c.n = truth.size();
  c.row_counts.assign(row_of.size(), 0);
  c.col_counts.assign(col_of.size(), 0);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cells;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t r = row_of.find(truth[i])->second;
    const std::size_t l = col_of.find(pred[i])->second;
    ++c.row_counts[r];
    ++c.col_counts[l];
    ++cells[{r, l}];
  }
  c.cells.reserve(cells.size());
  for (const auto& [key, count] : cells) c.cells.push_back({key.first, key.second, count});
  return c;
}

// Identical partitions up to relabeling: every row and every column holds
// exactly one non-zero cell.
bool partitions_identical(const Contingency& c) {
  if (c.cells.size() != c.row_counts.size() || c.cells.size() != c.col_counts.size()) return false;
  return true;  // each row/col marginal is then covered by exactly one cell
}

double entropy_from_counts(const std::vector<std::size_t>& counts, std::size_t n) {
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = double(c) / double(n);
    h -= p * std::log(p);
  }
  return h;
}

double mi_from_contingency(const Contingency& c) {
  double mi = 0.0;
  for (const Contingency::Cell& cell : c.cells) {
    const double ratio = (double(c.n) * double(cell.count)) /
                         (double(c.row_counts[cell.row]) * double(c.col_counts[cell.col]));
    mi += (double(cell.count) / double(c.n)) * std::log(ratio);
  }
  return mi;
}

// Exact E[MI] under the permutation (generalized hypergeometric) model.
double emi_from_marginals(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                          std::size_t n) {
  std::vector<double> log_fact(n + 1, 0.0);
  for (std::size_t i = 2; i <= n; ++i) log_fact[i] = log_fact[i - 1] + std::log(double(i));

  double emi = 0.0;
  for (std::size_t ai : a) {
    for (std::size_t bj : b) {
      const std::size_t lo = ai + bj > n ? ai + bj - n : 1;
      const std::size_t hi = std::min(ai, bj);
      const double fixed = log_fact[ai] + log_fact[bj] + log_fact[n - ai] + log_fact[n - bj] -
                           log_fact[n];
      for (std::size_t nij = lo; nij <= hi; ++nij) {
        const double ratio = (double(n) * double(nij)) / (double(ai) * double(bj));
        if (ratio == 1.0) continue;  // log term exactly zero
        const double log_p = fixed - log_fact[nij] - log_fact[ai - nij] - log_fact[bj - nij] -
                             log_fact[n - ai - bj + nij];
        emi += (double(nij) / double(n)) * std::log(ratio) * std::exp(log_p);
      }
    }
  }
  return emi;
}

}  // namespace

double mutual_information(const std::vector<std::int32_t>& truth,
                          const std::vector<std::int32_t>& pred) {
  return mi_from_contingency(build_contingency(truth, pred));
}

double expected_mutual_information(const std::vector<std::int32_t>& truth,
                                   const std::vector<std::int32_t>& pred) {
  const Contingency c = build_contingency(truth, pred);
  return emi_from_marginals(c.row_counts, c.col_counts, c.n);
}

double label_entropy(const std::vector<std::int32_t>& labels) {
  if (labels.empty()) throw std::invalid_argument("label_entropy: empty input");
  std::map<std::int32_t, std::size_t> counts;
  for (std::int32_t l : labels) ++counts[l];
  std::vector<std::size_t> flat;
  flat.reserve(counts.size());
  for (const auto& [label, count] : counts) flat.push_back(count);
  return entropy_from_counts(flat, labels.size());
}

double ami(const std::vector<std::int32_t>& truth, const std::vector<std::int32_t>& pred,
           AmiNormalization norm) {
  const Contingency c = build_contingency(truth, pred);
  if (partitions_identical(c)) return 1.0;

  const double mi = mi_from_contingency(c);
  const double emi = emi_from_marginals(c.row_counts, c.col_counts, c.n);
  const double ht = entropy_from_counts(c.row_counts, c.n);
  const double hp = entropy_from_counts(c.col_counts, c.n);
  const double normalizer =
      norm == AmiNormalization::MeanEntropy ? 0.5 * (ht + hp) : std::max(ht, hp);

  double denominator = normalizer - emi;
  // Keep the sign and avoid division by ~0 for near-degenerate inputs.
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (denominator < 0.0)
    denominator = std::min(denominator, -eps);
  else
    denominator = std::max(denominator, eps);
  return (mi - emi) / denominator;
}

void LabeledEvalSet::validate() const {
  if (truth.size() != ids.size() || pred.size() != ids.size() || outlier_score.size() != ids.size())
    throw std::invalid_argument("evalset: columns are not aligned");
}

namespace {

std::vector<std::int32_t> dense_truth_labels(const LabeledEvalSet& evalset,
                                             const std::vector<std::size_t>& subset) {
  std::map<std::string, std::int32_t> label_of;
  std::vector<std::int32_t> out;
  out.reserve(subset.size());
  for (std::size_t i : subset) {
    auto [it, inserted] = label_of.emplace(evalset.truth[i], std::int32_t(label_of.size()));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

EvaluationCurve outlier_curve(const LabeledEvalSet& evalset, std::vector<double> fractions,
                              AmiNormalization norm) {
  evalset.validate();
  const std::size_t n = evalset.size();
  if (n == 0) throw std::invalid_argument("outlier_curve: empty evaluation set");
  for (double f : fractions)
    if (!(f >= 0.0) || f > 1.0)
      throw std::invalid_argument("outlier_curve: fractions must lie in [0,1]");

  std::size_t noise_total = 0;
  for (std::int32_t p : evalset.pred)
    if (p < 0) ++noise_total;
  const double noise_fraction = double(noise_total) / double(n);

  std::optional<double> distinguished;
  if (noise_total > 0) {
    distinguished = noise_fraction;
    fractions.push_back(noise_fraction);
  }
  std::sort(fractions.begin(), fractions.end());
  fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());

  // Exclusion priority: highest score first, ties by lower id.
  std::vector<std::size_t> priority(n);
  std::iota(priority.begin(), priority.end(), std::size_t(0));
  std::sort(priority.begin(), priority.end(), [&](std::size_t x, std::size_t y) {
    if (evalset.outlier_score[x] != evalset.outlier_score[y])
      return evalset.outlier_score[x] > evalset.outlier_score[y];
    return evalset.ids[x] < evalset.ids[y];
  });

  // Noise predictions use one extra label so survivors still form a group.
  std::int32_t noise_label = 0;
  for (std::int32_t p : evalset.pred) noise_label = std::max(noise_label, p);
  ++noise_label;

  EvaluationCurve curve;
  curve.config_meta["n"] = std::to_string(n);
  curve.config_meta["noise_fraction"] = std::to_string(noise_fraction);

  for (double f : fractions) {
    const double target = f * double(n);
    std::size_t m = std::size_t(std::max(0.0, std::ceil(target - 1e-9)));
    m = std::min(m, n);

    std::vector<bool> excluded(n, false);
    for (std::size_t i = 0; i < m; ++i) excluded[priority[i]] = true;
    if (noise_total > 0 && f >= noise_fraction - 1e-12)
      for (std::size_t i = 0; i < n; ++i)
        if (evalset.pred[i] < 0) excluded[i] = true;

    std::vector<std::size_t> kept;
    kept.reserve(n - m);
    for (std::size_t i = 0; i < n; ++i)
      if (!excluded[i]) kept.push_back(i);

    CurvePoint point;
    point.outlier_fraction = f;
    point.n_evaluated = kept.size();
    if (kept.empty()) {
      point.defined = false;
      point.ami = std::numeric_limits<double>::quiet_NaN();
    } else {
      const std::vector<std::int32_t> truth_sub = dense_truth_labels(evalset, kept);
      std::vector<std::int32_t> pred_sub;
      pred_sub.reserve(kept.size());
      for (std::size_t i : kept)
        pred_sub.push_back(evalset.pred[i] < 0 ? noise_label : evalset.pred[i]);
      point.ami = ami(truth_sub, pred_sub, norm);
    }
    curve.points.push_back(point);
  }

  if (distinguished) {
    for (std::size_t i = 0; i < curve.points.size(); ++i)
      if (curve.points[i].outlier_fraction == *distinguished) {
        curve.distinguished_point = i;
        break;
      }
  }
  return curve;
}

EvalFilterResult eval_filter(const std::vector<Annotation>& annotations,
                             const std::vector<std::string>& categories,
                             std::size_t min_instances) {
  if (annotations.size() != categories.size())
    throw std::invalid_argument("eval_filter: column mismatch");
  std::map<std::string, std::size_t> category_counts;
  for (std::size_t i = 0; i < annotations.size(); ++i)
    if (annotations[i] == Annotation::Category) ++category_counts[categories[i]];

  EvalFilterResult result;
  result.keep.assign(annotations.size(), false);
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    switch (annotations[i]) {
      case Annotation::UnknownValid:
        ++result.excluded_unknown;
        break;
      case Annotation::TrackingError:
        ++result.excluded_error;
        break;
      case Annotation::Category: {
        if (category_counts[categories[i]] < min_instances) {
          ++result.excluded_rare;
        } else {
          result.keep[i] = true;
          ++result.retained;
          ++result.retained_per_category[categories[i]];
        }
        break;
      }
    }
  }
  return result;
}

EvalFilterResult eval_filter(const std::vector<AnnotatedTrack>& tracks, std::size_t min_instances) {
  std::vector<Annotation> annotations;
  std::vector<std::string> categories;
  annotations.reserve(tracks.size());
  categories.reserve(tracks.size());
  for (const AnnotatedTrack& t : tracks) {
    annotations.push_back(t.annotation);
    categories.push_back(t.category);
  }
  return eval_filter(annotations, categories, min_instances);
}

CategoryDistribution distribution_report(const std::vector<AnnotatedTrack>& tracks,
                                         std::size_t cutoff) {
  CategoryDistribution dist;
  dist.cutoff = cutoff;
  dist.total_tracks = tracks.size();
  std::map<std::string, std::size_t> counts;
  for (const AnnotatedTrack& t : tracks) {
    switch (t.annotation) {
      case Annotation::Category:
        ++counts[t.category];
        ++dist.labeled_tracks;
        break;
      case Annotation::UnknownValid:
        ++dist.unknown_tracks;
        ++dist.labeled_tracks;
        break;
      case Annotation::TrackingError:
        ++dist.error_tracks;
        ++dist.labeled_tracks;
        break;
    }
  }
  dist.counts.assign(counts.begin(), counts.end());
  std::sort(dist.counts.begin(), dist.counts.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  for (const auto& [category, count] : dist.counts)
    if (count < cutoff) ++dist.categories_below_cutoff;
  dist.error_rate = dist.total_tracks > 0 ? double(dist.error_tracks) / double(dist.total_tracks) : 0.0;
  return dist;
}

std::string CategoryDistribution::to_text() const {
  std::ostringstream out;
  out << "tracks total:   " << total_tracks << "\n";
  out << "tracks labeled: " << labeled_tracks << "\n";
  out << "tracks unknown: " << unknown_tracks << "\n";
  out << "tracking errors: " << error_tracks << " (" << std::fixed << std::setprecision(1)
      << error_rate * 100.0 << "%)\n";
  out << "categories below cutoff " << cutoff << ": " << categories_below_cutoff << "\n";
  for (const auto& [category, count] : counts) {
    out << "  " << std::left << std::setw(24) << category << std::right << std::setw(8) << count;
    if (count < cutoff) out << "   (below cutoff)";
    out << "\n";
  }
  return out.str();
}

ClusterSummary cluster_report(const std::vector<std::int32_t>& assignments,
                              const LabeledEvalSet& evalset, std::size_t min_cluster_display,
                              const std::set<std::string>& known_categories) {
  evalset.validate();
  if (assignments.size() != evalset.size())
    throw std::invalid_argument("cluster_report: assignment count mismatch");

  std::map<std::int32_t, std::map<std::string, std::size_t>> per_cluster;
  ClusterSummary summary;
  summary.min_cluster_display = min_cluster_display;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] < 0) {
      ++summary.noise_points;
      continue;
    }
    ++per_cluster[assignments[i]][evalset.truth[i]];
  }
  summary.total_clusters = per_cluster.size();

  for (const auto& [label, counts] : per_cluster) {
    ClusterRow row;
    row.label = label;
    for (const auto& [category, count] : counts) {
      row.size += count;
      if (count > row.dominant_count) {  // ties keep the earlier name
        row.dominant_count = count;
        row.dominant_category = category;
      }
    }
    row.purity = double(row.dominant_count) / double(row.size);
    row.novel = !known_categories.empty() && known_categories.count(row.dominant_category) == 0;
    if (row.size >= min_cluster_display) summary.clusters.push_back(row);
  }
  std::sort(summary.clusters.begin(), summary.clusters.end(),
            [](const ClusterRow& x, const ClusterRow& y) {
              if (x.size != y.size) return x.size > y.size;
              return x.label < y.label;
            });
  return summary;
}

std::string ClusterSummary::to_text() const {
  std::ostringstream out;
  out << "clusters: " << total_clusters << "  noise points: " << noise_points
      << "  (showing clusters with >= " << min_cluster_display << " tracks)\n";
  out << std::left << std::setw(8) << "label" << std::setw(10) << "size" << std::setw(24)
      << "dominant" << std::setw(10) << "purity" << "novel\n";
  for (const ClusterRow& row : clusters) {
    out << std::left << std::setw(8) << row.label << std::setw(10) << row.size << std::setw(24)
        << row.dominant_category << std::setw(10) << std::fixed << std::setprecision(3)
        << row.purity << (row.novel ? "yes" : "-") << "\n";
  }
  return out.str();
}

}  // namespace trackmine
