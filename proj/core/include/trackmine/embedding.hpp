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

#include <cstddef>
#include <string>
#include <vector>

#include "trackmine/types.hpp"

namespace trackmine {

/// One representative vector per track.
struct TrackEmbedding {
  std::string track_id;
  std::vector<float> vector;
  /// Row of the chosen crop within the track's crop matrix; npos when the
  /// vector is a computed mean rather than a verbatim crop row.
  std::size_t source_crop_index = 0;

  static constexpr std::size_t kMeanVector = std::size_t(-1);
};

enum class SummaryMode : std::uint8_t {
  ClosestToMean,  // the crop row nearest the per-track mean, verbatim
  Mean,           // the arithmetic mean itself
};

/// Pick the representative embedding for one track's crop rows: the row
/// minimizing Euclidean distance to the mean of all rows, ties to the
/// lowest row index. Throws std::invalid_argument on zero rows.
TrackEmbedding representative_embedding(const EmbeddingMatrix& crop_embeddings,
                                        const std::string& track_id,
                                        SummaryMode mode = SummaryMode::ClosestToMean);

/// Group crop rows by track (row ids "<track>#<n>") and summarize each
/// group. Rows whose ids carry no '#' are treated as one-crop tracks.
/// Output rows are ordered by first appearance of each track.
EmbeddingMatrix summarize_tracks(const EmbeddingMatrix& crop_embeddings,
                                 SummaryMode mode = SummaryMode::ClosestToMean);

/// Principal-component model fitted on an embedding matrix. Component rows
/// are orthonormal, ordered by non-increasing explained variance, with the
/// sign convention that each row's largest-magnitude entry is positive.
struct PcaModel {
  std::size_t dims = 0;  // input dimensionality
  std::size_t k = 0;     // components kept
  std::vector<double> mean;                // dims
  std::vector<double> components;          // k x dims, row-major
  std::vector<double> explained_variance;  // k, non-increasing
};

/// Fit by eigendecomposition of the sample covariance (1/(N-1)).
/// Requires rows >= 2 and 1 <= k <= min(rows-1, dims); throws
/// std::invalid_argument otherwise or on non-finite data.
PcaModel pca_fit(const EmbeddingMatrix& data, std::size_t k);

/// Project (data - mean) onto the model components; output has k dims.
/// Throws std::invalid_argument on dimensionality mismatch.
EmbeddingMatrix pca_transform(const PcaModel& model, const EmbeddingMatrix& data);

/// Map back into the original space: mean + projected * components.
EmbeddingMatrix pca_inverse_transform(const PcaModel& model, const EmbeddingMatrix& reduced);

}  // namespace trackmine
