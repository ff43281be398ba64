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

#include "trackmine/embedding.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace trackmine {

TrackEmbedding representative_embedding(const EmbeddingMatrix& crop_embeddings,
                                        const std::string& track_id, SummaryMode mode) {
  crop_embeddings.validate();
  const std::size_t n = crop_embeddings.rows, dims = crop_embeddings.dims;
  if (n == 0) throw std::invalid_argument("representative_embedding: no crop rows");

  std::vector<double> mean(dims, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const float* row = crop_embeddings.row(r);
    for (std::size_t d = 0; d < dims; ++d) mean[d] += row[d];
  }
  for (double& v : mean) v /= double(n);

  TrackEmbedding out;
  out.track_id = track_id;
  if (mode == SummaryMode::Mean) {
    out.source_crop_index = TrackEmbedding::kMeanVector;
    out.vector.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) out.vector[d] = float(mean[d]);
    return out;
  }

  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < n; ++r) {
    const float* row = crop_embeddings.row(r);
    double d2 = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = double(row[d]) - mean[d];
      d2 += diff * diff;
    }
    if (d2 < best_d2) {  // strict: ties keep the lowest row index
      best_d2 = d2;
      best = r;
    }
  }
  out.source_crop_index = best;
  out.vector.assign(crop_embeddings.row(best), crop_embeddings.row(best) + dims);
  return out;
}

EmbeddingMatrix summarize_tracks(const EmbeddingMatrix& crop_embeddings, SummaryMode mode) {
  crop_embeddings.validate();
  const std::size_t dims = crop_embeddings.dims;

  // Group rows by the id prefix before '#', keeping first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < crop_embeddings.rows; ++r) {
    const std::string& id = crop_embeddings.row_ids[r];
    std::string track = id.substr(0, id.find('#'));
    auto [it, inserted] = groups.emplace(std::move(track), std::vector<std::size_t>{});
    if (inserted) order.push_back(it->first);
    it->second.push_back(r);
  }

  EmbeddingMatrix out;
  out.rows = order.size();
  out.dims = dims;
  out.data.reserve(out.rows * dims);
  out.row_ids.reserve(out.rows);
  EmbeddingMatrix scratch;
  scratch.dims = dims;
  for (const std::string& track : order) {
    const std::vector<std::size_t>& rows = groups[track];
    scratch.rows = rows.size();
    scratch.data.clear();
    scratch.row_ids.assign(rows.size(), "");
    for (std::size_t r : rows) {
      const float* src = crop_embeddings.row(r);
      scratch.data.insert(scratch.data.end(), src, src + dims);
    }
    TrackEmbedding rep = representative_embedding(scratch, track, mode);
    out.data.insert(out.data.end(), rep.vector.begin(), rep.vector.end());
    out.row_ids.push_back(track);
  }
  return out;
}

namespace {

Eigen::MatrixXd to_eigen(const EmbeddingMatrix& data) {
  Eigen::MatrixXd m(Eigen::Index(data.rows), Eigen::Index(data.dims));
  for (std::size_t r = 0; r < data.rows; ++r)
    for (std::size_t d = 0; d < data.dims; ++d) m(Eigen::Index(r), Eigen::Index(d)) = data.row(r)[d];
  return m;
}

// Sign convention: the entry of largest magnitude (lowest index wins ties)
// must be positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index pivot = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      pivot = i;
    }
  if (v[pivot] < 0.0) v = -v;
}

}  // namespace

PcaModel pca_fit(const EmbeddingMatrix& data, std::size_t k) {
  data.validate();
  if (data.rows < 2) throw std::invalid_argument("pca_fit: need at least 2 rows");
  const std::size_t max_k = std::min(data.rows - 1, data.dims);
  if (k < 1 || k > max_k)
    throw std::invalid_argument("pca_fit: k must be in [1, min(rows-1, dims)]");

  Eigen::MatrixXd x = to_eigen(data);
  Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / double(data.rows - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("pca_fit: eigensolver failed");
  // Eigen returns ascending eigenvalues; take the top k in reverse.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  PcaModel model;
  model.dims = data.dims;
  model.k = k;
  model.mean.assign(mean.data(), mean.data() + mean.size());
  model.components.resize(k * data.dims);
  model.explained_variance.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const Eigen::Index col = Eigen::Index(data.dims - 1 - c);
    Eigen::VectorXd component = vectors.col(col);
    fix_sign(component);
    for (std::size_t d = 0; d < data.dims; ++d) model.components[c * data.dims + d] = component[Eigen::Index(d)];
    model.explained_variance[c] = std::max(values[col], 0.0);
  }
  return model;
}

EmbeddingMatrix pca_transform(const PcaModel& model, const EmbeddingMatrix& data) {
  data.validate();
  if (data.dims != model.dims) throw std::invalid_argument("pca_transform: dimension mismatch");

  EmbeddingMatrix out;
  out.rows = data.rows;
  out.dims = model.k;
  out.data.resize(out.rows * out.dims);
  out.row_ids = data.row_ids;
  for (std::size_t r = 0; r < data.rows; ++r) {
    const float* row = data.row(r);
    for (std::size_t c = 0; c < model.k; ++c) {
      const double* comp = model.components.data() + c * model.dims;
      double acc = 0.0;
      for (std::size_t d = 0; d < model.dims; ++d)
        acc += (double(row[d]) - model.mean[d]) * comp[d];
      out.data[r * model.k + c] = float(acc);
    }
  }
  return out;
}

EmbeddingMatrix pca_inverse_transform(const PcaModel& model, const EmbeddingMatrix& reduced) {
  reduced.validate();
  if (reduced.dims != model.k)
    throw std::invalid_argument("pca_inverse_transform: dimension mismatch");

  EmbeddingMatrix out;
  out.rows = reduced.rows;
  out.dims = model.dims;
  out.data.resize(out.rows * out.dims);
  out.row_ids = reduced.row_ids;
  for (std::size_t r = 0; r < reduced.rows; ++r) {
    const float* row = reduced.row(r);
    for (std::size_t d = 0; d < model.dims; ++d) {
      double acc = model.mean[d];
      for (std::size_t c = 0; c < model.k; ++c)
        acc += double(row[c]) * model.components[c * model.dims + d];
      out.data[r * model.dims + d] = float(acc);
    }
  }
  return out;
}

}  // namespace trackmine
