/**
 * Copyright 2026 The fedhip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fedhip/client_engine.hpp"

#include <cmath>
#include <sstream>

#include "fedhip/errors.hpp"

namespace fedhip {

void FeatureBundle::validate() const {
  if (features.rows() < 1) {
    throw DataError("bundle for client " + std::to_string(client_id) + " has no samples");
  }
  if (labels.rows() != features.rows()) {
    throw DataError("bundle for client " + std::to_string(client_id) + ": feature and label row counts differ");
  }
  if (labels.cols() != static_cast<Eigen::Index>(class_count)) {
    throw DataError("bundle for client " + std::to_string(client_id) + ": label width differs from class count");
  }
  for (Eigen::Index i = 0; i < labels.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index j = 0; j < labels.cols(); ++j) {
      const double v = labels(i, j);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        ones = -1;
        break;
      }
    }
    if (ones != 1) {
      std::ostringstream msg;
      msg << "bundle for client " << client_id << ": label row " << i << " is not one-hot";
      throw DataError(msg.str());
    }
  }
}

LocalArtifacts local_train(ClientId id, const Matrix &features, const Matrix &labels, double beta) {
  if (features.rows() != labels.rows()) {
    throw UsageError("local_train: features and labels have different row counts");
  }
  LocalArtifacts out;
  out.client_id = id;
  out.gram = regularized_gram(features, beta);
  out.model = solve_spd(out.gram, features.transpose() * labels);
  return out;
}

LocalArtifacts local_train(const FeatureBundle &bundle, double beta) {
  bundle.validate();
  return local_train(bundle.client_id, bundle.features, bundle.labels, beta);
}

SpdMatrix weighted_gram(const FeatureBundle &bundle, double alpha, double beta) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw UsageError("weighted_gram: alpha must be finite and >= 0");
  }
  if (!all_finite(bundle.features)) {
    throw DataError("weighted_gram: feature matrix contains non-finite entries");
  }
  Matrix gram = alpha * (bundle.features.transpose() * bundle.features);
  gram.diagonal().array() += beta;
  return SpdMatrix(std::move(gram));
}

PersonalizedModel personalize(const SpdMatrix &cumulative_gram, const Matrix &fusion, const FeatureBundle &bundle,
                              double alpha, double beta, std::uint32_t client_count) {
  bundle.validate();
  const Eigen::Index m = bundle.feature_dim();
  const Eigen::Index d = bundle.labels.cols();
  if (cumulative_gram.dim() != m || fusion.rows() != m || fusion.cols() != d) {
    std::ostringstream msg;
    msg << "client " << bundle.client_id << " expects S " << m << "x" << m << " and M " << m << "x" << d
        << ", received S " << cumulative_gram.dim() << "x" << cumulative_gram.dim() << " and M " << fusion.rows()
        << "x" << fusion.cols();
    throw ProtocolError(msg.str());
  }
  if (client_count < 1) {
    throw ProtocolError("personalize: aggregate covers zero clients");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw UsageError("personalize: alpha must be finite and >= 0");
  }

  const Matrix &f = bundle.features;
  Matrix system = cumulative_gram.matrix();
  system.diagonal().array() -= static_cast<double>(client_count - 1) * beta;
  system += alpha * (f.transpose() * f);
  Matrix rhs = cumulative_gram.matrix() * fusion;
  rhs += alpha * (f.transpose() * bundle.labels);

  PersonalizedModel out;
  out.client_id = bundle.client_id;
  out.weights = solve_spd(SpdMatrix(std::move(system)), rhs);
  out.alpha = alpha;
  out.beta = beta;
  return out;
}

std::vector<Label> predict(const Matrix &weights, const Matrix &test_features) {
  if (test_features.cols() != weights.rows()) {
    throw UsageError("predict: test feature width does not match model rows");
  }
  const Matrix scores = test_features * weights;
  std::vector<Label> out(static_cast<std::size_t>(scores.rows()), 0);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) {
        best = j;
      }
    }
    out[static_cast<std::size_t>(i)] = static_cast<Label>(best);
  }
  return out;
}

double accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) {
    throw UsageError("accuracy: prediction and truth lengths differ");
  }
  if (truth.empty()) {
    throw UsageError("accuracy: empty evaluation set");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    hits += predicted[i] == truth[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace fedhip
