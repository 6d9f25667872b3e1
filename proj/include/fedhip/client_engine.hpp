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

#ifndef FEDHIP_CLIENT_ENGINE_HPP_
#define FEDHIP_CLIENT_ENGINE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "fedhip/analytic_core.hpp"

namespace fedhip {

using ClientId = std::uint32_t;
using Label = std::uint32_t;

/// A client's extracted features and one-hot labels.
struct FeatureBundle {
  ClientId client_id = 0;
  Matrix features;  // N x m
  Matrix labels;    // N x d, one-hot
  std::uint32_t class_count = 0;

  Eigen::Index samples() const noexcept { return features.rows(); }
  Eigen::Index feature_dim() const noexcept { return features.cols(); }

  /// Throws DataError unless N >= 1, shapes agree and every label row is one-hot.
  void validate() const;
};

/// The uplink payload: regularized Gram matrix and local ridge model.
struct LocalArtifacts {
  ClientId client_id = 0;
  SpdMatrix gram;  // C_k, m x m
  Matrix model;    // L_k, m x d
};

struct PersonalizedModel {
  ClientId client_id = 0;
  Matrix weights;  // m x d
  double alpha = 0.0;
  double beta = 0.0;
};

/// Phase 1 on raw matrices. The labels need not be one-hot, which is what
/// the privacy check relies on when it mixes rows with an orthogonal U.
LocalArtifacts local_train(ClientId id, const Matrix &features, const Matrix &labels, double beta);

LocalArtifacts local_train(const FeatureBundle &bundle, double beta);

/// alpha F^T F + beta I.
SpdMatrix weighted_gram(const FeatureBundle &bundle, double alpha, double beta);

/// Phase 3. Solves (S_K + alpha F^T F + beta I - K beta I) P = S_K M_K + alpha F^T Y.
///
/// The system matrix is assembled as (S_K - (K - 1) beta I) + alpha F^T F so
/// that alpha = 0 reproduces the global-model solve bit for bit.
/// Throws ProtocolError if S_K / M_K do not match the bundle's m and d.
PersonalizedModel personalize(const SpdMatrix &cumulative_gram, const Matrix &fusion, const FeatureBundle &bundle,
                              double alpha, double beta, std::uint32_t client_count);

/// Row-wise argmax of F_test * P; ties go to the lowest class index.
std::vector<Label> predict(const Matrix &weights, const Matrix &test_features);

/// Fraction of exact matches. Throws UsageError on length mismatch or empty input.
double accuracy(std::span<const Label> predicted, std::span<const Label> truth);

}  // namespace fedhip

#endif  // FEDHIP_CLIENT_ENGINE_HPP_
