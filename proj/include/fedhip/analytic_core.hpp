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

#ifndef FEDHIP_ANALYTIC_CORE_HPP_
#define FEDHIP_ANALYTIC_CORE_HPP_

#include <cstdint>

#include <Eigen/Dense>

namespace fedhip {

/// Dense row-major 64-bit matrix. Every derived quantity in the protocol
/// (features, labels, Gram matrices, models) lives in one of these.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

bool all_finite(const Matrix &a);

/// Symmetric matrix whose upper and lower triangles agree bit for bit.
///
/// Construction symmetrizes the input as (A + A^T) / 2. Positive
/// definiteness is not checked here; it is established by the regularizer
/// of whoever builds the matrix and verified lazily by solve_spd.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(Matrix a);

  static SpdMatrix zero(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return data_.rows(); }
  const Matrix &matrix() const noexcept { return data_; }
  double operator()(Eigen::Index r, Eigen::Index c) const { return data_(r, c); }

  /// this + other - shift * I, symmetrized.
  SpdMatrix plus(const SpdMatrix &other) const;
  SpdMatrix shifted(double shift) const;

  friend bool operator==(const SpdMatrix &a, const SpdMatrix &b) { return a.data_ == b.data_; }

 private:
  Matrix data_;
};

/// F^T F + beta I. Throws DataError on non-finite input.
SpdMatrix regularized_gram(const Matrix &features, double beta);

/// Solves A X = B with a Cholesky factorization. When Cholesky breaks down
/// the solve falls back to a pivoted LDL^T; a non-positive pivot there is
/// reported as SingularityError. No inverse is ever formed.
Matrix solve_spd(const SpdMatrix &a, const Matrix &b);

/// (F^T F + beta I)^{-1} F^T Y.
Matrix ridge_fit(const Matrix &features, const Matrix &targets, double beta);

/// Orthogonal n x n matrix from the QR factorization of a seeded Gaussian
/// matrix, with columns sign-fixed so that diag(R) > 0.
Matrix random_semi_orthogonal(Eigen::Index n, std::uint64_t seed);

/// rows x cols matrix U with U^T U = I (rows >= cols).
Matrix random_semi_orthogonal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// Seeded standard-normal matrix; shared by the synthetic generators.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

}  // namespace fedhip

#endif  // FEDHIP_ANALYTIC_CORE_HPP_
