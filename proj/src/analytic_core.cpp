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

#include "fedhip/analytic_core.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fedhip/errors.hpp"

namespace fedhip {

namespace {

Matrix symmetrize(const Matrix &a) { return (a + a.transpose()) * 0.5; }

// Smallest pivot accepted relative to the largest diagonal entry.
double pivot_floor(const Matrix &a) {
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  return static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * scale;
}

Matrix pivoted_fallback(const Matrix &a, const Matrix &b) {
  Eigen::LDLT<Matrix> ldlt(a);
  const Eigen::VectorXd d = ldlt.vectorD();
  Eigen::VectorXi original = Eigen::VectorXi::LinSpaced(a.rows(), 0, static_cast<int>(a.rows()) - 1);
  original = ldlt.transpositionsP() * original;
  const double floor = pivot_floor(a);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > floor)) {
      std::ostringstream msg;
      msg << "matrix is not positive definite: pivot " << i << " (row " << original(i) << ") is " << d(i)
          << ", floor " << floor;
      throw SingularityError(msg.str(), static_cast<std::size_t>(original(i)));
    }
  }
  return ldlt.solve(b);
}

}  // namespace

bool all_finite(const Matrix &a) { return a.allFinite(); }

SpdMatrix::SpdMatrix(Matrix a) {
  if (a.rows() != a.cols()) {
    throw UsageError("SpdMatrix requires a square matrix");
  }
  data_ = symmetrize(a);
}

SpdMatrix SpdMatrix::zero(Eigen::Index dim) { return SpdMatrix(Matrix::Zero(dim, dim)); }

SpdMatrix SpdMatrix::plus(const SpdMatrix &other) const {
  if (other.dim() != dim()) {
    throw UsageError("SpdMatrix::plus dimension mismatch");
  }
  // A sum of two exactly symmetric matrices is exactly symmetric.
  SpdMatrix out;
  out.data_ = data_ + other.data_;
  return out;
}

SpdMatrix SpdMatrix::shifted(double shift) const {
  SpdMatrix out = *this;
  out.data_.diagonal().array() -= shift;
  return out;
}

SpdMatrix regularized_gram(const Matrix &features, double beta) {
  if (features.cols() < 1) {
    throw UsageError("regularized_gram: feature dimension must be >= 1");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw UsageError("regularized_gram: beta must be finite and >= 0");
  }
  if (!all_finite(features)) {
    throw DataError("regularized_gram: feature matrix contains non-finite entries");
  }
  Matrix gram = features.transpose() * features;
  gram.diagonal().array() += beta;
  return SpdMatrix(std::move(gram));
}

Matrix solve_spd(const SpdMatrix &a, const Matrix &b) {
  if (a.dim() != b.rows()) {
    std::ostringstream msg;
    msg << "solve_spd: lhs is " << a.dim() << "x" << a.dim() << " but rhs has " << b.rows() << " rows";
    throw UsageError(msg.str());
  }
  if (a.dim() == 0) {
    return Matrix(0, b.cols());
  }
  Eigen::LLT<Matrix> llt(a.matrix());
  if (llt.info() == Eigen::Success) {
    const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().array().square();
    if (pivots.minCoeff() > pivot_floor(a.matrix())) {
      return llt.solve(b);
    }
  }
  return pivoted_fallback(a.matrix(), b);
}

Matrix ridge_fit(const Matrix &features, const Matrix &targets, double beta) {
  if (features.rows() != targets.rows()) {
    throw UsageError("ridge_fit: features and targets have different row counts");
  }
  if (!all_finite(targets)) {
    throw DataError("ridge_fit: target matrix contains non-finite entries");
  }
  const SpdMatrix gram = regularized_gram(features, beta);
  return solve_spd(gram, features.transpose() * targets);
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      g(i, j) = normal(rng);
    }
  }
  return g;
}

Matrix random_semi_orthogonal(Eigen::Index n, std::uint64_t seed) { return random_semi_orthogonal(n, n, seed); }

Matrix random_semi_orthogonal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  if (cols < 1 || rows < cols) {
    throw UsageError("random_semi_orthogonal: need rows >= cols >= 1");
  }
  const Matrix g = gaussian_matrix(rows, cols, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Eigen::VectorXd r_diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (r_diag(j) < 0.0) {
      q.col(j) *= -1.0;
    }
  }
  return q;
}

}  // namespace fedhip
