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

#include <gtest/gtest.h>

#include "fedhip/analytic_core.hpp"
#include "fedhip/errors.hpp"
#include "fedhip/oracle_verify.hpp"
#include "test_util.hpp"

namespace fedhip {
namespace {

using testing::max_abs;
using testing::random_matrix;
using testing::random_spd;

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto &r : rows) {
    Eigen::Index j = 0;
    for (const double v : r) {
      out(i, j++) = v;
    }
    ++i;
  }
  return out;
}

TEST(RegularizedGram, IdentityFeatures) {
  EXPECT_EQ(regularized_gram(Matrix::Identity(2, 2), 1.0).matrix(), 2.0 * Matrix::Identity(2, 2));
}

TEST(RegularizedGram, ZeroFeatures) {
  EXPECT_EQ(regularized_gram(Matrix::Zero(3, 2), 2.0).matrix(), 2.0 * Matrix::Identity(2, 2));
}

TEST(RegularizedGram, MatchesLoopProduct) {
  const Matrix f = mat({{1, 2}, {3, 4}});
  // Frozen from reference::transpose_multiply: [[1*1+3*3, 1*2+3*4], [.., 2*2+4*4]].
  const Matrix expected = mat({{10, 14}, {14, 20}});
  EXPECT_EQ(reference::transpose_multiply(f, f), expected);
  EXPECT_EQ(regularized_gram(f, 0.0).matrix(), expected);
}

TEST(RegularizedGram, ExactlySymmetric) {
  const SpdMatrix g = regularized_gram(random_matrix(37, 11, 3), 0.25);
  EXPECT_EQ(g.matrix(), Matrix(g.matrix().transpose()));
}

TEST(RegularizedGram, RejectsNonFinite) {
  Matrix f = Matrix::Ones(3, 2);
  f(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(regularized_gram(f, 1.0), DataError);
  f(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(regularized_gram(f, 1.0), DataError);
}

TEST(RegularizedGram, MinEigenvalueAtLeastBeta) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double beta = 0.01 * static_cast<double>(seed + 1);
    // Fewer rows than columns: the Gram part is rank deficient.
    const SpdMatrix g = regularized_gram(random_matrix(3 + seed % 5, 9, seed), beta);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g.matrix());
    EXPECT_GE(eig.eigenvalues().minCoeff(), beta - 1e-10) << "seed " << seed;
  }
}

TEST(SolveSpd, ScaledIdentity) {
  const Matrix x = solve_spd(SpdMatrix(2.0 * Matrix::Identity(2, 2)), Matrix::Identity(2, 2));
  EXPECT_LE(max_abs(x - 0.5 * Matrix::Identity(2, 2)), 1e-15);
}

TEST(SolveSpd, Diagonal) {
  const Matrix x = solve_spd(SpdMatrix(mat({{1, 0}, {0, 4}})), mat({{2}, {8}}));
  EXPECT_LE(max_abs(x - mat({{2}, {2}})), 1e-15);
}

TEST(SolveSpd, MatchesEliminationOracle) {
  const Matrix a = random_spd(8, 42);
  const Matrix b = random_matrix(8, 3, 43);
  const Matrix x = solve_spd(SpdMatrix(a), b);
  EXPECT_LE(max_abs(x - reference::solve(a, b)), 1e-10);
}

TEST(SolveSpd, ResidualBound) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Matrix a = random_spd(5 + static_cast<Eigen::Index>(seed), seed, 0.1);
    const Matrix b = 10.0 * random_matrix(a.rows(), 4, seed + 100);
    const Matrix x = solve_spd(SpdMatrix(a), b);
    EXPECT_LE(max_abs(a * x - b), 1e-9 * (1.0 + max_abs(b))) << "seed " << seed;
  }
}

TEST(SolveSpd, RecoversKnownSolution) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Matrix a = random_spd(12, seed, 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    ASSERT_LE(eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff(), 1e6);
    const Matrix x0 = random_matrix(12, 3, seed + 7);
    const Matrix x = solve_spd(SpdMatrix(a), a * x0);
    EXPECT_LE(max_abs(x - x0) / max_abs(x0), 1e-9) << "seed " << seed;
  }
}

TEST(SolveSpd, SingularReportsPivot) {
  // Rank one at beta = 0.
  const Matrix f = mat({{1, 2, 3}});
  const SpdMatrix g = regularized_gram(f, 0.0);
  try {
    solve_spd(g, Matrix::Ones(3, 1));
    FAIL() << "expected SingularityError";
  } catch (const SingularityError &e) {
    EXPECT_LT(e.pivot(), 3u);
    EXPECT_NE(std::string(e.what()).find("pivot"), std::string::npos);
  }
}

TEST(SolveSpd, IndefiniteRejected) {
  EXPECT_THROW(solve_spd(SpdMatrix(mat({{1, 0}, {0, -1}})), Matrix::Ones(2, 1)), SingularityError);
}

TEST(SolveSpd, ShapeMismatch) {
  EXPECT_THROW(solve_spd(SpdMatrix(Matrix::Identity(3, 3)), Matrix::Ones(2, 1)), UsageError);
}

TEST(RidgeFit, Identity) {
  const Matrix eye = Matrix::Identity(2, 2);
  EXPECT_LE(max_abs(ridge_fit(eye, eye, 0.0) - eye), 1e-15);
  EXPECT_LE(max_abs(ridge_fit(eye, eye, 1.0) - 0.5 * eye), 1e-15);
}

TEST(RidgeFit, MatchesExplicitInverseOracle) {
  const Matrix f = random_matrix(20, 5, 1);
  const Matrix y = random_matrix(20, 3, 2);
  Matrix gram = reference::transpose_multiply(f, f);
  gram.diagonal().array() += 0.1;
  // Explicit inverse column by column through the elimination oracle.
  const Matrix inverse = reference::solve(gram, Matrix::Identity(5, 5));
  const Matrix expected = reference::multiply(inverse, reference::transpose_multiply(f, y));
  EXPECT_LE(max_abs(ridge_fit(f, y, 0.1) - expected), 1e-9);
}

TEST(RidgeFit, SingularAtBetaZero) {
  EXPECT_THROW(ridge_fit(Matrix::Ones(2, 4), Matrix::Ones(2, 2), 0.0), SingularityError);
}

TEST(RidgeFit, RowMismatch) { EXPECT_THROW(ridge_fit(Matrix::Ones(3, 2), Matrix::Ones(4, 2), 1.0), UsageError); }

TEST(RidgeFit, ScaleConsistent) {
  const Matrix f = random_matrix(30, 6, 5);
  const Matrix y = random_matrix(30, 2, 6);
  const double beta = 0.7;
  const Matrix base = ridge_fit(f, y, beta);
  for (const double c : {0.5, 2.0, 10.0}) {
    EXPECT_LE(max_abs(ridge_fit(c * f, c * y, c * c * beta) - base), 1e-9) << "c = " << c;
  }
}

TEST(RandomSemiOrthogonal, OneByOne) {
  const Matrix u = random_semi_orthogonal(1, 9);
  ASSERT_EQ(u.rows(), 1);
  EXPECT_DOUBLE_EQ(std::abs(u(0, 0)), 1.0);
}

TEST(RandomSemiOrthogonal, Deterministic) {
  EXPECT_EQ(random_semi_orthogonal(7, 123), random_semi_orthogonal(7, 123));
  EXPECT_NE(random_semi_orthogonal(7, 123), random_semi_orthogonal(7, 124));
}

TEST(RandomSemiOrthogonal, Orthogonal) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix u = random_semi_orthogonal(6, seed);
    EXPECT_LE(max_abs(u.transpose() * u - Matrix::Identity(6, 6)), 1e-10);
  }
}

TEST(RandomSemiOrthogonal, TallHasOrthonormalColumns) {
  const Matrix u = random_semi_orthogonal(15, 4, 77);
  ASSERT_EQ(u.rows(), 15);
  ASSERT_EQ(u.cols(), 4);
  EXPECT_LE(max_abs(u.transpose() * u - Matrix::Identity(4, 4)), 1e-10);
  EXPECT_THROW(random_semi_orthogonal(3, 4, 1), UsageError);
}

}  // namespace
}  // namespace fedhip
