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

#include "fedhip/client_engine.hpp"
#include "fedhip/errors.hpp"
#include "fedhip/oracle_verify.hpp"
#include "fedhip/server_aggregator.hpp"
#include "test_util.hpp"

namespace fedhip {
namespace {

using testing::max_abs;
using testing::random_bundle;
using testing::random_clients;
using testing::random_matrix;

FeatureBundle identity_bundle(Eigen::Index n) {
  FeatureBundle b;
  b.features = Matrix::Identity(n, n);
  b.labels = Matrix::Identity(n, n);
  b.class_count = static_cast<std::uint32_t>(n);
  return b;
}

AggregatorState fold_all(const std::vector<FeatureBundle> &clients, double beta) {
  AggregatorState s = init_state(clients.front().feature_dim(), clients.front().labels.cols(), beta);
  for (const auto &c : clients) {
    s = absorb(s, local_train(c, beta));
  }
  return s;
}

TEST(FeatureBundle, RejectsBadLabelRows) {
  FeatureBundle b = identity_bundle(3);
  b.labels(1, 2) = 1.0;
  EXPECT_THROW(b.validate(), DataError);
  b = identity_bundle(3);
  b.labels(0, 0) = 0.5;
  EXPECT_THROW(b.validate(), DataError);
  b = identity_bundle(3);
  b.features = Matrix(0, 3);
  b.labels = Matrix(0, 3);
  EXPECT_THROW(b.validate(), DataError);
}

TEST(LocalTrain, IdentityBundle) {
  const LocalArtifacts art = local_train(identity_bundle(3), 1.0);
  EXPECT_EQ(art.gram.matrix(), 2.0 * Matrix::Identity(3, 3));
  EXPECT_LE(max_abs(art.model - 0.5 * Matrix::Identity(3, 3)), 1e-15);
}

TEST(LocalTrain, SingleSample) {
  FeatureBundle b;
  b.features = Matrix{{1.0, 0.0}};
  b.labels = Matrix{{1.0, 0.0}};
  b.class_count = 2;
  const LocalArtifacts art = local_train(b, 1.0);
  EXPECT_EQ(art.gram.matrix(), (Matrix{{2.0, 0.0}, {0.0, 1.0}}));
  EXPECT_LE(max_abs(art.model - Matrix{{0.5, 0.0}, {0.0, 0.0}}), 1e-15);
}

TEST(LocalTrain, MatchesRidgeOracle) {
  const FeatureBundle b = random_bundle(0, 30, 6, 4, 11);
  const LocalArtifacts art = local_train(b, 0.5);
  const FeatureBundle one[] = {b};
  EXPECT_LE(max_abs(art.model - batch_global_oracle(one, 0.5)), 1e-10);
}

TEST(LocalTrain, DefiningRelation) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FeatureBundle b = random_bundle(0, 5 + static_cast<Eigen::Index>(seed) * 3, 9, 3, seed);
    const LocalArtifacts art = local_train(b, 0.1);
    const Matrix fty = b.features.transpose() * b.labels;
    EXPECT_LE(max_abs(art.gram.matrix() * art.model - fty), 1e-8 * (1.0 + max_abs(fty)));
  }
}

TEST(LocalTrain, OrthogonalMixingIsInvisible) {
  const FeatureBundle b = random_bundle(3, 25, 7, 4, 5);
  const LocalArtifacts base = local_train(b, 0.3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Matrix u = random_semi_orthogonal(b.samples(), seed);
    const LocalArtifacts mixed = local_train(b.client_id, u * b.features, u * b.labels, 0.3);
    EXPECT_LE(max_abs(mixed.gram.matrix() - base.gram.matrix()), 1e-9);
    EXPECT_LE(max_abs(mixed.model - base.model), 1e-9);
  }
  // A taller semi-orthogonal U changes the sample count but not the upload.
  const Matrix tall = random_semi_orthogonal(40, b.samples(), 99);
  const LocalArtifacts grown = local_train(b.client_id, tall * b.features, tall * b.labels, 0.3);
  EXPECT_LE(max_abs(grown.model - base.model), 1e-9);
}

TEST(WeightedGram, AlphaZero) {
  const FeatureBundle b = random_bundle(0, 10, 4, 2, 1);
  EXPECT_EQ(weighted_gram(b, 0.0, 2.0).matrix(), 2.0 * Matrix::Identity(4, 4));
}

TEST(WeightedGram, AlphaOneIsRegularizedGram) {
  const FeatureBundle b = random_bundle(0, 10, 4, 2, 1);
  EXPECT_EQ(weighted_gram(b, 1.0, 0.3), regularized_gram(b.features, 0.3));
}

TEST(WeightedGram, MatchesLoopProduct) {
  FeatureBundle b;
  b.features = Matrix{{1, 2}, {3, 4}};
  b.labels = Matrix{{1, 0}, {0, 1}};
  b.class_count = 2;
  Matrix expected = 2.0 * reference::transpose_multiply(b.features, b.features);
  expected.diagonal().array() += 1.0;
  EXPECT_EQ(expected, (Matrix{{21, 28}, {28, 41}}));
  EXPECT_EQ(weighted_gram(b, 2.0, 1.0).matrix(), expected);
}

TEST(Personalize, AlphaZeroIsGlobalModelBitwise) {
  const auto clients = random_clients(5, 8, 3, 17);
  const AggregatorState s = fold_all(clients, 0.4);
  const GlobalModel g = derive_global(s);
  for (const auto &c : clients) {
    const PersonalizedModel p = personalize(s.cumulative_gram, s.fusion, c, 0.0, 0.4, s.absorbed);
    EXPECT_EQ(p.weights, g.weights);
  }
}

TEST(Personalize, SingleClientCollapse) {
  const FeatureBundle b = random_bundle(0, 30, 5, 3, 8);
  const LocalArtifacts art = local_train(b, 0.5);
  const AggregatorState s = absorb(init_state(5, 3, 0.5), art);
  const PersonalizedModel p = personalize(s.cumulative_gram, s.fusion, b, 0.0, 0.5, 1);
  EXPECT_LE(max_abs(p.weights - art.model), 1e-12);
}

TEST(Personalize, MatchesStackedOracle) {
  const auto clients = random_clients(3, 6, 4, 23);
  const AggregatorState s = fold_all(clients, 0.5);
  for (std::size_t k = 0; k < clients.size(); ++k) {
    const PersonalizedModel p = personalize(s.cumulative_gram, s.fusion, clients[k], 10.0, 0.5, 3);
    EXPECT_LE(max_abs(p.weights - batch_personal_oracle(clients, k, 10.0, 0.5)), 1e-8);
  }
}

TEST(Personalize, EquivalenceProperty) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const auto k = std::uniform_int_distribution<std::uint32_t>(1, 10)(rng);
    const auto m = std::uniform_int_distribution<Eigen::Index>(1, 32)(rng);
    const auto d = std::uniform_int_distribution<std::uint32_t>(2, 8)(rng);
    const double alpha = std::uniform_real_distribution<double>(0.0, 60.0)(rng);
    const double beta = std::uniform_real_distribution<double>(1e-3, 5.0)(rng);
    const auto clients = random_clients(k, m, d, rng(), 1, 50);
    const AggregatorState s = fold_all(clients, beta);
    for (std::size_t c = 0; c < clients.size(); ++c) {
      const PersonalizedModel p = personalize(s.cumulative_gram, s.fusion, clients[c], alpha, beta, k);
      EXPECT_LE(max_abs(p.weights - batch_personal_oracle(clients, c, alpha, beta)), 1e-8) << "trial " << trial;
    }
  }
}

TEST(Personalize, LargeAlphaApproachesOwnRidge) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto clients = random_clients(4, 6, 3, seed, 30, 40);
    const double beta = 1.0;
    const AggregatorState s = fold_all(clients, beta);
    const FeatureBundle &own = clients[1];
    auto gap = [&](double alpha) {
      const PersonalizedModel p = personalize(s.cumulative_gram, s.fusion, own, alpha, beta, 4);
      return max_abs(p.weights - ridge_fit(own.features, own.labels, beta / alpha));
    };
    EXPECT_LT(gap(1e6), gap(1e3)) << "seed " << seed;
  }
}

TEST(Personalize, RejectsMismatchedDownlink) {
  const auto clients = random_clients(2, 4, 3, 1);
  const AggregatorState s = fold_all(clients, 1.0);
  const FeatureBundle wide = random_bundle(0, 10, 5, 3, 2);
  EXPECT_THROW(personalize(s.cumulative_gram, s.fusion, wide, 1.0, 1.0, 2), ProtocolError);
  const FeatureBundle more_classes = random_bundle(0, 10, 4, 4, 2);
  EXPECT_THROW(personalize(s.cumulative_gram, s.fusion, more_classes, 1.0, 1.0, 2), ProtocolError);
}

TEST(Predict, IdentityModel) {
  const Matrix p = Matrix::Identity(4, 4);
  const Matrix rows = Matrix::Identity(4, 4);
  EXPECT_EQ(predict(p, rows), (std::vector<Label>{0, 1, 2, 3}));
}

TEST(Predict, TiesGoToLowestIndex) {
  const auto out = predict(Matrix::Zero(3, 5), random_matrix(6, 3, 1));
  EXPECT_EQ(out, std::vector<Label>(6, 0));
  // Scores (1, 3, 3): class 1.
  EXPECT_EQ(predict(Matrix{{1, 3, 3}}, Matrix{{1.0}}), std::vector<Label>{1});
}

TEST(Predict, MatchesScalarLoop) {
  const Matrix p = random_matrix(7, 5, 3);
  const Matrix x = random_matrix(1, 7, 4);
  Label best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < 5; ++c) {
    double score = 0.0;
    for (Eigen::Index j = 0; j < 7; ++j) {
      score += x(0, j) * p(j, c);
    }
    if (score > best_score) {
      best_score = score;
      best = static_cast<Label>(c);
    }
  }
  EXPECT_EQ(predict(p, x), std::vector<Label>{best});
}

TEST(Accuracy, Counts) {
  const std::vector<Label> a{0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(accuracy(a, a), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(a, std::vector<Label>{1, 2, 3, 0}), 0.0);
  EXPECT_DOUBLE_EQ(accuracy(a, std::vector<Label>{0, 1, 0, 3}), 0.75);
}

TEST(Accuracy, Errors) {
  const std::vector<Label> a{0, 1};
  EXPECT_THROW(accuracy(a, std::vector<Label>{0}), UsageError);
  EXPECT_THROW(accuracy(std::vector<Label>{}, std::vector<Label>{}), UsageError);
}

}  // namespace
}  // namespace fedhip
