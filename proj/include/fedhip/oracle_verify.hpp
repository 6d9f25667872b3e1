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

#ifndef FEDHIP_ORACLE_VERIFY_HPP_
#define FEDHIP_ORACLE_VERIFY_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedhip/analytic_core.hpp"
#include "fedhip/client_engine.hpp"
#include "fedhip/data_plane.hpp"
#include "fedhip/server_aggregator.hpp"

namespace fedhip {

/// Reference routines that share no code path with the library under test:
/// plain loops for products and Gaussian elimination with partial pivoting.
namespace reference {

Matrix multiply(const Matrix &a, const Matrix &b);
Matrix transpose_multiply(const Matrix &a, const Matrix &b);  // a^T b
Matrix solve(Matrix a, Matrix b);                              // throws SingularityError on a zero pivot
Matrix stack_rows(std::span<const Matrix> blocks);

}  // namespace reference

/// (F^T F + beta I)^{-1} F^T Y over the physically stacked client data.
Matrix batch_global_oracle(std::span<const FeatureBundle> bundles, double beta);

/// (F^T F + alpha F_k^T F_k + beta I)^{-1} (F^T Y + alpha F_k^T Y_k) for the
/// client at position k.
Matrix batch_personal_oracle(std::span<const FeatureBundle> bundles, std::size_t k, double alpha, double beta);

/// (F^T F + K beta I)^{-1} F^T Y: what the fusion matrix M_K must equal.
Matrix batch_fusion_oracle(std::span<const FeatureBundle> bundles, double beta);

struct InstanceDescriptor {
  std::uint32_t clients = 0;
  std::int64_t m = 0;
  std::int64_t d = 0;
  std::vector<std::int64_t> samples;  // N_k
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
};

struct VerificationReport {
  std::string check;
  InstanceDescriptor instance;
  double max_abs_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;

  std::string to_json_line() const;
};

VerificationReport make_report(std::string check, InstanceDescriptor instance, double deviation, double tolerance);

inline constexpr double kEquivalenceTolerance = 1e-8;
inline constexpr double kPrivacyTolerance = 1e-9;
inline constexpr double kWeightTolerance = 1e-10;
inline constexpr double kSingleClientTolerance = 1e-12;

double max_abs_diff(const Matrix &a, const Matrix &b);

/// Random client data drawn from the verification grid: K in [2,10],
/// m in [4,32], d in [2,8], N_k in [d,50], standard-normal features and
/// uniform labels. alpha and beta are picked from the grid values.
struct RandomInstance {
  std::vector<FeatureBundle> bundles;
  InstanceDescriptor descriptor;
};
RandomInstance random_instance(std::uint64_t seed);

InstanceDescriptor describe(std::span<const FeatureBundle> bundles, double alpha, double beta, std::uint64_t seed);

/// Recursive fold + derive_global against batch_global_oracle. corrupt_model
/// perturbs L_1(0,0) before aggregation, which must make the check fail.
VerificationReport check_global_equivalence(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed,
                                            double corrupt_model = 0.0);

/// personalize for every client against batch_personal_oracle.
VerificationReport check_personal_equivalence(std::span<const FeatureBundle> bundles, double alpha, double beta,
                                              std::uint64_t seed);

/// M_K against batch_fusion_oracle.
VerificationReport check_fusion_closed_form(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed);

/// M_K from a seeded permutation of the absorb order against the natural order.
VerificationReport check_fusion_order(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed);

/// S_K M_K against sum_k F_k^T Y_k.
VerificationReport check_telescoping(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed);

/// Max over absorb steps of |mu_k + nu_k - I|.
VerificationReport check_weight_identity(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed);

/// Local artifacts from (U F, U Y) against those from (F, Y), for
/// U = random_semi_orthogonal(N, seed) over every seed.
VerificationReport check_privacy(const FeatureBundle &bundle, double beta, std::span<const std::uint64_t> seeds);

/// Same comparison for a caller-supplied U with U^T U = I.
VerificationReport check_privacy_with(const FeatureBundle &bundle, double beta, const Matrix &transform);

/// The client at k_fixed keeps the samples it receives from a lambda_a
/// partition of pool; the rest of the pool is then spread over the other
/// K - 1 clients once under lambda_a and once under lambda_b. Reports the
/// deviation between the two personalized models of the fixed client.
VerificationReport check_heterogeneity_invariance(const Dataset &pool, std::uint32_t client_count,
                                                  std::uint32_t k_fixed, double lambda_a, double lambda_b,
                                                  std::uint64_t seed, double alpha, double beta);

/// Swapping the bundles of clients i and j must leave P_{k_fixed} unchanged.
VerificationReport check_swap_invariance(std::span<const FeatureBundle> bundles, std::size_t k_fixed, std::size_t i,
                                         std::size_t j, double alpha, double beta, std::uint64_t seed);

/// alpha = 0 personalization against derive_global; tolerance 0 (bitwise).
VerificationReport check_alpha_zero_collapse(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed);

/// K = 1: the global model against the client's own L_1.
VerificationReport check_single_client_collapse(const FeatureBundle &bundle, double beta, std::uint64_t seed);

struct VerifyOptions {
  bool global = false;
  bool personal = false;
  bool fusion = false;       // closed form, order, telescoping
  bool invariance = false;   // heterogeneity and swap
  bool privacy = false;
  bool weights = false;
  bool collapse = false;
  bool identical_configs = false;  // invariance with lambda_a == lambda_b
  std::uint32_t instances = 100;
  std::uint64_t seed = 0;
  double corrupt_model = 0.0;

  static VerifyOptions all();
};

std::vector<VerificationReport> run_verification(const VerifyOptions &options);

}  // namespace fedhip

#endif  // FEDHIP_ORACLE_VERIFY_HPP_
