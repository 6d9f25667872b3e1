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

#include "fedhip/oracle_verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fedhip/errors.hpp"
#include "fedhip/protocol.hpp"
#include "json.hpp"

namespace fedhip {

namespace reference {

Matrix multiply(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.rows()) {
    throw UsageError("reference::multiply: inner dimensions differ");
  }
  Matrix out = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        out(i, j) += aip * b(p, j);
      }
    }
  }
  return out;
}

Matrix transpose_multiply(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows()) {
    throw UsageError("reference::transpose_multiply: row counts differ");
  }
  Matrix out = Matrix::Zero(a.cols(), b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      const double ari = a(r, i);
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        out(i, j) += ari * b(r, j);
      }
    }
  }
  return out;
}

Matrix solve(Matrix a, Matrix b) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n) {
    throw UsageError("reference::solve: shape mismatch");
  }
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) {
        pivot = r;
      }
    }
    if (a(pivot, col) == 0.0) {
      throw SingularityError("reference::solve: zero pivot in column " + std::to_string(col),
                             static_cast<std::size_t>(col));
    }
    if (pivot != col) {
      a.row(col).swap(a.row(pivot));
      b.row(col).swap(b.row(pivot));
    }
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      if (factor == 0.0) {
        continue;
      }
      for (Eigen::Index c = col; c < n; ++c) {
        a(r, c) -= factor * a(col, c);
      }
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        b(r, c) -= factor * b(col, c);
      }
    }
  }
  Matrix x(n, b.cols());
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      double acc = b(r, c);
      for (Eigen::Index k = r + 1; k < n; ++k) {
        acc -= a(r, k) * x(k, c);
      }
      x(r, c) = acc / a(r, r);
    }
  }
  return x;
}

Matrix stack_rows(std::span<const Matrix> blocks) {
  if (blocks.empty()) {
    throw UsageError("reference::stack_rows: nothing to stack");
  }
  Eigen::Index rows = 0;
  for (const auto &b : blocks) {
    if (b.cols() != blocks.front().cols()) {
      throw UsageError("reference::stack_rows: column counts differ");
    }
    rows += b.rows();
  }
  Matrix out(rows, blocks.front().cols());
  Eigen::Index at = 0;
  for (const auto &b : blocks) {
    for (Eigen::Index r = 0; r < b.rows(); ++r, ++at) {
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        out(at, c) = b(r, c);
      }
    }
  }
  return out;
}

}  // namespace reference

namespace {

struct Stacked {
  Matrix features;
  Matrix labels;
};

Stacked stack(std::span<const FeatureBundle> bundles) {
  if (bundles.empty()) {
    throw UsageError("oracle: no bundles");
  }
  std::vector<Matrix> f;
  std::vector<Matrix> y;
  for (const auto &b : bundles) {
    if (b.features.cols() != bundles.front().features.cols() || b.labels.cols() != bundles.front().labels.cols()) {
      throw UsageError("oracle: bundles disagree on m or d");
    }
    f.push_back(b.features);
    y.push_back(b.labels);
  }
  return {reference::stack_rows(f), reference::stack_rows(y)};
}

void add_ridge(Matrix &a, double beta) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    a(i, i) += beta;
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

AggregatorState fold(std::span<const LocalArtifacts> uploads, Eigen::Index m, Eigen::Index d, double beta) {
  AggregatorState state = init_state(m, d, beta);
  for (const auto &art : uploads) {
    state = absorb(state, art);
  }
  return state;
}

std::vector<LocalArtifacts> train_all(std::span<const FeatureBundle> bundles, double beta) {
  std::vector<LocalArtifacts> out;
  out.reserve(bundles.size());
  for (const auto &b : bundles) {
    out.push_back(local_train(b, beta));
  }
  return out;
}

}  // namespace

Matrix batch_global_oracle(std::span<const FeatureBundle> bundles, double beta) {
  const Stacked s = stack(bundles);
  Matrix gram = reference::transpose_multiply(s.features, s.features);
  add_ridge(gram, beta);
  return reference::solve(std::move(gram), reference::transpose_multiply(s.features, s.labels));
}

Matrix batch_personal_oracle(std::span<const FeatureBundle> bundles, std::size_t k, double alpha, double beta) {
  if (k >= bundles.size()) {
    throw UsageError("batch_personal_oracle: client index out of range");
  }
  const Stacked s = stack(bundles);
  const FeatureBundle &own = bundles[k];
  Matrix gram = reference::transpose_multiply(s.features, s.features);
  Matrix rhs = reference::transpose_multiply(s.features, s.labels);
  if (alpha != 0.0) {
    gram += alpha * reference::transpose_multiply(own.features, own.features);
    rhs += alpha * reference::transpose_multiply(own.features, own.labels);
  }
  add_ridge(gram, beta);
  return reference::solve(std::move(gram), std::move(rhs));
}

Matrix batch_fusion_oracle(std::span<const FeatureBundle> bundles, double beta) {
  const Stacked s = stack(bundles);
  Matrix gram = reference::transpose_multiply(s.features, s.features);
  add_ridge(gram, static_cast<double>(bundles.size()) * beta);
  return reference::solve(std::move(gram), reference::transpose_multiply(s.features, s.labels));
}

double max_abs_diff(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  if (a.size() == 0) {
    return 0.0;
  }
  return (a - b).cwiseAbs().maxCoeff();
}

std::string VerificationReport::to_json_line() const {
  nlohmann::ordered_json j;
  j["check"] = check;
  j["K"] = instance.clients;
  j["m"] = instance.m;
  j["d"] = instance.d;
  j["N_k"] = instance.samples;
  j["alpha"] = instance.alpha;
  j["beta"] = instance.beta;
  j["seed"] = instance.seed;
  j["max_abs_deviation"] = max_abs_deviation;
  j["tolerance"] = tolerance;
  j["passed"] = passed;
  return j.dump();
}

VerificationReport make_report(std::string check, InstanceDescriptor instance, double deviation, double tolerance) {
  VerificationReport r;
  r.check = std::move(check);
  r.instance = std::move(instance);
  r.max_abs_deviation = deviation;
  r.tolerance = tolerance;
  r.passed = deviation <= tolerance;
  return r;
}

InstanceDescriptor describe(std::span<const FeatureBundle> bundles, double alpha, double beta, std::uint64_t seed) {
  InstanceDescriptor d;
  d.clients = static_cast<std::uint32_t>(bundles.size());
  if (!bundles.empty()) {
    d.m = bundles.front().feature_dim();
    d.d = bundles.front().labels.cols();
  }
  for (const auto &b : bundles) {
    d.samples.push_back(b.samples());
  }
  d.alpha = alpha;
  d.beta = beta;
  d.seed = seed;
  return d;
}

RandomInstance random_instance(std::uint64_t seed) {
  static constexpr double kAlphas[] = {0.0, 1.0, 15.0, 50.0};
  static constexpr double kBetas[] = {1e-3, 0.5, 5.0};
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const auto k = static_cast<std::uint32_t>(uniform(2, 10));
  const int m = uniform(4, 32);
  const int d = uniform(2, 8);
  const double alpha = kAlphas[uniform(0, 3)];
  const double beta = kBetas[uniform(0, 2)];
  std::normal_distribution<double> normal(0.0, 1.0);

  RandomInstance out;
  for (std::uint32_t c = 0; c < k; ++c) {
    FeatureBundle b;
    b.client_id = c;
    b.class_count = static_cast<std::uint32_t>(d);
    const int n = uniform(d, 50);
    b.features.resize(n, m);
    for (Eigen::Index i = 0; i < b.features.size(); ++i) {
      b.features.data()[i] = normal(rng);
    }
    b.labels = Matrix::Zero(n, d);
    for (int i = 0; i < n; ++i) {
      b.labels(i, uniform(0, d - 1)) = 1.0;
    }
    out.bundles.push_back(std::move(b));
  }
  out.descriptor = describe(out.bundles, alpha, beta, seed);
  return out;
}

VerificationReport check_global_equivalence(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed,
                                            double corrupt_model) {
  std::vector<LocalArtifacts> uploads = train_all(bundles, beta);
  uploads.front().model(0, 0) += corrupt_model;
  const AggregatorState state =
      fold(uploads, bundles.front().feature_dim(), bundles.front().labels.cols(), beta);
  const double dev = max_abs_diff(derive_global(state).weights, batch_global_oracle(bundles, beta));
  return make_report("global_equivalence", describe(bundles, 0.0, beta, seed), dev, kEquivalenceTolerance);
}

VerificationReport check_personal_equivalence(std::span<const FeatureBundle> bundles, double alpha, double beta,
                                              std::uint64_t seed) {
  const std::vector<LocalArtifacts> uploads = train_all(bundles, beta);
  const AggregatorState state =
      fold(uploads, bundles.front().feature_dim(), bundles.front().labels.cols(), beta);
  const DownlinkPayload down = downlink(state);
  double dev = 0.0;
  for (std::size_t k = 0; k < bundles.size(); ++k) {
    const PersonalizedModel p =
        personalize(down.cumulative_gram, down.fusion, bundles[k], alpha, beta, down.absorbed);
    dev = std::max(dev, max_abs_diff(p.weights, batch_personal_oracle(bundles, k, alpha, beta)));
  }
  return make_report("personal_equivalence", describe(bundles, alpha, beta, seed), dev, kEquivalenceTolerance);
}

VerificationReport check_fusion_closed_form(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed) {
  const AggregatorState state =
      fold(train_all(bundles, beta), bundles.front().feature_dim(), bundles.front().labels.cols(), beta);
  const double dev = max_abs_diff(state.fusion, batch_fusion_oracle(bundles, beta));
  return make_report("fusion_closed_form", describe(bundles, 0.0, beta, seed), dev, kEquivalenceTolerance);
}

VerificationReport check_fusion_order(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed) {
  std::vector<LocalArtifacts> uploads = train_all(bundles, beta);
  const Eigen::Index m = bundles.front().feature_dim();
  const Eigen::Index d = bundles.front().labels.cols();
  const AggregatorState natural = fold(uploads, m, d, beta);
  std::mt19937_64 rng(seed);
  std::shuffle(uploads.begin(), uploads.end(), rng);
  const AggregatorState permuted = fold(uploads, m, d, beta);
  const double dev = max_abs_diff(natural.fusion, permuted.fusion);
  return make_report("fusion_order_independence", describe(bundles, 0.0, beta, seed), dev, kEquivalenceTolerance);
}

VerificationReport check_telescoping(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed) {
  const AggregatorState state =
      fold(train_all(bundles, beta), bundles.front().feature_dim(), bundles.front().labels.cols(), beta);
  Matrix direct = Matrix::Zero(state.m, state.d);
  for (const auto &b : bundles) {
    direct += reference::transpose_multiply(b.features, b.labels);
  }
  const double dev = max_abs_diff(reference::multiply(state.cumulative_gram.matrix(), state.fusion), direct);
  return make_report("fusion_telescoping", describe(bundles, 0.0, beta, seed), dev, kEquivalenceTolerance);
}

VerificationReport check_weight_identity(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed) {
  const Eigen::Index m = bundles.front().feature_dim();
  AggregatorState state = init_state(m, bundles.front().labels.cols(), beta);
  const Matrix eye = Matrix::Identity(m, m);
  double dev = 0.0;
  for (const auto &art : train_all(bundles, beta)) {
    const FusionWeights w = fusion_weights(state, art);
    dev = std::max(dev, max_abs_diff(w.retention + w.incorporation, eye));
    state = absorb(state, art);
  }
  return make_report("weight_partition_of_unity", describe(bundles, 0.0, beta, seed), dev, kWeightTolerance);
}

VerificationReport check_privacy_with(const FeatureBundle &bundle, double beta, const Matrix &transform) {
  if (transform.cols() != bundle.samples()) {
    throw UsageError("check_privacy_with: transform must have N columns");
  }
  const LocalArtifacts original = local_train(bundle, beta);
  const LocalArtifacts mixed =
      local_train(bundle.client_id, transform * bundle.features, transform * bundle.labels, beta);
  const double dev = std::max(max_abs_diff(original.gram.matrix(), mixed.gram.matrix()),
                              max_abs_diff(original.model, mixed.model));
  const FeatureBundle one[] = {bundle};
  return make_report("privacy_indistinguishable", describe(one, 0.0, beta, 0), dev, kPrivacyTolerance);
}

VerificationReport check_privacy(const FeatureBundle &bundle, double beta, std::span<const std::uint64_t> seeds) {
  double dev = 0.0;
  std::uint64_t first = seeds.empty() ? 0 : seeds.front();
  for (const std::uint64_t s : seeds) {
    const Matrix u = random_semi_orthogonal(bundle.samples(), s);
    dev = std::max(dev, check_privacy_with(bundle, beta, u).max_abs_deviation);
  }
  const FeatureBundle one[] = {bundle};
  return make_report("privacy_indistinguishable", describe(one, 0.0, beta, first), dev, kPrivacyTolerance);
}

namespace {

std::vector<FeatureBundle> assemble(const Dataset &rest, const PartitionSpec &part, const FeatureBundle &fixed,
                                    std::uint32_t k_fixed) {
  std::vector<FeatureBundle> out;
  ClientId next_other = 0;
  for (std::uint32_t k = 0; k < part.client_count + 1; ++k) {
    if (k == k_fixed) {
      FeatureBundle f = fixed;
      f.client_id = k;
      out.push_back(std::move(f));
    } else {
      const auto idx = part.train_indices(next_other++);
      out.push_back(make_bundle(rest, idx, k));
    }
  }
  return out;
}

}  // namespace

VerificationReport check_heterogeneity_invariance(const Dataset &pool, std::uint32_t client_count,
                                                  std::uint32_t k_fixed, double lambda_a, double lambda_b,
                                                  std::uint64_t seed, double alpha, double beta) {
  if (client_count < 2 || k_fixed >= client_count) {
    throw ConfigError("heterogeneity check needs K >= 2 and a fixed client below K");
  }
  const std::size_t floor = 2 * static_cast<std::size_t>(pool.class_count);
  const PartitionSpec initial = dirichlet_partition(pool, client_count, lambda_a, seed, floor);
  const std::vector<std::size_t> fixed_idx = initial.train_indices(k_fixed);
  const FeatureBundle fixed = make_bundle(pool, fixed_idx, k_fixed);

  std::vector<std::size_t> rest_idx;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (initial.assignment[i] != k_fixed) {
      rest_idx.push_back(i);
    }
  }
  Dataset rest;
  rest.class_count = pool.class_count;
  rest.features.resize(static_cast<Eigen::Index>(rest_idx.size()), pool.features.cols());
  for (std::size_t r = 0; r < rest_idx.size(); ++r) {
    rest.features.row(static_cast<Eigen::Index>(r)) = pool.features.row(static_cast<Eigen::Index>(rest_idx[r]));
    rest.labels.push_back(pool.labels[rest_idx[r]]);
  }

  const std::uint64_t rest_seed = splitmix64(seed);
  const auto part_a = dirichlet_partition(rest, client_count - 1, lambda_a, rest_seed, floor);
  const auto part_b = dirichlet_partition(rest, client_count - 1, lambda_b, rest_seed, floor);
  const auto config_a = assemble(rest, part_a, fixed, k_fixed);
  const auto config_b = assemble(rest, part_b, fixed, k_fixed);
  const ProtocolOutcome a = run_protocol(config_a, alpha, beta);
  const ProtocolOutcome b = run_protocol(config_b, alpha, beta);
  const double dev = max_abs_diff(a.personalized[k_fixed].weights, b.personalized[k_fixed].weights);
  InstanceDescriptor desc = describe(config_a, alpha, beta, seed);
  return make_report("heterogeneity_invariance", std::move(desc), dev, kEquivalenceTolerance);
}

VerificationReport check_swap_invariance(std::span<const FeatureBundle> bundles, std::size_t k_fixed, std::size_t i,
                                         std::size_t j, double alpha, double beta, std::uint64_t seed) {
  if (k_fixed >= bundles.size() || i >= bundles.size() || j >= bundles.size() || i == k_fixed || j == k_fixed) {
    throw UsageError("check_swap_invariance: indices must be distinct from the fixed client and in range");
  }
  std::vector<FeatureBundle> swapped(bundles.begin(), bundles.end());
  std::swap(swapped[i].features, swapped[j].features);
  std::swap(swapped[i].labels, swapped[j].labels);
  const ProtocolOutcome a = run_protocol(bundles, alpha, beta);
  const ProtocolOutcome b = run_protocol(swapped, alpha, beta);
  const double dev = max_abs_diff(a.personalized[k_fixed].weights, b.personalized[k_fixed].weights);
  return make_report("swap_invariance", describe(bundles, alpha, beta, seed), dev, kEquivalenceTolerance);
}

VerificationReport check_alpha_zero_collapse(std::span<const FeatureBundle> bundles, double beta, std::uint64_t seed) {
  const ProtocolOutcome out = run_protocol(bundles, 0.0, beta);
  double dev = 0.0;
  for (const auto &p : out.personalized) {
    dev = std::max(dev, max_abs_diff(p.weights, out.global.weights));
  }
  return make_report("collapse_alpha_zero", describe(bundles, 0.0, beta, seed), dev, 0.0);
}

VerificationReport check_single_client_collapse(const FeatureBundle &bundle, double beta, std::uint64_t seed) {
  const FeatureBundle one[] = {bundle};
  const ProtocolOutcome out = run_protocol(one, 0.0, beta);
  const double dev = max_abs_diff(out.global.weights, out.uploads.front().model);
  return make_report("collapse_single_client", describe(one, 0.0, beta, seed), dev, kSingleClientTolerance);
}

VerifyOptions VerifyOptions::all() {
  VerifyOptions o;
  o.global = o.personal = o.fusion = o.invariance = o.privacy = o.weights = o.collapse = true;
  return o;
}

std::vector<VerificationReport> run_verification(const VerifyOptions &options) {
  std::vector<VerificationReport> reports;
  for (std::uint32_t i = 0; i < options.instances; ++i) {
    const std::uint64_t seed = splitmix64(options.seed * 0x100000001B3ull + i);
    const RandomInstance inst = random_instance(seed);
    const auto &bundles = inst.bundles;
    const double alpha = inst.descriptor.alpha;
    const double beta = inst.descriptor.beta;
    if (options.global) {
      reports.push_back(check_global_equivalence(bundles, beta, seed, options.corrupt_model));
    }
    if (options.personal) {
      reports.push_back(check_personal_equivalence(bundles, alpha, beta, seed));
    }
    if (options.fusion) {
      reports.push_back(check_fusion_closed_form(bundles, beta, seed));
      reports.push_back(check_fusion_order(bundles, beta, seed));
      reports.push_back(check_telescoping(bundles, beta, seed));
    }
    if (options.weights) {
      reports.push_back(check_weight_identity(bundles, beta, seed));
    }
    if (options.privacy) {
      std::vector<std::uint64_t> seeds(10);
      std::iota(seeds.begin(), seeds.end(), seed);
      reports.push_back(check_privacy(bundles.front(), beta, seeds));
    }
    if (options.collapse) {
      reports.push_back(check_alpha_zero_collapse(bundles, beta, seed));
    }
    if (options.invariance && bundles.size() >= 3) {
      reports.push_back(check_swap_invariance(bundles, 0, 1, bundles.size() - 1, alpha, beta, seed));
    }
  }

  if (options.collapse) {
    // A well-conditioned single client: 40 samples, m = 8, beta = 0.5.
    SynthSpec spec;
    spec.class_count = 4;
    spec.feature_dim = 8;
    spec.samples_per_class = 10;
    spec.seed = options.seed;
    const Dataset ds = synth_features(spec);
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), 0);
    reports.push_back(check_single_client_collapse(make_bundle(ds, all, 0), 0.5, options.seed));
  }

  if (options.invariance || options.identical_configs) {
    SynthSpec spec;
    spec.class_count = 5;
    spec.feature_dim = 12;
    spec.samples_per_class = 80;
    spec.class_mean_scale = 3.0;
    spec.seed = options.seed;
    const Dataset pool = synth_features(spec);
    const double lambda_a = options.identical_configs ? 0.5 : 0.1;
    const double lambda_b = options.identical_configs ? 0.5 : 1.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      reports.push_back(
          check_heterogeneity_invariance(pool, 8, 2, lambda_a, lambda_b, options.seed + s, 15.0, 0.5));
    }
  }
  return reports;
}

}  // namespace fedhip
