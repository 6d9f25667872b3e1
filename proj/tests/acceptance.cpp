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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "fedhip/errors.hpp"
#include "fedhip/harness.hpp"
#include "fedhip/oracle_verify.hpp"
#include "fedhip/wire.hpp"

namespace {

using fedhip::VerificationReport;
using fedhip::VerifyOptions;

int failures = 0;

void verdict(bool ok, const std::string &name, const std::string &detail) {
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) {
    ++failures;
  }
}

std::string fmt(const char *format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

struct Summary {
  std::size_t count = 0;
  std::size_t failed = 0;
  double worst = 0.0;
  double seconds = 0.0;
};

Summary run_checks(VerifyOptions options, const std::vector<std::string> &names) {
  options.seed = 0;
  const auto start = std::chrono::steady_clock::now();
  const auto reports = fedhip::run_verification(options);
  Summary s;
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const VerificationReport &r : reports) {
    if (std::find(names.begin(), names.end(), r.check) == names.end()) {
      continue;
    }
    ++s.count;
    s.failed += r.passed ? 0 : 1;
    s.worst = std::max(s.worst, r.max_abs_deviation);
  }
  return s;
}

std::string describe(const Summary &s) {
  return std::to_string(s.count - s.failed) + "/" + std::to_string(s.count) + fmt(" checks, max dev %.2e, %.2fs", s.worst, s.seconds);
}

fedhip::ExperimentConfig benchmark(std::uint64_t seed, double sigma) {
  fedhip::ExperimentConfig cfg;
  cfg.synth.class_count = 10;
  cfg.synth.feature_dim = 32;
  cfg.synth.samples_per_class = 100;
  cfg.synth.class_mean_scale = 5.0;
  cfg.synth.noise_sigma = sigma;
  cfg.synth.seed = seed;
  cfg.clients = 20;
  cfg.lambda = 0.1;
  cfg.alpha = 20.0;
  cfg.beta = 1.0;
  cfg.seed = seed;
  return cfg;
}

const std::vector<double> kAlphaGrid = {0, 1, 5, 10, 15, 20, 25, 30, 40, 50, 60};

// Best grid point with ties resolved to the smallest alpha. The shape holds
// when acc(0) <= acc(best) and the best point is interior, or sits on the
// right boundary with its left neighbor equal to it.
bool alpha_shape_holds(const std::vector<fedhip::SweepRow> &rows, std::string &detail) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mean_accuracy_personalized > rows[best].mean_accuracy_personalized) {
      best = i;
    }
  }
  const double at_zero = rows.front().mean_accuracy_personalized;
  const double at_best = rows[best].mean_accuracy_personalized;
  const std::size_t last = rows.size() - 1;
  const bool interior = best > 0 && best < last;
  const bool plateau = best == last && rows[last - 1].mean_accuracy_personalized == at_best;
  detail += fmt("[a*=%g acc0=%.4f best=%.4f] ", rows[best].alpha, at_zero, at_best);
  return at_zero <= at_best && (interior || plateau);
}

void synthetic_criteria(double sigma, bool gating) {
  const std::string tag = gating ? "" : fmt(" (sigma=%g, info)", sigma);
  bool exceeds = true;
  bool shape = true;
  std::string exceed_detail;
  std::string shape_detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const fedhip::ExperimentConfig cfg = benchmark(seed, sigma);
    const fedhip::RunReport r = fedhip::run_experiment(cfg);
    exceeds = exceeds && r.mean_accuracy_personalized > r.mean_accuracy_global;
    exceed_detail += fmt("[p=%.4f g=%.4f] ", r.mean_accuracy_personalized, r.mean_accuracy_global);
    shape = alpha_shape_holds(fedhip::sweep(cfg, kAlphaGrid, {cfg.beta}), shape_detail) && shape;
  }
  if (gating) {
    verdict(exceeds, "synthetic_personalized_beats_global", exceed_detail);
    verdict(shape, "synthetic_alpha_sensitivity_shape", shape_detail);
  } else {
    std::printf("INFO  %-34s %s%s\n", "synthetic_personalized_beats_global", exceeds ? "holds " : "fails ",
                (exceed_detail + tag).c_str());
    std::printf("INFO  %-34s %s%s\n", "synthetic_alpha_sensitivity_shape", shape ? "holds " : "fails ",
                (shape_detail + tag).c_str());
  }
}

}  // namespace

int main() {
  try {
    VerifyOptions global;
    global.global = true;
    const Summary g = run_checks(global, {"global_equivalence"});
    verdict(g.failed == 0 && g.count == 100 && g.seconds < 10.0, "global_equivalence", describe(g));

    VerifyOptions personal;
    personal.personal = true;
    const Summary p = run_checks(personal, {"personal_equivalence"});
    verdict(p.failed == 0 && p.count == 100 && p.seconds < 10.0, "personal_equivalence", describe(p));

    VerifyOptions fusion;
    fusion.fusion = true;
    const Summary f = run_checks(fusion, {"fusion_closed_form", "fusion_order_independence"});
    verdict(f.failed == 0 && f.count == 200, "fusion_closed_form_and_order", describe(f));

    VerifyOptions invariance;
    invariance.invariance = true;
    invariance.instances = 0;
    const Summary h = run_checks(invariance, {"heterogeneity_invariance"});
    verdict(h.failed == 0 && h.count == 5, "heterogeneity_invariance", describe(h));

    VerifyOptions privacy;
    privacy.privacy = true;
    const Summary pv = run_checks(privacy, {"privacy_indistinguishable"});
    verdict(pv.failed == 0 && pv.count == 100, "privacy_orthogonal_transform", describe(pv));

    const Summary w = run_checks(VerifyOptions::all(), {"weight_partition_of_unity"});
    verdict(w.failed == 0 && w.count == 100, "weight_partition_of_unity", describe(w));

    VerifyOptions collapse;
    collapse.collapse = true;
    const Summary c0 = run_checks(collapse, {"collapse_alpha_zero"});
    const Summary c1 = run_checks(collapse, {"collapse_single_client"});
    verdict(c0.failed == 0 && c0.worst == 0.0 && c1.failed == 0 && c1.worst <= 1e-12, "collapse_identities",
            fmt("alpha=0 max dev %.2e, K=1 max dev %.2e", c0.worst, c1.worst));

    {
      const fedhip::ExperimentConfig cfg = benchmark(0, 1.0);
      const fedhip::RunReport r = fedhip::run_experiment(cfg);
      const std::uint64_t expected = fedhip::kMessageHeaderBytes + 4 * (32 * 32 + 32 * 10);
      bool ok = r.uplink_messages == cfg.clients && r.downlink_messages == cfg.clients;
      for (const auto &row : r.per_client) {
        ok = ok && row.uplink_bytes == expected && row.downlink_bytes == expected;
      }
      verdict(ok, "single_round_communication",
              fmt("%g uplinks, %g downlinks, %g bytes per message", static_cast<double>(r.uplink_messages),
                  static_cast<double>(r.downlink_messages), static_cast<double>(expected)));
    }

    synthetic_criteria(1.0, true);
    synthetic_criteria(8.0, false);
  } catch (const std::exception &e) {
    verdict(false, "acceptance_run", e.what());
  }
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
