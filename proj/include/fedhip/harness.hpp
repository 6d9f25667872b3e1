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

#ifndef FEDHIP_HARNESS_HPP_
#define FEDHIP_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedhip/client_engine.hpp"
#include "fedhip/data_plane.hpp"

namespace fedhip {

struct ExperimentConfig {
  std::optional<std::filesystem::path> bundle_dir;  // otherwise synthetic
  SynthSpec synth;
  std::uint32_t clients = 20;
  double lambda = 0.1;
  double alpha = 20.0;
  double beta = 1.0;
  std::uint64_t seed = 0;
  double split = 0.8;
  std::optional<std::size_t> min_samples;
  std::filesystem::path out_dir = ".";
  unsigned jobs = 1;
  bool allow_beta_zero = false;

  /// Throws ConfigError on alpha < 0, beta <= 0 (beta = 0 only with
  /// allow_beta_zero), K < 1 or a split outside (0, 1).
  void validate() const;
};

/// Pooled data, its partition and the per-client train/test views.
struct Federation {
  Dataset pool;
  PartitionSpec partition;
  std::vector<FeatureBundle> train;
  std::vector<Matrix> test_features;
  std::vector<std::vector<Label>> test_labels;
};

Federation prepare_federation(const ExperimentConfig &cfg);

struct ClientReport {
  ClientId client_id = 0;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  double accuracy_personalized = 0.0;
  double accuracy_global = 0.0;
  std::uint64_t uplink_bytes = 0;
  std::uint64_t downlink_bytes = 0;
  double client_flops = 0.0;
  double server_flops = 0.0;
};

struct PhaseTimings {
  double partition = 0.0;
  double local_training = 0.0;
  double aggregation = 0.0;
  double personalization = 0.0;
  double evaluation = 0.0;
};

struct RunReport {
  std::uint32_t clients = 0;
  double lambda = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  double split = 0.0;
  std::int64_t m = 0;
  std::int64_t d = 0;
  std::vector<ClientReport> per_client;
  double mean_accuracy_personalized = 0.0;
  double mean_accuracy_global = 0.0;
  double weighted_accuracy_personalized = 0.0;
  double weighted_accuracy_global = 0.0;
  std::size_t uplink_messages = 0;
  std::size_t downlink_messages = 0;
  double server_flops_total = 0.0;
  PhaseTimings seconds;

  /// Pretty JSON. Wall-clock fields are omitted when include_timings is false.
  std::string to_json(bool include_timings = true) const;
};

RunReport run_experiment(const ExperimentConfig &cfg);

/// One protocol run on an already prepared federation.
RunReport run_on(const Federation &federation, const ExperimentConfig &cfg);

struct SweepRow {
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double mean_accuracy_personalized = 0.0;
  double mean_accuracy_global = 0.0;
};

/// Cartesian grid over alphas x betas (an empty axis uses cfg's value);
/// every point shares one partition.
std::vector<SweepRow> sweep(const ExperimentConfig &cfg, const std::vector<double> &alphas,
                            const std::vector<double> &betas);
std::string sweep_csv(const std::vector<SweepRow> &rows);

/// Cost model, in floating-point operations (a multiply-add counts 2):
///   client, per phase 1:  2 N m^2 + 2 N m d + m^3/3 + 2 m^2 d
///   client, per phase 3:  2 N m^2 + 2 N m d + 2 m^2 d + m^3/3 + 2 m^2 d
///   server, per absorb:   m^2 + 4 m^2 d + m^3/3 + 2 m^2 d
///   server, global model: m^3/3 + 4 m^2 d
double client_flops(std::uint64_t n, std::uint64_t m, std::uint64_t d);
double server_absorb_flops(std::uint64_t m, std::uint64_t d);
double server_global_flops(std::uint64_t m, std::uint64_t d);
inline constexpr const char *kFlopModel =
    "client=4Nm^2+4Nmd+2m^3/3+6m^2d; server_absorb=m^2+6m^2d+m^3/3; server_global=m^3/3+4m^2d";

struct OverheadRow {
  ClientId client_id = 0;
  std::size_t train_samples = 0;
  std::uint64_t uplink_bytes = 0;
  std::uint64_t downlink_bytes = 0;
  double client_flops = 0.0;
  double server_flops = 0.0;
};

struct OverheadReport {
  std::int64_t m = 0;
  std::int64_t d = 0;
  std::uint64_t header_bytes = 0;
  std::uint64_t payload_bytes = 0;
  std::vector<OverheadRow> per_client;
  double server_flops_total = 0.0;

  std::string to_json() const;
};

OverheadReport overhead_report(const ExperimentConfig &cfg);

}  // namespace fedhip

#endif  // FEDHIP_HARNESS_HPP_
