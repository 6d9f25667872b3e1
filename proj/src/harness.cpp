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

#include "fedhip/harness.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include "fedhip/errors.hpp"
#include "fedhip/protocol.hpp"
#include "fedhip/server_aggregator.hpp"
#include "fedhip/wire.hpp"
#include "json.hpp"

namespace fedhip {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Both partition and split derive their streams from the run seed.
constexpr std::uint64_t kSplitSeedSalt = 0x5851F42D4C957F2Dull;

/// Serializes every message through the wire format and keeps the count and
/// size of what crossed the link.
class RecordingTransport : public Transport {
 public:
  explicit RecordingTransport(std::size_t clients) : uplink_bytes_(clients, 0), downlink_bytes_(clients, 0) {}

  LocalArtifacts uplink(const LocalArtifacts &artifacts) override {
    const auto bytes = encode_uplink(artifacts);
    std::lock_guard<std::mutex> lock(mutex_);
    uplink_bytes_.at(artifacts.client_id) += bytes.size();
    ++uplinks_;
    return decode_uplink(bytes);
  }

  DownlinkPayload downlink(const DownlinkPayload &payload, ClientId to) override {
    const auto bytes = encode_downlink(payload, to);
    std::lock_guard<std::mutex> lock(mutex_);
    downlink_bytes_.at(to) += bytes.size();
    ++downlinks_;
    return decode_downlink(bytes).payload;
  }

  std::size_t uplinks() const { return uplinks_; }
  std::size_t downlinks() const { return downlinks_; }
  std::uint64_t uplink_bytes(ClientId k) const { return uplink_bytes_.at(k); }
  std::uint64_t downlink_bytes(ClientId k) const { return downlink_bytes_.at(k); }

 private:
  std::mutex mutex_;
  std::vector<std::uint64_t> uplink_bytes_;
  std::vector<std::uint64_t> downlink_bytes_;
  std::size_t uplinks_ = 0;
  std::size_t downlinks_ = 0;
};

void check_beta(double beta, bool allow_zero) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw ConfigError("beta must be finite and >= 0");
  }
  if (beta == 0.0 && !allow_zero) {
    throw ConfigError("beta = 0 requires --allow-beta-zero");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (clients < 1) {
    throw ConfigError("K must be >= 1");
  }
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw ConfigError("alpha must be finite and >= 0");
  }
  check_beta(beta, allow_beta_zero);
  if (!(split > 0.0 && split < 1.0)) {
    throw ConfigError("split ratio must lie in (0, 1)");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be finite and > 0");
  }
  if (min_samples && *min_samples < 2) {
    throw ConfigError("d_min must be >= 2 so every client keeps a test sample");
  }
  if (jobs < 1) {
    throw ConfigError("jobs must be >= 1");
  }
}

Federation prepare_federation(const ExperimentConfig &cfg) {
  cfg.validate();
  Federation fed;
  fed.pool = cfg.bundle_dir ? read_bundle_dir(*cfg.bundle_dir) : synth_features(cfg.synth);
  const PartitionSpec raw = dirichlet_partition(fed.pool, cfg.clients, cfg.lambda, cfg.seed, cfg.min_samples);
  fed.partition = train_test_split(raw, fed.pool, cfg.split, cfg.seed ^ kSplitSeedSalt);
  for (ClientId k = 0; k < cfg.clients; ++k) {
    const auto train_idx = fed.partition.train_indices(k);
    const auto test_idx = fed.partition.test_indices(k);
    fed.train.push_back(make_bundle(fed.pool, train_idx, k));
    fed.test_features.push_back(make_bundle(fed.pool, test_idx, k).features);
    fed.test_labels.push_back(labels_of(fed.pool, test_idx));
  }
  return fed;
}

double client_flops(std::uint64_t n, std::uint64_t m, std::uint64_t d) {
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  return 4.0 * nn * mm * mm + 4.0 * nn * mm * dd + 2.0 * mm * mm * mm / 3.0 + 6.0 * mm * mm * dd;
}

double server_absorb_flops(std::uint64_t m, std::uint64_t d) {
  const double mm = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  return mm * mm + 6.0 * mm * mm * dd + mm * mm * mm / 3.0;
}

double server_global_flops(std::uint64_t m, std::uint64_t d) {
  const double mm = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  return mm * mm * mm / 3.0 + 4.0 * mm * mm * dd;
}

RunReport run_on(const Federation &fed, const ExperimentConfig &cfg) {
  cfg.validate();
  const std::size_t k_total = fed.train.size();
  const auto m = static_cast<std::uint64_t>(fed.pool.features.cols());
  const auto d = static_cast<std::uint64_t>(fed.pool.class_count);

  RunReport report;
  report.clients = static_cast<std::uint32_t>(k_total);
  report.lambda = cfg.lambda;
  report.alpha = cfg.alpha;
  report.beta = cfg.beta;
  report.seed = cfg.seed;
  report.split = cfg.split;
  report.m = static_cast<std::int64_t>(m);
  report.d = static_cast<std::int64_t>(d);

  RecordingTransport link(k_total);
  const ProtocolOutcome outcome = run_protocol(fed.train, cfg.alpha, cfg.beta, cfg.jobs, &link);
  report.seconds.local_training = outcome.seconds.local_training;
  report.seconds.aggregation = outcome.seconds.aggregation;
  report.seconds.personalization = outcome.seconds.personalization;

  const auto eval_start = Clock::now();
  report.per_client.resize(k_total);
  parallel_for(k_total, cfg.jobs, [&](std::size_t i) {
    ClientReport &row = report.per_client[i];
    row.client_id = fed.train[i].client_id;
    row.train_samples = static_cast<std::size_t>(fed.train[i].samples());
    row.test_samples = fed.test_labels[i].size();
    row.accuracy_personalized =
        accuracy(predict(outcome.personalized[i].weights, fed.test_features[i]), fed.test_labels[i]);
    row.accuracy_global = accuracy(predict(outcome.global.weights, fed.test_features[i]), fed.test_labels[i]);
    row.uplink_bytes = link.uplink_bytes(row.client_id);
    row.downlink_bytes = link.downlink_bytes(row.client_id);
    row.client_flops = client_flops(row.train_samples, m, d);
    row.server_flops = server_absorb_flops(m, d);
  });
  report.seconds.evaluation = seconds_since(eval_start);

  double weight_total = 0.0;
  for (const auto &row : report.per_client) {
    report.mean_accuracy_personalized += row.accuracy_personalized;
    report.mean_accuracy_global += row.accuracy_global;
    const auto w = static_cast<double>(row.test_samples);
    report.weighted_accuracy_personalized += w * row.accuracy_personalized;
    report.weighted_accuracy_global += w * row.accuracy_global;
    weight_total += w;
  }
  report.mean_accuracy_personalized /= static_cast<double>(k_total);
  report.mean_accuracy_global /= static_cast<double>(k_total);
  report.weighted_accuracy_personalized /= weight_total;
  report.weighted_accuracy_global /= weight_total;
  report.uplink_messages = link.uplinks();
  report.downlink_messages = link.downlinks();
  report.server_flops_total =
      static_cast<double>(k_total) * server_absorb_flops(m, d) + server_global_flops(m, d);
  return report;
}

RunReport run_experiment(const ExperimentConfig &cfg) {
  const auto start = Clock::now();
  const Federation fed = prepare_federation(cfg);
  const double partition_seconds = seconds_since(start);
  RunReport report = run_on(fed, cfg);
  report.seconds.partition = partition_seconds;
  return report;
}

std::string RunReport::to_json(bool include_timings) const {
  nlohmann::ordered_json j;
  j["K"] = clients;
  j["lambda"] = lambda;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["seed"] = seed;
  j["split"] = split;
  j["m"] = m;
  j["d"] = d;
  auto rows = nlohmann::ordered_json::array();
  for (const auto &r : per_client) {
    nlohmann::ordered_json c;
    c["client_id"] = r.client_id;
    c["train_samples"] = r.train_samples;
    c["test_samples"] = r.test_samples;
    c["accuracy_personalized"] = r.accuracy_personalized;
    c["accuracy_global"] = r.accuracy_global;
    c["uplink_bytes"] = r.uplink_bytes;
    c["downlink_bytes"] = r.downlink_bytes;
    c["client_flops"] = r.client_flops;
    c["server_flops"] = r.server_flops;
    rows.push_back(std::move(c));
  }
  j["per_client"] = std::move(rows);
  j["mean_accuracy_personalized"] = mean_accuracy_personalized;
  j["mean_accuracy_global"] = mean_accuracy_global;
  j["weighted_accuracy_personalized"] = weighted_accuracy_personalized;
  j["weighted_accuracy_global"] = weighted_accuracy_global;
  j["messages"] = {{"uplink", uplink_messages}, {"downlink", downlink_messages}};
  j["server_flops_total"] = server_flops_total;
  j["flop_model"] = kFlopModel;
  if (include_timings) {
    j["seconds"] = {{"partition", seconds.partition},
                    {"local_training", seconds.local_training},
                    {"aggregation", seconds.aggregation},
                    {"personalization", seconds.personalization},
                    {"evaluation", seconds.evaluation}};
  }
  return j.dump(2);
}

std::vector<SweepRow> sweep(const ExperimentConfig &cfg, const std::vector<double> &alphas,
                            const std::vector<double> &betas) {
  const std::vector<double> a_axis = alphas.empty() ? std::vector<double>{cfg.alpha} : alphas;
  const std::vector<double> b_axis = betas.empty() ? std::vector<double>{cfg.beta} : betas;
  for (const double b : b_axis) {
    check_beta(b, cfg.allow_beta_zero);
  }
  const Federation fed = prepare_federation(cfg);
  std::vector<SweepRow> rows;
  for (const double b : b_axis) {
    for (const double a : a_axis) {
      ExperimentConfig point = cfg;
      point.alpha = a;
      point.beta = b;
      const RunReport r = run_on(fed, point);
      rows.push_back({a, b, cfg.lambda, r.mean_accuracy_personalized, r.mean_accuracy_global});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::ostringstream out;
  out.precision(10);
  out << "alpha,beta,lambda,mean_acc_personalized,mean_acc_global\n";
  for (const auto &r : rows) {
    out << r.alpha << ',' << r.beta << ',' << r.lambda << ',' << r.mean_accuracy_personalized << ','
        << r.mean_accuracy_global << '\n';
  }
  return out.str();
}

OverheadReport overhead_report(const ExperimentConfig &cfg) {
  const Federation fed = prepare_federation(cfg);
  OverheadReport out;
  out.m = fed.pool.features.cols();
  out.d = fed.pool.class_count;
  const auto m = static_cast<std::uint64_t>(out.m);
  const auto d = static_cast<std::uint64_t>(out.d);
  out.header_bytes = kMessageHeaderBytes;
  out.payload_bytes = payload_bytes(m, d);
  for (const auto &b : fed.train) {
    OverheadRow row;
    row.client_id = b.client_id;
    row.train_samples = static_cast<std::size_t>(b.samples());
    row.uplink_bytes = message_bytes(m, d);
    row.downlink_bytes = message_bytes(m, d);
    row.client_flops = client_flops(row.train_samples, m, d);
    row.server_flops = server_absorb_flops(m, d);
    out.per_client.push_back(row);
  }
  out.server_flops_total =
      static_cast<double>(fed.train.size()) * server_absorb_flops(m, d) + server_global_flops(m, d);
  return out;
}

std::string OverheadReport::to_json() const {
  nlohmann::ordered_json j;
  j["m"] = m;
  j["d"] = d;
  j["header_bytes"] = header_bytes;
  j["payload_bytes"] = payload_bytes;
  j["flop_model"] = kFlopModel;
  auto rows = nlohmann::ordered_json::array();
  for (const auto &r : per_client) {
    rows.push_back({{"client_id", r.client_id},
                    {"train_samples", r.train_samples},
                    {"uplink_bytes", r.uplink_bytes},
                    {"downlink_bytes", r.downlink_bytes},
                    {"client_flops", r.client_flops},
                    {"server_flops", r.server_flops}});
  }
  j["per_client"] = std::move(rows);
  j["server_flops_total"] = server_flops_total;
  return j.dump(2);
}

}  // namespace fedhip
