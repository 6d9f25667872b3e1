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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fedhip/data_plane.hpp"
#include "fedhip/errors.hpp"
#include "fedhip/harness.hpp"
#include "fedhip/oracle_verify.hpp"

namespace {

using fedhip::ExperimentConfig;

struct CommonFlags {
  std::uint32_t clients = 20;
  double lambda = 0.1;
  double alpha = 20.0;
  double beta = 1.0;
  std::optional<std::uint64_t> seed;
  double split = 0.8;
  std::optional<std::size_t> d_min;
  std::string bundles;
  std::string synth;
  std::string out = ".";
  unsigned jobs = 1;
  bool allow_beta_zero = false;
};

void add_common(CLI::App *cmd, CommonFlags &f) {
  cmd->add_option("--k", f.clients, "number of clients")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", f.lambda, "Dirichlet concentration");
  cmd->add_option("--alpha", f.alpha, "personalization weight");
  cmd->add_option("--beta", f.beta, "ridge regularizer");
  cmd->add_option("--seed", f.seed, "run seed (falls back to FEDHIP_SEED, then 0)");
  cmd->add_option("--split", f.split, "train fraction per client");
  cmd->add_option("--d-min", f.d_min, "minimum samples per client (default 2d)");
  cmd->add_option("--bundles", f.bundles, "directory of .fhip feature bundles");
  cmd->add_option("--synth", f.synth, "synthetic data spec (JSON)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--jobs", f.jobs, "worker threads for client phases")->check(CLI::PositiveNumber);
  cmd->add_flag("--allow-beta-zero", f.allow_beta_zero, "permit beta = 0");
}

std::string slurp_text(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw fedhip::ConfigError(path + ": cannot open");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag) {
  if (flag) {
    return *flag;
  }
  if (const char *env = std::getenv("FEDHIP_SEED"); env != nullptr && *env != '\0') {
    try {
      return std::stoull(env);
    } catch (const std::exception &) {
      throw fedhip::ConfigError(std::string("FEDHIP_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

ExperimentConfig to_config(const CommonFlags &f) {
  ExperimentConfig cfg;
  cfg.clients = f.clients;
  cfg.lambda = f.lambda;
  cfg.alpha = f.alpha;
  cfg.beta = f.beta;
  cfg.seed = resolve_seed(f.seed);
  cfg.split = f.split;
  cfg.min_samples = f.d_min;
  cfg.out_dir = f.out;
  cfg.jobs = f.jobs;
  cfg.allow_beta_zero = f.allow_beta_zero;
  if (!f.bundles.empty() && !f.synth.empty()) {
    throw fedhip::ConfigError("--bundles and --synth are mutually exclusive");
  }
  if (!f.bundles.empty()) {
    cfg.bundle_dir = f.bundles;
  } else if (!f.synth.empty()) {
    cfg.synth = fedhip::parse_synth_spec(slurp_text(f.synth));
  }
  return cfg;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) {
    throw fedhip::Error(path.string() + ": cannot open for writing");
  }
  out << text;
}

std::vector<double> parse_list(const std::string &csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      out.push_back(std::stod(item));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Closed-form personalized federated learning harness"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto *partition = app.add_subcommand("partition", "partition the data pool and write partition.json");
  auto *run = app.add_subcommand("run", "run the three-phase protocol and write report.json");
  auto *sweep = app.add_subcommand("sweep", "grid over alpha/beta, write sweep.csv");
  auto *overhead = app.add_subcommand("overhead", "communication and compute accounting per client");
  auto *verify = app.add_subcommand("verify", "check closed-form identities against brute-force oracles");
  auto *synth = app.add_subcommand("synth", "write a synthetic FHIP1 bundle");
  for (auto *cmd : {partition, run, sweep, overhead, synth}) {
    add_common(cmd, flags);
  }

  std::string alphas;
  std::string betas;
  sweep->add_option("--alphas", alphas, "comma-separated alpha grid");
  sweep->add_option("--betas", betas, "comma-separated beta grid");

  fedhip::VerifyOptions vopt;
  bool v_all = false;
  std::optional<std::uint64_t> v_seed;
  std::string v_out = ".";
  verify->add_flag("--all", v_all, "every check");
  verify->add_flag("--theorem1", vopt.global, "recursive global model vs stacked ridge");
  verify->add_flag("--theorem2", vopt.personal, "personalized model vs stacked objective");
  verify->add_flag("--lemma1", vopt.fusion, "fusion matrix closed form and order independence");
  verify->add_flag("--theorem3", vopt.invariance, "heterogeneity invariance");
  verify->add_flag("--identical", vopt.identical_configs, "invariance with identical partitions");
  verify->add_flag("--privacy", vopt.privacy, "orthogonal-mixing indistinguishability");
  verify->add_flag("--weights", vopt.weights, "retention + incorporation = I");
  verify->add_flag("--collapse", vopt.collapse, "alpha = 0 and K = 1 collapse identities");
  verify->add_option("--instances", vopt.instances, "random instances per check");
  verify->add_option("--corrupt", vopt.corrupt_model, "perturb one local model entry by this amount");
  verify->add_option("--seed", v_seed, "verification seed");
  verify->add_option("--out", v_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      if (v_all) {
        const auto keep = vopt;
        vopt = fedhip::VerifyOptions::all();
        vopt.instances = keep.instances;
        vopt.corrupt_model = keep.corrupt_model;
        vopt.identical_configs = keep.identical_configs;
      }
      vopt.seed = resolve_seed(v_seed);
      const auto reports = fedhip::run_verification(vopt);
      std::ostringstream lines;
      std::size_t failed = 0;
      for (const auto &r : reports) {
        lines << r.to_json_line() << '\n';
        failed += r.passed ? 0 : 1;
      }
      write_text(std::filesystem::path(v_out) / "verify.jsonl", lines.str());
      std::cout << reports.size() - failed << "/" << reports.size() << " checks passed\n";
      return failed == 0 && !reports.empty() ? 0 : 1;
    }

    const ExperimentConfig cfg = to_config(flags);
    if (synth->parsed()) {
      const fedhip::Dataset ds = fedhip::synth_features(cfg.synth);
      std::filesystem::path target = cfg.out_dir;
      if (std::filesystem::is_directory(target) || target.extension() != ".fhip") {
        std::filesystem::create_directories(target);
        target /= "synth.fhip";
      }
      fedhip::write_dataset(target, ds);
      std::cout << "wrote " << target.string() << " (N=" << ds.size() << ", m=" << ds.features.cols()
                << ", d=" << ds.class_count << ")\n";
    } else if (partition->parsed()) {
      const fedhip::Federation fed = fedhip::prepare_federation(cfg);
      write_text(cfg.out_dir / "partition.json", fedhip::manifest_json(fed.partition));
    } else if (run->parsed()) {
      const fedhip::RunReport report = fedhip::run_experiment(cfg);
      write_text(cfg.out_dir / "report.json", report.to_json());
      std::cout << "mean accuracy: personalized " << report.mean_accuracy_personalized << ", global "
                << report.mean_accuracy_global << "\n";
    } else if (sweep->parsed()) {
      const auto rows = fedhip::sweep(cfg, parse_list(alphas), parse_list(betas));
      const std::string csv = fedhip::sweep_csv(rows);
      write_text(cfg.out_dir / "sweep.csv", csv);
      std::cout << csv;
    } else if (overhead->parsed()) {
      const std::string json = fedhip::overhead_report(cfg).to_json();
      write_text(cfg.out_dir / "overhead.json", json);
      std::cout << json << "\n";
    }
  } catch (const fedhip::ConfigError &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
