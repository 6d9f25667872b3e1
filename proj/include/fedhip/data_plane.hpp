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

#ifndef FEDHIP_DATA_PLANE_HPP_
#define FEDHIP_DATA_PLANE_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedhip/analytic_core.hpp"
#include "fedhip/client_engine.hpp"

namespace fedhip {

/// The pooled data before it is spread over clients.
struct Dataset {
  Matrix features;  // N x m
  std::vector<Label> labels;
  std::uint32_t class_count = 0;

  std::size_t size() const noexcept { return labels.size(); }
  void validate() const;
};

/// Client assignment and train/test flags for every sample of a Dataset.
struct PartitionSpec {
  std::uint32_t client_count = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::size_t min_samples = 0;  // d_min
  double split_ratio = 1.0;     // 1.0 until train_test_split runs
  std::vector<ClientId> assignment;
  std::vector<std::uint8_t> is_train;

  std::vector<std::size_t> train_indices(ClientId client) const;
  std::vector<std::size_t> test_indices(ClientId client) const;
  std::vector<std::size_t> client_sizes() const;
};

struct SynthSpec {
  std::uint32_t class_count = 4;
  std::uint32_t feature_dim = 16;
  std::uint32_t samples_per_class = 100;
  double class_mean_scale = 5.0;
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Class-wise Dirichlet split: for each class, proportions over the K clients
/// are drawn from Dir(lambda * 1_K) and rounded by largest remainder. Clients
/// left below min_samples (default 2d) are topped up one sample at a time
/// from the largest client. Throws ConfigError if K * min_samples > N.
PartitionSpec dirichlet_partition(const Dataset &dataset, std::uint32_t client_count, double lambda,
                                  std::uint64_t seed, std::optional<std::size_t> min_samples = std::nullopt);

/// Per-client split stratified by class. Each client trains on
/// floor(ratio * n) samples; each class contributes floor or ceil of its
/// share. Classes with a single sample on a client are pooled and split
/// unstratified.
PartitionSpec train_test_split(const PartitionSpec &partition, const Dataset &dataset, double ratio,
                               std::uint64_t seed);

Matrix one_hot(std::span<const Label> labels, std::uint32_t class_count);

/// Gaussian class means scaled by class_mean_scale plus isotropic noise.
/// Samples are laid out class by class.
Dataset synth_features(const SynthSpec &spec);

/// Rows of the dataset selected by indices, as a one-hot bundle.
FeatureBundle make_bundle(const Dataset &dataset, std::span<const std::size_t> indices, ClientId client_id);
std::vector<Label> labels_of(const Dataset &dataset, std::span<const std::size_t> indices);

/// FHIP1 layout (little-endian):
///   "FHIP" | u32 version = 1 | u64 N | u32 m | u32 d | f32[N*m] row-major | u32[N] labels
inline constexpr std::size_t kBundleHeaderBytes = 24;
inline constexpr std::uint32_t kBundleVersion = 1;

std::vector<std::uint8_t> encode_bundle(const Dataset &dataset);
Dataset decode_bundle(std::span<const std::uint8_t> bytes, const std::string &origin);

void write_dataset(const std::filesystem::path &path, const Dataset &dataset);
Dataset read_dataset(const std::filesystem::path &path);

void write_bundle(const std::filesystem::path &path, const FeatureBundle &bundle);
FeatureBundle read_bundle(const std::filesystem::path &path, ClientId client_id = 0);

/// Concatenates every *.fhip file in a directory (sorted by name).
Dataset read_bundle_dir(const std::filesystem::path &dir);

/// Partition manifest: {K, lambda, seed, d_min, per_client: [{client_id, train_indices, test_indices}]}.
std::string manifest_json(const PartitionSpec &partition);
PartitionSpec parse_manifest(std::string_view json, std::size_t sample_count);

SynthSpec parse_synth_spec(std::string_view json);

}  // namespace fedhip

#endif  // FEDHIP_DATA_PLANE_HPP_
