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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "fedhip/data_plane.hpp"
#include "fedhip/errors.hpp"
#include "json.hpp"

namespace fedhip {

namespace {


template <typename T>
void put_le(std::vector<std::uint8_t> &out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF));
  }
}

void put_f32(std::vector<std::uint8_t> &out, float value) { put_le(out, std::bit_cast<std::uint32_t>(value)); }

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(bytes[offset + i]) << (8 * i));
  }
  return value;
}

[[noreturn]] void fail(ParseErrorKind kind, const std::string &origin, const std::string &what) {
  throw ParseError(kind, origin + ": " + what);
}

std::vector<std::uint8_t> slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ParseErrorKind::kIo, path.string(), "cannot open for reading");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(const std::filesystem::path &path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(path.string() + ": cannot open for writing");
  }
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(path.string() + ": write failed");
  }
}

Dataset bundle_to_dataset(const FeatureBundle &bundle) {
  bundle.validate();
  Dataset ds;
  ds.features = bundle.features;
  ds.class_count = bundle.class_count;
  ds.labels.resize(static_cast<std::size_t>(bundle.samples()));
  for (Eigen::Index i = 0; i < bundle.labels.rows(); ++i) {
    Eigen::Index hot = 0;
    bundle.labels.row(i).maxCoeff(&hot);
    ds.labels[static_cast<std::size_t>(i)] = static_cast<Label>(hot);
  }
  return ds;
}

}  // namespace

void Dataset::validate() const {
  if (labels.empty()) {
    throw DataError("dataset is empty");
  }
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("dataset feature rows and label count differ");
  }
  if (class_count < 1) {
    throw DataError("dataset has zero classes");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_count) {
      throw DataError("label " + std::to_string(labels[i]) + " at row " + std::to_string(i) + " is outside [0, " +
                      std::to_string(class_count) + ")");
    }
  }
  if (!all_finite(features)) {
    throw DataError("dataset features contain non-finite entries");
  }
}

Matrix one_hot(std::span<const Label> labels, std::uint32_t class_count) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_count) {
      throw DataError("one_hot: label " + std::to_string(labels[i]) + " is outside [0, " +
                      std::to_string(class_count) + ")");
    }
    out(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return out;
}

std::vector<Label> labels_of(const Dataset &dataset, std::span<const std::size_t> indices) {
  std::vector<Label> out;
  out.reserve(indices.size());
  for (const std::size_t i : indices) {
    out.push_back(dataset.labels.at(i));
  }
  return out;
}

FeatureBundle make_bundle(const Dataset &dataset, std::span<const std::size_t> indices, ClientId client_id) {
  FeatureBundle bundle;
  bundle.client_id = client_id;
  bundle.class_count = dataset.class_count;
  bundle.features.resize(static_cast<Eigen::Index>(indices.size()), dataset.features.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    bundle.features.row(static_cast<Eigen::Index>(r)) = dataset.features.row(static_cast<Eigen::Index>(indices[r]));
  }
  const std::vector<Label> labels = labels_of(dataset, indices);
  bundle.labels = one_hot(labels, dataset.class_count);
  return bundle;
}

std::vector<std::uint8_t> encode_bundle(const Dataset &dataset) {
  dataset.validate();
  const auto n = static_cast<std::uint64_t>(dataset.size());
  const auto m = static_cast<std::uint32_t>(dataset.features.cols());
  std::vector<std::uint8_t> out;
  out.reserve(kBundleHeaderBytes + n * m * 4 + n * 4);
  for (const char c : {'F', 'H', 'I', 'P'}) {
    out.push_back(static_cast<std::uint8_t>(c));
  }
  put_le<std::uint32_t>(out, kBundleVersion);
  put_le<std::uint64_t>(out, n);
  put_le<std::uint32_t>(out, m);
  put_le<std::uint32_t>(out, dataset.class_count);
  for (Eigen::Index i = 0; i < dataset.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < dataset.features.cols(); ++j) {
      put_f32(out, static_cast<float>(dataset.features(i, j)));
    }
  }
  for (const Label label : dataset.labels) {
    put_le<std::uint32_t>(out, label);
  }
  return out;
}

Dataset decode_bundle(std::span<const std::uint8_t> bytes, const std::string &origin) {
  if (bytes.size() < 4) {
    fail(ParseErrorKind::kTruncated, origin, "file ends before the magic bytes");
  }
  if (std::memcmp(bytes.data(), "FHIP", 4) != 0) {
    fail(ParseErrorKind::kBadMagic, origin, "bad magic, not an FHIP feature bundle");
  }
  if (bytes.size() < 8) {
    fail(ParseErrorKind::kTruncated, origin, "file ends inside the header");
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kBundleVersion) {
    fail(ParseErrorKind::kVersionMismatch, origin,
         "bundle version " + std::to_string(version) + ", expected " + std::to_string(kBundleVersion));
  }
  if (bytes.size() < kBundleHeaderBytes) {
    fail(ParseErrorKind::kTruncated, origin, "file ends inside the header");
  }
  const auto n = get_le<std::uint64_t>(bytes, 8);
  const auto m = get_le<std::uint32_t>(bytes, 16);
  const auto d = get_le<std::uint32_t>(bytes, 20);
  if (n == 0 || m == 0 || d == 0) {
    fail(ParseErrorKind::kDimensionOverflow, origin, "header declares a zero dimension");
  }
  std::uint64_t feature_bytes = 0;
  std::uint64_t label_bytes = 0;
  std::uint64_t total = 0;
  if (__builtin_mul_overflow(n, static_cast<std::uint64_t>(m), &feature_bytes) ||
      __builtin_mul_overflow(feature_bytes, std::uint64_t{4}, &feature_bytes) ||
      __builtin_mul_overflow(n, std::uint64_t{4}, &label_bytes) ||
      __builtin_add_overflow(feature_bytes, label_bytes, &total) ||
      __builtin_add_overflow(total, std::uint64_t{kBundleHeaderBytes}, &total) ||
      n > static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max())) {
    fail(ParseErrorKind::kDimensionOverflow, origin, "declared dimensions overflow 64-bit sizes");
  }
  if (bytes.size() < total) {
    std::ostringstream msg;
    msg << "truncated payload: header declares " << total << " bytes, file has " << bytes.size();
    fail(ParseErrorKind::kTruncated, origin, msg.str());
  }
  if (bytes.size() > total) {
    fail(ParseErrorKind::kTrailingBytes, origin, std::to_string(bytes.size() - total) + " trailing bytes");
  }

  Dataset ds;
  ds.class_count = d;
  ds.features.resize(static_cast<Eigen::Index>(n), m);
  std::size_t offset = kBundleHeaderBytes;
  for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
      ds.features(i, j) = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset)));
      offset += 4;
    }
  }
  ds.labels.resize(static_cast<std::size_t>(n));
  for (auto &label : ds.labels) {
    label = get_le<std::uint32_t>(bytes, offset);
    offset += 4;
  }
  try {
    ds.validate();
  } catch (const DataError &e) {
    throw DataError(origin + ": " + e.what());
  }
  return ds;
}

void write_dataset(const std::filesystem::path &path, const Dataset &dataset) { spill(path, encode_bundle(dataset)); }

Dataset read_dataset(const std::filesystem::path &path) { return decode_bundle(slurp(path), path.string()); }

void write_bundle(const std::filesystem::path &path, const FeatureBundle &bundle) {
  write_dataset(path, bundle_to_dataset(bundle));
}

FeatureBundle read_bundle(const std::filesystem::path &path, ClientId client_id) {
  const Dataset ds = read_dataset(path);
  FeatureBundle bundle;
  bundle.client_id = client_id;
  bundle.features = ds.features;
  bundle.class_count = ds.class_count;
  bundle.labels = one_hot(ds.labels, ds.class_count);
  return bundle;
}

Dataset read_bundle_dir(const std::filesystem::path &dir) {
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".fhip") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw ConfigError(dir.string() + ": no .fhip bundles found");
  }
  std::sort(files.begin(), files.end());

  std::vector<Dataset> parts;
  Eigen::Index rows = 0;
  for (const auto &file : files) {
    parts.push_back(read_dataset(file));
    const Dataset &p = parts.back();
    if (p.features.cols() != parts.front().features.cols() || p.class_count != parts.front().class_count) {
      throw DataError(file.string() + ": dimensions differ from " + files.front().string());
    }
    rows += p.features.rows();
  }
  Dataset out;
  out.class_count = parts.front().class_count;
  out.features.resize(rows, parts.front().features.cols());
  Eigen::Index at = 0;
  for (const auto &p : parts) {
    out.features.middleRows(at, p.features.rows()) = p.features;
    at += p.features.rows();
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
  }
  return out;
}

std::string manifest_json(const PartitionSpec &partition) {
  nlohmann::ordered_json j;
  j["K"] = partition.client_count;
  j["lambda"] = partition.lambda;
  j["seed"] = partition.seed;
  j["d_min"] = partition.min_samples;
  j["split"] = partition.split_ratio;
  auto clients = nlohmann::ordered_json::array();
  for (ClientId k = 0; k < partition.client_count; ++k) {
    nlohmann::ordered_json c;
    c["client_id"] = k;
    c["train_indices"] = partition.train_indices(k);
    c["test_indices"] = partition.test_indices(k);
    clients.push_back(std::move(c));
  }
  j["per_client"] = std::move(clients);
  return j.dump(2);
}

PartitionSpec parse_manifest(std::string_view json, std::size_t sample_count) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("partition manifest: ") + e.what());
  }
  PartitionSpec out;
  try {
    out.client_count = j.at("K").get<std::uint32_t>();
    out.lambda = j.at("lambda").get<double>();
    out.seed = j.at("seed").get<std::uint64_t>();
    out.min_samples = j.at("d_min").get<std::size_t>();
    out.split_ratio = j.value("split", 1.0);
    constexpr ClientId kUnassigned = std::numeric_limits<ClientId>::max();
    out.assignment.assign(sample_count, kUnassigned);
    out.is_train.assign(sample_count, 0);
    for (const auto &c : j.at("per_client")) {
      const auto id = c.at("client_id").get<ClientId>();
      if (id >= out.client_count) {
        throw ConfigError("partition manifest: client_id " + std::to_string(id) + " >= K");
      }
      for (const char *field : {"train_indices", "test_indices"}) {
        const bool train = std::string_view(field) == "train_indices";
        for (const auto idx : c.at(field).get<std::vector<std::size_t>>()) {
          if (idx >= sample_count || out.assignment[idx] != kUnassigned) {
            throw ConfigError("partition manifest: sample " + std::to_string(idx) + " is out of range or repeated");
          }
          out.assignment[idx] = id;
          out.is_train[idx] = train ? 1 : 0;
        }
      }
    }
    if (std::find(out.assignment.begin(), out.assignment.end(), kUnassigned) != out.assignment.end()) {
      throw ConfigError("partition manifest does not cover every sample");
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("partition manifest: ") + e.what());
  }
  return out;
}

SynthSpec parse_synth_spec(std::string_view json) {
  SynthSpec spec;
  try {
    const auto j = nlohmann::json::parse(json);
    spec.class_count = j.value("d", spec.class_count);
    spec.feature_dim = j.value("m", spec.feature_dim);
    spec.samples_per_class = j.value("samples_per_class", spec.samples_per_class);
    spec.class_mean_scale = j.value("class_mean_scale", spec.class_mean_scale);
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    spec.seed = j.value("seed", spec.seed);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace fedhip
