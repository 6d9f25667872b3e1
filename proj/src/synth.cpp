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

#include <cmath>
#include <random>

#include "fedhip/data_plane.hpp"
#include "fedhip/errors.hpp"

namespace fedhip {

void SynthSpec::validate() const {
  if (class_count < 1 || feature_dim < 1 || samples_per_class < 1) {
    throw ConfigError("synthetic spec: d, m and samples_per_class must be >= 1");
  }
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma) || !std::isfinite(class_mean_scale)) {
    throw ConfigError("synthetic spec: noise_sigma must be finite and > 0");
  }
}

Dataset synth_features(const SynthSpec &spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix means(spec.class_count, spec.feature_dim);
  for (Eigen::Index c = 0; c < means.rows(); ++c) {
    for (Eigen::Index j = 0; j < means.cols(); ++j) {
      means(c, j) = spec.class_mean_scale * normal(rng);
    }
  }

  Dataset ds;
  ds.class_count = spec.class_count;
  const auto n = static_cast<Eigen::Index>(spec.class_count) * spec.samples_per_class;
  ds.features.resize(n, spec.feature_dim);
  ds.labels.reserve(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (std::uint32_t c = 0; c < spec.class_count; ++c) {
    for (std::uint32_t s = 0; s < spec.samples_per_class; ++s, ++row) {
      for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
        ds.features(row, j) = means(c, j) + spec.noise_sigma * normal(rng);
      }
      ds.labels.push_back(c);
    }
  }
  return ds;
}

}  // namespace fedhip
