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
#include <cmath>
#include <numeric>
#include <random>

#include "fedhip/data_plane.hpp"
#include "fedhip/errors.hpp"

namespace fedhip {

namespace {

// Slack for floor(ratio * n) when ratio * n is an integer up to rounding.
constexpr double kFloorSlack = 1e-9;

std::vector<double> sample_dirichlet(std::uint32_t k, double concentration, std::mt19937_64 &rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> p(k);
  double total = 0.0;
  for (auto &x : p) {
    x = gamma(rng);
    total += x;
  }
  if (!(total > 0.0)) {
    // Every gamma draw underflowed; put all mass on one client.
    std::fill(p.begin(), p.end(), 0.0);
    p[std::uniform_int_distribution<std::uint32_t>(0, k - 1)(rng)] = 1.0;
    return p;
  }
  for (auto &x : p) {
    x /= total;
  }
  return p;
}

// Integer counts summing to total, proportional to weights; leftover units go
// to the largest fractional parts, lowest index first on ties.
std::vector<std::size_t> largest_remainder(const std::vector<double> &weights, std::size_t total) {
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> frac(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    frac[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; assigned < total; i = (i + 1) % order.size()) {
    ++counts[order[i]];
    ++assigned;
  }
  // Rounding in weights can overshoot by a unit; take it back from the largest.
  while (assigned > total) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  return counts;
}

}  // namespace

std::vector<std::size_t> PartitionSpec::train_indices(ClientId client) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == client && is_train[i] != 0) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> PartitionSpec::test_indices(ClientId client) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == client && is_train[i] == 0) {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<std::size_t> PartitionSpec::client_sizes() const {
  std::vector<std::size_t> sizes(client_count, 0);
  for (const ClientId c : assignment) {
    ++sizes.at(c);
  }
  return sizes;
}

PartitionSpec dirichlet_partition(const Dataset &dataset, std::uint32_t client_count, double lambda,
                                  std::uint64_t seed, std::optional<std::size_t> min_samples) {
  dataset.validate();
  if (client_count < 1) {
    throw ConfigError("dirichlet_partition: K must be >= 1");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("dirichlet_partition: lambda must be finite and > 0");
  }
  const std::size_t floor_per_client = min_samples.value_or(2 * static_cast<std::size_t>(dataset.class_count));
  const std::size_t n = dataset.size();
  if (static_cast<std::size_t>(client_count) * floor_per_client > n) {
    throw ConfigError("dirichlet_partition: K * d_min = " +
                      std::to_string(static_cast<std::size_t>(client_count) * floor_per_client) + " exceeds N = " +
                      std::to_string(n));
  }

  std::vector<std::vector<std::size_t>> by_class(dataset.class_count);
  for (std::size_t i = 0; i < n; ++i) {
    by_class[dataset.labels[i]].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> members(client_count);
  for (auto &samples : by_class) {
    const std::vector<double> p = sample_dirichlet(client_count, lambda, rng);
    const std::vector<std::size_t> counts = largest_remainder(p, samples.size());
    std::shuffle(samples.begin(), samples.end(), rng);
    std::size_t at = 0;
    for (std::uint32_t k = 0; k < client_count; ++k) {
      members[k].insert(members[k].end(), samples.begin() + static_cast<std::ptrdiff_t>(at),
                        samples.begin() + static_cast<std::ptrdiff_t>(at + counts[k]));
      at += counts[k];
    }
  }

  // Minimal top-up: each move takes one sample of the donor's most common
  // class from the currently largest client.
  for (std::uint32_t k = 0; k < client_count; ++k) {
    while (members[k].size() < floor_per_client) {
      std::uint32_t donor = 0;
      for (std::uint32_t j = 1; j < client_count; ++j) {
        if (members[j].size() > members[donor].size()) {
          donor = j;
        }
      }
      auto &pool = members[donor];
      std::vector<std::size_t> hist(dataset.class_count, 0);
      for (const std::size_t i : pool) {
        ++hist[dataset.labels[i]];
      }
      const auto cls = static_cast<Label>(std::max_element(hist.begin(), hist.end()) - hist.begin());
      auto it = std::find_if(pool.rbegin(), pool.rend(), [&](std::size_t i) { return dataset.labels[i] == cls; });
      members[k].push_back(*it);
      pool.erase(std::next(it).base());
    }
  }

  PartitionSpec out;
  out.client_count = client_count;
  out.lambda = lambda;
  out.seed = seed;
  out.min_samples = floor_per_client;
  out.assignment.assign(n, 0);
  out.is_train.assign(n, 1);
  for (std::uint32_t k = 0; k < client_count; ++k) {
    for (const std::size_t i : members[k]) {
      out.assignment[i] = k;
    }
  }
  return out;
}

PartitionSpec train_test_split(const PartitionSpec &partition, const Dataset &dataset, double ratio,
                               std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("train_test_split: ratio must lie in (0, 1)");
  }
  if (partition.assignment.size() != dataset.size()) {
    throw ConfigError("train_test_split: partition and dataset sizes differ");
  }
  PartitionSpec out = partition;
  out.split_ratio = ratio;
  out.is_train.assign(dataset.size(), 0);
  std::mt19937_64 rng(seed);

  for (ClientId k = 0; k < partition.client_count; ++k) {
    std::vector<std::vector<std::size_t>> by_class(dataset.class_count);
    std::size_t n = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (partition.assignment[i] == k) {
        by_class[dataset.labels[i]].push_back(i);
        ++n;
      }
    }
    if (n == 0) {
      continue;
    }
    std::vector<std::vector<std::size_t>> strata;
    std::vector<std::size_t> singletons;
    for (auto &samples : by_class) {
      if (samples.size() >= 2) {
        strata.push_back(std::move(samples));
      } else if (samples.size() == 1) {
        singletons.push_back(samples.front());
      }
    }
    if (!singletons.empty()) {
      strata.push_back(std::move(singletons));
    }

    const auto target = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + kFloorSlack));
    std::vector<std::size_t> take(strata.size());
    std::vector<double> frac(strata.size());
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < strata.size(); ++s) {
      const double exact = ratio * static_cast<double>(strata[s].size());
      take[s] = static_cast<std::size_t>(std::floor(exact + kFloorSlack));
      frac[s] = exact - static_cast<double>(take[s]);
      assigned += take[s];
    }
    std::vector<std::size_t> order(strata.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t i = 0; assigned < target && i < order.size(); ++i) {
      if (take[order[i]] < strata[order[i]].size()) {
        ++take[order[i]];
        ++assigned;
      }
    }
    for (std::size_t s = 0; s < strata.size(); ++s) {
      std::shuffle(strata[s].begin(), strata[s].end(), rng);
      for (std::size_t i = 0; i < take[s]; ++i) {
        out.is_train[strata[s][i]] = 1;
      }
    }
  }
  return out;
}

}  // namespace fedhip
