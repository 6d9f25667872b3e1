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

#include "fedhip/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "fedhip/errors.hpp"

namespace fedhip {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)> &fn) {
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto &t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

namespace {

template <typename Fn>
auto tagged(const char *phase, ClientId id, Fn &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    throw PhaseError(phase, id, e.what());
  }
}

}  // namespace

ProtocolOutcome run_protocol(std::span<const FeatureBundle> clients, double alpha, double beta, unsigned jobs,
                             Transport *transport) {
  if (clients.empty()) {
    throw EmptyFederationError("run_protocol: no clients");
  }
  Transport passthrough;
  Transport &link = transport != nullptr ? *transport : passthrough;
  const std::size_t k_total = clients.size();

  using Clock = std::chrono::steady_clock;
  auto since = [](Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); };
  ProtocolOutcome out;

  auto t = Clock::now();
  std::vector<LocalArtifacts> local(k_total);
  parallel_for(k_total, jobs, [&](std::size_t i) {
    local[i] = tagged("local training", clients[i].client_id, [&] { return local_train(clients[i], beta); });
  });

  out.seconds.local_training = since(t);

  t = Clock::now();
  out.uploads.reserve(k_total);
  for (const auto &art : local) {
    out.uploads.push_back(link.uplink(art));
  }

  AggregatorState state = init_state(clients.front().feature_dim(), clients.front().labels.cols(), beta);
  for (const auto &art : out.uploads) {
    state = tagged("aggregation", art.client_id, [&] { return absorb(state, art); });
  }
  out.global = derive_global(state);

  const DownlinkPayload broadcast = downlink(state);
  std::vector<DownlinkPayload> received;
  received.reserve(k_total);
  for (const auto &client : clients) {
    received.push_back(link.downlink(broadcast, client.client_id));
  }

  out.seconds.aggregation = since(t);

  t = Clock::now();
  out.personalized.resize(k_total);
  parallel_for(k_total, jobs, [&](std::size_t i) {
    out.personalized[i] = tagged("personalization", clients[i].client_id, [&] {
      return personalize(received[i].cumulative_gram, received[i].fusion, clients[i], alpha, beta,
                         received[i].absorbed);
    });
  });
  out.seconds.personalization = since(t);
  out.final_state = std::move(state);
  return out;
}

}  // namespace fedhip
