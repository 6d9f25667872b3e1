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

#ifndef FEDHIP_PROTOCOL_HPP_
#define FEDHIP_PROTOCOL_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fedhip/client_engine.hpp"
#include "fedhip/server_aggregator.hpp"

namespace fedhip {

/// Runs fn(i) for i in [0, count) on up to jobs threads. The first exception
/// thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)> &fn);

/// Hook between the parties. The in-process default hands values through
/// unchanged; the harness serializes them and counts bytes.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual LocalArtifacts uplink(const LocalArtifacts &artifacts) { return artifacts; }
  virtual DownlinkPayload downlink(const DownlinkPayload &payload, ClientId /*to*/) { return payload; }
};

struct ProtocolTimings {
  double local_training = 0.0;  // seconds
  double aggregation = 0.0;
  double personalization = 0.0;
};

struct ProtocolOutcome {
  std::vector<LocalArtifacts> uploads;  // as received by the server, in client order
  AggregatorState final_state;
  GlobalModel global;
  std::vector<PersonalizedModel> personalized;
  ProtocolTimings seconds;
};

/// Local training on every client, a sequential fold in ascending client
/// position, one downlink per client, then personalization. Phases 1 and 3
/// run on up to jobs threads; results do not depend on jobs.
ProtocolOutcome run_protocol(std::span<const FeatureBundle> clients, double alpha, double beta, unsigned jobs = 1,
                             Transport *transport = nullptr);

}  // namespace fedhip

#endif  // FEDHIP_PROTOCOL_HPP_
