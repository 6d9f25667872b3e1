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

#ifndef FEDHIP_SERVER_AGGREGATOR_HPP_
#define FEDHIP_SERVER_AGGREGATOR_HPP_

#include <cstdint>

#include "fedhip/analytic_core.hpp"
#include "fedhip/client_engine.hpp"

namespace fedhip {

/// Server-side running sums. Absorbing is a fold, so the server holds one
/// m x m and one m x d matrix no matter how many clients have reported.
struct AggregatorState {
  Eigen::Index m = 0;
  Eigen::Index d = 0;
  std::uint32_t absorbed = 0;  // k
  SpdMatrix cumulative_gram;   // S_k, zero until the first absorb
  Matrix fusion;               // M_k
  double beta = 0.0;
};

struct GlobalModel {
  Matrix weights;  // m x d
  std::uint32_t absorbed = 0;
};

/// What every client receives in the downlink.
struct DownlinkPayload {
  SpdMatrix cumulative_gram;  // S_K
  Matrix fusion;              // M_K
  std::uint32_t absorbed = 0;
};

/// Retention and incorporation weights of one absorb step.
struct FusionWeights {
  Matrix retention;      // mu_k = S_k^{-1} S_{k-1}
  Matrix incorporation;  // nu_k = S_k^{-1} C_k
};

AggregatorState init_state(Eigen::Index m, Eigen::Index d, double beta);

/// S' = S + C_k and M' = S'^{-1} (S M + C_k L_k), which equals
/// mu_k M + nu_k L_k with a single factorization. Throws ProtocolError on a
/// shape mismatch.
AggregatorState absorb(const AggregatorState &state, const LocalArtifacts &artifacts);

/// mu_k and nu_k for absorbing artifacts into state, without mutating it.
FusionWeights fusion_weights(const AggregatorState &state, const LocalArtifacts &artifacts);

/// G_k = (S_k - (k - 1) beta I)^{-1} S_k M_k. Throws EmptyFederationError when k = 0.
GlobalModel derive_global(const AggregatorState &state);

DownlinkPayload downlink(const AggregatorState &state);

}  // namespace fedhip

#endif  // FEDHIP_SERVER_AGGREGATOR_HPP_
