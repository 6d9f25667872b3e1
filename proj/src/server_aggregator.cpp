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

#include "fedhip/server_aggregator.hpp"

#include <sstream>

#include "fedhip/errors.hpp"

namespace fedhip {

namespace {

void check_shapes(const AggregatorState &state, const LocalArtifacts &artifacts) {
  if (artifacts.gram.dim() != state.m || artifacts.model.rows() != state.m || artifacts.model.cols() != state.d) {
    std::ostringstream msg;
    msg << "client " << artifacts.client_id << " uploaded C " << artifacts.gram.dim() << "x" << artifacts.gram.dim()
        << " and L " << artifacts.model.rows() << "x" << artifacts.model.cols() << "; aggregator expects m=" << state.m
        << ", d=" << state.d;
    throw ProtocolError(msg.str());
  }
}

}  // namespace

AggregatorState init_state(Eigen::Index m, Eigen::Index d, double beta) {
  if (m < 1 || d < 1) {
    throw UsageError("init_state: m and d must be >= 1");
  }
  AggregatorState state;
  state.m = m;
  state.d = d;
  state.cumulative_gram = SpdMatrix::zero(m);
  state.fusion = Matrix::Zero(m, d);
  state.beta = beta;
  return state;
}

AggregatorState absorb(const AggregatorState &state, const LocalArtifacts &artifacts) {
  check_shapes(state, artifacts);
  AggregatorState next;
  next.m = state.m;
  next.d = state.d;
  next.beta = state.beta;
  next.absorbed = state.absorbed + 1;
  next.cumulative_gram = state.cumulative_gram.plus(artifacts.gram);
  if (state.absorbed == 0) {
    // S_0 = 0, so mu_1 = 0 and nu_1 = I.
    next.fusion = artifacts.model;
    return next;
  }
  const Matrix rhs = state.cumulative_gram.matrix() * state.fusion + artifacts.gram.matrix() * artifacts.model;
  next.fusion = solve_spd(next.cumulative_gram, rhs);
  return next;
}

FusionWeights fusion_weights(const AggregatorState &state, const LocalArtifacts &artifacts) {
  check_shapes(state, artifacts);
  const SpdMatrix next = state.cumulative_gram.plus(artifacts.gram);
  Matrix stacked(state.m, 2 * state.m);
  stacked << state.cumulative_gram.matrix(), artifacts.gram.matrix();
  const Matrix both = solve_spd(next, stacked);
  return {both.leftCols(state.m), both.rightCols(state.m)};
}

GlobalModel derive_global(const AggregatorState &state) {
  if (state.absorbed == 0) {
    throw EmptyFederationError("derive_global: no client has been absorbed");
  }
  Matrix system = state.cumulative_gram.matrix();
  system.diagonal().array() -= static_cast<double>(state.absorbed - 1) * state.beta;
  const Matrix rhs = state.cumulative_gram.matrix() * state.fusion;
  return {solve_spd(SpdMatrix(std::move(system)), rhs), state.absorbed};
}

DownlinkPayload downlink(const AggregatorState &state) {
  return {state.cumulative_gram, state.fusion, state.absorbed};
}

}  // namespace fedhip
