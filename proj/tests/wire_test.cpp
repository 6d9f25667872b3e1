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

#include <cstring>

#include <gtest/gtest.h>

#include "fedhip/errors.hpp"
#include "fedhip/server_aggregator.hpp"
#include "fedhip/wire.hpp"
#include "test_util.hpp"

namespace fedhip {
namespace {

TEST(Wire, Sizes) {
  EXPECT_EQ(payload_bytes(4, 2), 96u);
  EXPECT_EQ(message_bytes(4, 2), 28u + 96u);
  EXPECT_EQ(payload_bytes(32, 10), 4u * (32 * 32 + 32 * 10));
}

TEST(Wire, UplinkRoundTripAtFloatPrecision) {
  const LocalArtifacts a = local_train(testing::random_bundle(3, 20, 4, 2, 1), 1.0);
  const std::vector<std::uint8_t> bytes = encode_uplink(a);
  ASSERT_EQ(bytes.size(), message_bytes(4, 2));
  EXPECT_EQ(std::memcmp(bytes.data(), "FHMS", 4), 0);
  const LocalArtifacts back = decode_uplink(bytes);
  EXPECT_EQ(back.client_id, 3u);
  EXPECT_EQ(back.gram.matrix(), a.gram.matrix().cast<float>().cast<double>());
  EXPECT_EQ(back.model, a.model.cast<float>().cast<double>());
}

TEST(Wire, DownlinkMatchesUplinkSize) {
  const auto clients = testing::random_clients(3, 6, 3, 2);
  AggregatorState state = init_state(6, 3, 1.0);
  for (const auto &c : clients) {
    state = absorb(state, local_train(c, 1.0));
  }
  const DownlinkPayload p = downlink(state);
  const std::vector<std::uint8_t> bytes = encode_downlink(p, 2);
  EXPECT_EQ(bytes.size(), message_bytes(6, 3));
  EXPECT_EQ(bytes.size(), encode_uplink(local_train(clients[0], 1.0)).size());
  const AddressedDownlink back = decode_downlink(bytes);
  EXPECT_EQ(back.client_id, 2u);
  EXPECT_EQ(back.payload.absorbed, 3u);
  EXPECT_EQ(back.payload.fusion, p.fusion.cast<float>().cast<double>());
}

TEST(Wire, RejectsMalformedMessages) {
  const LocalArtifacts a = local_train(testing::random_bundle(0, 10, 3, 2, 5), 1.0);
  std::vector<std::uint8_t> bytes = encode_uplink(a);
  EXPECT_THROW(decode_downlink(bytes), ProtocolError);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(decode_uplink(truncated), ParseError);
  auto magic = bytes;
  magic[1] = 'X';
  EXPECT_THROW(decode_uplink(magic), ParseError);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(decode_uplink(trailing), ParseError);
}

}  // namespace
}  // namespace fedhip
