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

#ifndef FEDHIP_WIRE_HPP_
#define FEDHIP_WIRE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "fedhip/client_engine.hpp"
#include "fedhip/server_aggregator.hpp"

namespace fedhip {

/// Protocol messages between clients and server. Both directions share one
/// layout (little-endian):
///
///   "FHMS" | u32 version = 1 | u32 kind | u32 client_id | u32 m | u32 d |
///   u32 aggregated | f32[m*m] gram | f32[m*d] model
///
/// An uplink carries (C_k, L_k) with aggregated = 0; a downlink carries
/// (S_K, M_K) addressed to client_id with aggregated = K.
enum class MessageKind : std::uint32_t { kUplink = 1, kDownlink = 2 };

inline constexpr std::size_t kMessageHeaderBytes = 28;
inline constexpr std::uint32_t kMessageVersion = 1;

/// 4 (m^2 + m d): the f32 matrices without the header.
std::uint64_t payload_bytes(std::uint64_t m, std::uint64_t d);
std::uint64_t message_bytes(std::uint64_t m, std::uint64_t d);

std::vector<std::uint8_t> encode_uplink(const LocalArtifacts &artifacts);
LocalArtifacts decode_uplink(std::span<const std::uint8_t> bytes);

struct AddressedDownlink {
  ClientId client_id = 0;
  DownlinkPayload payload;
};

std::vector<std::uint8_t> encode_downlink(const DownlinkPayload &payload, ClientId client_id);
AddressedDownlink decode_downlink(std::span<const std::uint8_t> bytes);

}  // namespace fedhip

#endif  // FEDHIP_WIRE_HPP_
