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

#include "fedhip/wire.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "fedhip/errors.hpp"

namespace fedhip {

namespace {

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(bytes[offset + static_cast<std::size_t>(i)]) << (8 * i);
  }
  return v;
}

void put_matrix(std::vector<std::uint8_t> &out, const Matrix &a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(a(i, j))));
    }
  }
}

Matrix get_matrix(std::span<const std::uint8_t> bytes, std::size_t &offset, Eigen::Index rows, Eigen::Index cols) {
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      a(i, j) = static_cast<double>(std::bit_cast<float>(get_u32(bytes, offset)));
      offset += 4;
    }
  }
  return a;
}

std::vector<std::uint8_t> encode(MessageKind kind, ClientId id, std::uint32_t aggregated, const Matrix &gram,
                                 const Matrix &model) {
  const auto m = static_cast<std::uint64_t>(gram.rows());
  const auto d = static_cast<std::uint64_t>(model.cols());
  std::vector<std::uint8_t> out;
  out.reserve(message_bytes(m, d));
  for (const char c : {'F', 'H', 'M', 'S'}) {
    out.push_back(static_cast<std::uint8_t>(c));
  }
  put_u32(out, kMessageVersion);
  put_u32(out, static_cast<std::uint32_t>(kind));
  put_u32(out, id);
  put_u32(out, static_cast<std::uint32_t>(m));
  put_u32(out, static_cast<std::uint32_t>(d));
  put_u32(out, aggregated);
  put_matrix(out, gram);
  put_matrix(out, model);
  return out;
}

struct Decoded {
  ClientId id;
  std::uint32_t aggregated;
  Matrix gram;
  Matrix model;
};

Decoded decode(std::span<const std::uint8_t> bytes, MessageKind expected) {
  if (bytes.size() < kMessageHeaderBytes) {
    throw ParseError(ParseErrorKind::kTruncated, "message shorter than its header");
  }
  if (std::memcmp(bytes.data(), "FHMS", 4) != 0) {
    throw ParseError(ParseErrorKind::kBadMagic, "message has bad magic");
  }
  if (get_u32(bytes, 4) != kMessageVersion) {
    throw ParseError(ParseErrorKind::kVersionMismatch, "message version " + std::to_string(get_u32(bytes, 4)));
  }
  if (get_u32(bytes, 8) != static_cast<std::uint32_t>(expected)) {
    throw ProtocolError("message kind " + std::to_string(get_u32(bytes, 8)) + " where " +
                        std::to_string(static_cast<std::uint32_t>(expected)) + " was expected");
  }
  const std::uint32_t m = get_u32(bytes, 16);
  const std::uint32_t d = get_u32(bytes, 20);
  if (m == 0 || d == 0) {
    throw ParseError(ParseErrorKind::kDimensionOverflow, "message declares a zero dimension");
  }
  const std::uint64_t want = message_bytes(m, d);
  if (bytes.size() < want) {
    throw ParseError(ParseErrorKind::kTruncated, "message truncated");
  }
  if (bytes.size() > want) {
    throw ParseError(ParseErrorKind::kTrailingBytes, "message has trailing bytes");
  }
  Decoded out{get_u32(bytes, 12), get_u32(bytes, 24), {}, {}};
  std::size_t offset = kMessageHeaderBytes;
  out.gram = get_matrix(bytes, offset, m, m);
  out.model = get_matrix(bytes, offset, m, d);
  return out;
}

}  // namespace

std::uint64_t payload_bytes(std::uint64_t m, std::uint64_t d) { return 4 * (m * m + m * d); }

std::uint64_t message_bytes(std::uint64_t m, std::uint64_t d) { return kMessageHeaderBytes + payload_bytes(m, d); }

std::vector<std::uint8_t> encode_uplink(const LocalArtifacts &artifacts) {
  return encode(MessageKind::kUplink, artifacts.client_id, 0, artifacts.gram.matrix(), artifacts.model);
}

LocalArtifacts decode_uplink(std::span<const std::uint8_t> bytes) {
  Decoded msg = decode(bytes, MessageKind::kUplink);
  return {msg.id, SpdMatrix(std::move(msg.gram)), std::move(msg.model)};
}

std::vector<std::uint8_t> encode_downlink(const DownlinkPayload &payload, ClientId client_id) {
  return encode(MessageKind::kDownlink, client_id, payload.absorbed, payload.cumulative_gram.matrix(),
                payload.fusion);
}

AddressedDownlink decode_downlink(std::span<const std::uint8_t> bytes) {
  Decoded msg = decode(bytes, MessageKind::kDownlink);
  return {msg.id, {SpdMatrix(std::move(msg.gram)), std::move(msg.model), msg.aggregated}};
}

}  // namespace fedhip
