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

#ifndef FEDHIP_ERRORS_HPP_
#define FEDHIP_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fedhip {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, out-of-range labels, malformed one-hot rows.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A symmetric factorization hit a non-positive pivot.
class SingularityError : public Error {
 public:
  SingularityError(const std::string &what, std::size_t pivot)
      : Error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Shape disagreement between parties exchanging matrices.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

/// derive_global on an aggregator that has absorbed nothing.
class EmptyFederationError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure inside the protocol with the phase and client it hit.
class PhaseError : public Error {
 public:
  PhaseError(std::string phase, std::size_t client, const std::string &cause)
      : Error(phase + ", client " + std::to_string(client) + ": " + cause), phase_(std::move(phase)), client_(client) {}
  const std::string &phase() const noexcept { return phase_; }
  std::size_t client() const noexcept { return client_; }

 private:
  std::string phase_;
  std::size_t client_;
};

enum class ParseErrorKind { kIo, kBadMagic, kVersionMismatch, kTruncated, kDimensionOverflow, kTrailingBytes };

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, const std::string &what) : Error(what), kind_(kind) {}
  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

}  // namespace fedhip

#endif  // FEDHIP_ERRORS_HPP_
