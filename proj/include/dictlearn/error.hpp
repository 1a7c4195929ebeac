// Copyright 2026 The dictlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dictlearn {

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kRankDeficient,
  kNotPositiveDefinite,
  kDowndateLostPD,
  kDegenerateSelection,
  kInsufficientObservations,
  kNonDivisibleDimensions,
  kStreamExhausted,
  kIo,
  kFormat,
  kConfig,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported with this exception type. The kind is
// stable and machine-readable; the message carries human context.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

// Rethrows `e` with `context` prepended, preserving the kind.
[[noreturn]] inline void rethrow_with_context(const Error& e,
                                              const std::string& context) {
  throw Error(e.kind(), context + ": " + e.what());
}

}  // namespace dictlearn
