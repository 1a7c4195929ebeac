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

#include "dictlearn/error.hpp"

namespace dictlearn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kRankDeficient: return "RankDeficient";
    case ErrorKind::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::kDowndateLostPD: return "DowndateLostPD";
    case ErrorKind::kDegenerateSelection: return "DegenerateSelection";
    case ErrorKind::kInsufficientObservations: return "InsufficientObservations";
    case ErrorKind::kNonDivisibleDimensions: return "NonDivisibleDimensions";
    case ErrorKind::kStreamExhausted: return "StreamExhausted";
    case ErrorKind::kIo: return "Io";
    case ErrorKind::kFormat: return "Format";
    case ErrorKind::kConfig: return "Config";
  }
  return "Unknown";
}

}  // namespace dictlearn
