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

#include <chrono>
#include <optional>

#include "dictlearn/gen_model.hpp"
#include "dictlearn/odl.hpp"

namespace dictlearn::detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Fills the dictionary error fields of `rec` for `dict` against `reference`.
void fill_dictionary_metrics(TraceRecord& rec, const Matrix& dict,
                             const Matrix& reference,
                             Alignment* alignment_out = nullptr);

// Fills the code error fields of `rec`; `alignment` maps the code rows onto
// the truth rows.
void fill_code_metrics(TraceRecord& rec, const Matrix& code,
                       const Alignment& alignment, const Matrix& code_star,
                       double code_star_spectral_norm);

// Sets rec.contraction from the previous record's dictionary error.
void fill_contraction(TraceRecord& rec, const std::optional<double>& prev_err);

void emit(std::vector<TraceRecord>& traces, const TraceSink& sink,
          TraceRecord rec);

}  // namespace dictlearn::detail
