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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dictlearn/config.hpp"
#include "dictlearn/matrix.hpp"

namespace dictlearn::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIterationLimit = 2;

// Runs `fn`, turning exceptions into exit code 1 and a single line
// `error kind=<kind> message="<text>"` on `err`.
int guarded(std::ostream& err, const std::function<int()>& fn);

// Writes dictionary.snap, code.snap, signals.snap and support.csv to
// output_dir.
int cmd_synth(const ExperimentConfig& cfg, std::ostream& out);

// Runs the configured solver; writes trace.csv and dictionary.snap (plus
// code.snap for odl, orthogonal_dictionary.snap and preconditioner.snap for
// cdl and online). Returns 0 on convergence, 2 when the iteration limit was
// reached first.
int cmd_run(const ExperimentConfig& cfg, std::ostream& out);

struct CodeArgs {
  std::filesystem::path dict;
  std::filesystem::path signals;
  std::filesystem::path output;  // empty: write to `out`
  std::string method = "omp";    // omp | threshold
  std::size_t k = 0;
  double residual_tol = 1e-9;
  std::filesystem::path preconditioner;  // threshold method
  double zeta = 0.5;
};
// CSV `signal_index,atom,coefficient`, one row per nonzero.
int cmd_code(const CodeArgs& args, std::ostream& out);

struct ImageArgs {
  std::filesystem::path input;
  std::string dict = "dct";  // "dct" or a snapshot path
  std::size_t k = 35;
  std::filesystem::path output;
  std::size_t patch_h = 0;  // 0: 10 for dct, square root of the atom length
  std::size_t patch_w = 0;  //    for snapshots
  bool subtract_dc = false;
  double residual_tol = 1e-9;
  std::uint16_t maxval = 255;
  // denoise
  double missing = 0.5;
  std::uint64_t seed = 0;
  std::filesystem::path mask_output;
  std::filesystem::path corrupted_output;
  // reconstruct
  std::filesystem::path mask;
  std::filesystem::path reference;
};
// Corrupts the input, inpaints it and scores against the clean input.
int cmd_denoise(const ImageArgs& args, std::ostream& out);
// Codes the input (masked when a mask is given) and scores against the
// reference, or the input itself.
int cmd_reconstruct(const ImageArgs& args, std::ostream& out);

using DowndateFn = std::function<LowerTriangular(const LowerTriangular&,
                                                 std::span<const double>)>;

struct VerifyOptions {
  bool full = false;       // include the minute-scale experiments
  std::string filter;      // substring of check names; empty runs all
  DowndateFn downdate;     // empty: the library routine
  std::filesystem::path scratch;  // empty: a fresh temp directory
};

struct CheckOutcome {
  bool pass = false;
  std::string detail;
};

struct VerifyCheck {
  std::string name;
  bool slow = false;
  std::function<CheckOutcome()> run;
};

std::vector<VerifyCheck> verify_checks(const VerifyOptions& opts);

// One `PASS|FAIL <name> <detail>` line per check; exit 1 on any failure.
int cmd_verify(const VerifyOptions& opts, std::ostream& out);

// Byte comparison of two output directories; trace CSVs are compared with
// the elapsed_ms column removed. Returns an empty string when identical.
std::string compare_outputs(const std::filesystem::path& a,
                            const std::filesystem::path& b);

}  // namespace dictlearn::cli
