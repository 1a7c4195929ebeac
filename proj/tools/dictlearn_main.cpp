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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dictlearn/commands.hpp"
#include "dictlearn/config.hpp"

namespace cli = dictlearn::cli;

namespace {

void add_image_options(CLI::App* app, cli::ImageArgs& a) {
  app->add_option("--input", a.input, "Input PGM")->required();
  app->add_option("--dict", a.dict, "'dct' or a dictionary snapshot");
  app->add_option("--k", a.k, "Atoms per patch");
  app->add_option("--output", a.output, "Output PGM");
  app->add_option("--patch-h", a.patch_h, "Patch height");
  app->add_option("--patch-w", a.patch_w, "Patch width");
  app->add_flag("--subtract-dc", a.subtract_dc,
                "Remove each patch mean before coding");
  app->add_option("--residual-tol", a.residual_tol, "OMP residual tolerance");
  app->add_option("--maxval", a.maxval, "Output PGM maxval");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dictionary learning by alternating minimization"};
  app.require_subcommand(1);

  std::string config_path;
  auto* synth = app.add_subcommand("synth", "Sample a ground-truth instance");
  synth->add_option("config", config_path, "Experiment config")->required();

  auto* run = app.add_subcommand("run", "Run a solver and write its trace");
  run->add_option("config", config_path, "Experiment config")->required();

  cli::CodeArgs code_args;
  auto* code = app.add_subcommand("code", "Sparse-code signals");
  code->add_option("--dict", code_args.dict, "Dictionary snapshot")->required();
  code->add_option("--signals", code_args.signals, "Signal snapshot")
      ->required();
  code->add_option("--k", code_args.k, "Atoms per signal (omp)");
  code->add_option("--method", code_args.method, "omp or threshold")
      ->check(CLI::IsMember({"omp", "threshold"}));
  code->add_option("--residual-tol", code_args.residual_tol,
                   "OMP residual tolerance");
  code->add_option("--preconditioner", code_args.preconditioner,
                   "Preconditioner snapshot (threshold)");
  code->add_option("--zeta", code_args.zeta, "Threshold (threshold)");
  code->add_option("--output", code_args.output, "CSV path (default stdout)");

  cli::ImageArgs denoise_args;
  auto* denoise = app.add_subcommand(
      "denoise", "Drop pixels at random and inpaint them");
  add_image_options(denoise, denoise_args);
  denoise->add_option("--missing", denoise_args.missing,
                      "Fraction of pixels dropped");
  denoise->add_option("--seed", denoise_args.seed, "Corruption seed");
  denoise->add_option("--mask-out", denoise_args.mask_output,
                      "Write the observed-pixel mask");
  denoise->add_option("--corrupted-out", denoise_args.corrupted_output,
                      "Write the corrupted image");

  cli::ImageArgs recon_args;
  auto* recon = app.add_subcommand("reconstruct",
                                   "Code every patch and reassemble");
  add_image_options(recon, recon_args);
  recon->add_option("--mask", recon_args.mask,
                    "Observed-pixel mask PGM (0 = missing)");
  recon->add_option("--reference", recon_args.reference,
                    "Image to score against (default: input)");

  cli::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Run the built-in checks");
  verify->add_flag("--full", verify_opts.full,
                   "Include the long statistical experiments");
  verify->add_option("--filter", verify_opts.filter,
                     "Only checks whose name contains this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitError;
  }

  return cli::guarded(std::cerr, [&]() -> int {
    if (*synth) {
      return cli::cmd_synth(dictlearn::ExperimentConfig::load(config_path),
                            std::cout);
    }
    if (*run) {
      return cli::cmd_run(dictlearn::ExperimentConfig::load(config_path),
                          std::cout);
    }
    if (*code) return cli::cmd_code(code_args, std::cout);
    if (*denoise) return cli::cmd_denoise(denoise_args, std::cout);
    if (*recon) return cli::cmd_reconstruct(recon_args, std::cout);
    return cli::cmd_verify(verify_opts, std::cout);
  });
}
