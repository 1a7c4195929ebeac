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

// Acceptance gate: one PASS/FAIL line per criterion, exit 1 on any failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dictlearn/commands.hpp"
#include "dictlearn/config.hpp"
#include "dictlearn/experiments.hpp"
#include "dictlearn/image.hpp"
#include "dictlearn/io.hpp"
#include "dictlearn/linalg.hpp"
#include "dictlearn/odl.hpp"

namespace dictlearn {
namespace {

namespace ex = experiments;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0: none
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

Outcome fixed_point() {
  const auto r = ex::fixed_point(50, 5000, 0.1, 1);
  const double tol = 1e-10;
  return {r.code_err <= tol && r.dict_err <= tol,
          "code_err=" + fmt(r.code_err) + " dict_err=" + fmt(r.dict_err)};
}

Outcome contraction() {
  int good = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto r = ex::contraction_trial(20, 0.1, 0.1, 1e-8, s);
    worst = std::max(worst, r.max_ratio);
    good += r.max_ratio <= 0.5 && r.reached_floor;
  }
  return {good >= 18, "seeds=" + std::to_string(good) + "/20 max_ratio=" +
                          fmt(worst)};
}

Outcome support_recovery() {
  int good = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    good += ex::support_recovery_trial(20, 0.1, 0.1, s);
  }
  return {good >= 18, "seeds=" + std::to_string(good) + "/20"};
}

Outcome warmup_recovery() {
  int good = 0;
  bool initial_ok = true;
  std::size_t first_initial = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto r = ex::warmup_trial(s, WarmupOptions{}, 50, 1e-6);
    if (s == 0) first_initial = r.initial_mismatch;
    initial_ok = initial_ok && r.initial_mismatch == r.support_size;
    good += r.mismatch_zero_at.has_value() && r.code_converged_at.has_value();
  }
  return {good >= 8 && initial_ok,
          "seeds=" + std::to_string(good) + "/10 initial_mismatch_equals_" +
              "support=" + (initial_ok ? "yes" : "no") + " seed0_initial=" +
              std::to_string(first_initial)};
}

Outcome spectral() {
  int good = 0;
  double max_upper = 0.0, min_lower = 1e300;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto r = ex::spectral_trial(50, 0.1, 5000, s);
    max_upper = std::max(max_upper, r.upper);
    min_lower = std::min(min_lower, r.lower);
    good += r.upper <= 1.1 && r.lower >= 0.9;
  }
  return {good >= 9, "seeds=" + std::to_string(good) + "/10 max_upper=" +
                         fmt(max_upper) + " min_lower=" + fmt(min_lower)};
}

Outcome precond_identity() {
  double worst = 0.0;
  std::size_t count = 0;
  const std::size_t ns[] = {8, 32, 64};
  const double kappas[] = {1.0, 2.0, 5.0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const double d =
        ex::precond_identity_defect(ns[s % 3], kappas[(s / 3) % 3], s);
    worst = std::max(worst, d);
    ++count;
  }
  return {worst <= 1e-9, "instances=" + std::to_string(count) +
                             " max_defect=" + fmt(worst)};
}

Outcome online_oracle() {
  const auto r = ex::online_oracle_trial(30, 500, 50, 1);
  const bool ok = r.checks == 10 && r.max_l_err <= 1e-6 && r.max_z_err <= 1e-6;
  return {ok, "checks=" + std::to_string(r.checks) + " max_l_err=" +
                  fmt(r.max_l_err) + " max_z_err=" + fmt(r.max_z_err)};
}

Outcome cdl_floor() {
  const ex::CdlFloorSetup setup;
  double small = 0.0, large = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    small += ex::cdl_floor_trial(setup, 12500, s) / 10.0;
    large += ex::cdl_floor_trial(setup, 50000, s) / 10.0;
  }
  return {large <= 0.7 * small, "err_p12500=" + fmt(small) +
                                    " err_p50000=" + fmt(large) +
                                    " ratio=" + fmt(large / small)};
}

Outcome online_floor() {
  const ex::OnlineFloorSetup setup;
  double early = 0.0, late = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto r = ex::online_floor_trial(setup, s);
    early += r.early_mean / 5.0;
    late += r.late_mean / 5.0;
  }
  return {late <= 0.8 * early, "early=" + fmt(early) + " late=" + fmt(late) +
                                   " ratio=" + fmt(late / early)};
}

Outcome omp_oracle() {
  int matches = 0;
  double worst_orth = 0.0, worst_coeff = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const std::size_t n = 1 + s % 8;
    const std::size_t k = 1 + (s / 8) % n;
    const auto r = ex::omp_oracle_trial(n, k, s);
    matches += r.matches;
    worst_orth = std::max(worst_orth, r.residual_orth);
    worst_coeff = std::max(worst_coeff, r.coeff_err);
  }
  return {matches == 1000 && worst_orth <= 1e-9,
          "matches=" + std::to_string(matches) + "/1000 max_residual_orth=" +
              fmt(worst_orth) + " max_coeff_err=" + fmt(worst_coeff)};
}

Outcome image() {
  double min_cap = kPsnrCapDb;
  std::uint64_t seed = 0;
  for (std::size_t size : {10u, 30u, 50u}) {
    for (std::size_t patch : {5u, 10u}) {
      min_cap = std::min(min_cap, ex::dct_full_basis_psnr(size, size, patch,
                                                          seed++));
    }
  }
  int good = 0;
  double min_gain = 1e300, zero_fill = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto r = ex::inpaint_trial(35, 0.5, s);
    zero_fill += r.psnr_zero_fill / 10.0;
    good += r.psnr_reconstructed > r.psnr_corrupted;
    min_gain = std::min(min_gain, r.psnr_reconstructed - r.psnr_corrupted);
  }
  return {min_cap >= kPsnrCapDb && good >= 9,
          "dct_min_psnr=" + fmt(min_cap) + " masked_seeds=" +
              std::to_string(good) + "/10 min_gain_db=" + fmt(min_gain) +
              " mean_zero_fill_psnr=" + fmt(zero_fill)};
}

// Runs `fn` into two sibling directories and compares what it wrote.
std::string twice(const fs::path& root, const std::string& name,
                  const std::function<std::string(const fs::path&)>& fn) {
  std::string stdout_a, stdout_b;
  for (const char* side : {"a", "b"}) {
    const fs::path dir = root / side / name;
    fs::create_directories(dir);
    std::string text = fn(dir);
    // The output directory is echoed by some commands.
    for (std::size_t pos; (pos = text.find(dir.string())) != std::string::npos;) {
      text.replace(pos, dir.string().size(), "<dir>");
    }
    (std::string(side) == "a" ? stdout_a : stdout_b) = text;
  }
  if (stdout_a != stdout_b) return name + ": stdout differs";
  const std::string diff =
      cli::compare_outputs(root / "a" / name, root / "b" / name);
  return diff.empty() ? std::string{} : name + ": " + diff;
}

Outcome determinism() {
  std::string tmpl =
      (fs::temp_directory_path() / "dictlearn-accept-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) return {false, "no scratch dir"};
  const fs::path root = tmpl;
  std::vector<std::string> failures;
  std::vector<std::string> checked;
  const auto check = [&](const std::string& name,
                         const std::function<std::string(const fs::path&)>& fn) {
    checked.push_back(name);
    try {
      const std::string d = twice(root, name, fn);
      if (!d.empty()) failures.push_back(d);
    } catch (const std::exception& e) {
      failures.push_back(name + ": threw " + e.what());
    }
  };

  const std::string base =
      "seed = 4\nn = 6\np = 3000\ntheta = 0.2\nmax_iters = 20\n"
      "init_distance = 0.05\n";
  const auto config_cmd = [&](const std::string& extra, bool synth) {
    return [=](const fs::path& dir) {
      auto cfg = ExperimentConfig::parse(base + extra, "determinism");
      cfg.set("output_dir", dir.string());
      std::ostringstream out;
      if (synth) {
        cli::cmd_synth(cfg, out);
      } else {
        cli::cmd_run(cfg, out);
      }
      return out.str();
    };
  };
  check("synth", config_cmd("", true));
  check("run_odl", config_cmd("solver = odl\n", false));
  check("run_odl_warmup", config_cmd("solver = odl+warmup\n", false));
  check("run_cdl", config_cmd("solver = cdl\ndict_kind = complete\n"
                              "kappa_hat = 2\nbatch_size = 500\n",
                              false));
  check("run_online", config_cmd("solver = online\ndict_kind = complete\n"
                                 "kappa_hat = 2\np1 = 1000\np2 = 500\n",
                                 false));

  // Shared inputs for the coding and image commands.
  const fs::path inputs = root / "inputs";
  fs::create_directories(inputs);
  {
    auto cfg = ExperimentConfig::parse(base, "determinism");
    cfg.set("output_dir", inputs.string());
    std::ostringstream sink;
    cli::cmd_synth(cfg, sink);
    GrayImage img(50, 50);
    for (std::size_t r = 0; r < 50; ++r) {
      for (std::size_t c = 0; c < 50; ++c) {
        img.at(r, c) = 0.5 + 0.4 * std::sin(0.2 * r) * std::cos(0.15 * c);
      }
    }
    write_pgm(inputs / "img.pgm", img);
  }
  for (const char* method : {"omp", "threshold"}) {
    check(std::string("code_") + method, [&](const fs::path& dir) {
      cli::CodeArgs a;
      a.dict = inputs / "dictionary.snap";
      a.signals = inputs / "signals.snap";
      a.method = method;
      if (a.method == "threshold") {
        a.dict = root / "a" / "run_cdl" / "dictionary.snap";
        a.preconditioner = root / "a" / "run_cdl" / "preconditioner.snap";
      }
      a.k = 3;
      a.output = dir / "codes.csv";
      std::ostringstream out;
      cli::cmd_code(a, out);
      return out.str();
    });
  }
  check("denoise", [&](const fs::path& dir) {
    cli::ImageArgs a;
    a.input = inputs / "img.pgm";
    a.output = dir / "out.pgm";
    a.mask_output = dir / "mask.pgm";
    a.corrupted_output = dir / "corrupted.pgm";
    a.seed = 3;
    std::ostringstream out;
    cli::cmd_denoise(a, out);
    return out.str();
  });
  check("reconstruct", [&](const fs::path& dir) {
    const fs::path src = root / "a" / "denoise";
    cli::ImageArgs a;
    a.input = src / "corrupted.pgm";
    a.mask = src / "mask.pgm";
    a.reference = inputs / "img.pgm";
    a.output = dir / "out.pgm";
    std::ostringstream out;
    cli::cmd_reconstruct(a, out);
    return out.str();
  });
  check("verify", [&](const fs::path& dir) {
    cli::VerifyOptions o;
    o.filter = "oracle";
    o.scratch = dir / "scratch";
    std::ostringstream out;
    cli::cmd_verify(o, out);
    return out.str();
  });

  std::error_code ec;
  fs::remove_all(root, ec);
  std::string detail = "subcommands=" + std::to_string(checked.size());
  for (const auto& f : failures) detail += " [" + f + "]";
  return {failures.empty(), detail};
}

std::vector<Criterion> criteria() {
  return {
      {1, "fixed_point", 1.0, fixed_point},
      {2, "contraction", 10.0, contraction},
      {3, "support_recovery", 0.0, support_recovery},
      {4, "warmup_recovery", 1.0, warmup_recovery},
      {5, "spectral_bounds", 10.0, spectral},
      {6, "preconditioned_orthogonality", 0.0, precond_identity},
      {7, "online_oracle", 5.0, online_oracle},
      {8, "cdl_floor_scaling", 120.0, cdl_floor},
      {9, "online_floor_decay", 120.0, online_floor},
      {10, "omp_oracle", 0.0, omp_oracle},
      {11, "image_pipeline", 0.0, image},
      {12, "determinism", 0.0, determinism},
  };
}

}  // namespace
}  // namespace dictlearn

int main(int argc, char** argv) {
  using namespace dictlearn;
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number(s) to run")
      ->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const auto& c : criteria()) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    bool pass = r.pass;
    std::string timing = "time_s=" + fmt(secs);
    if (c.time_limit_s > 0.0) {
      timing += " limit_s=" + fmt(c.time_limit_s);
      if (secs >= c.time_limit_s) pass = false;
    }
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << ": "
              << c.name << ' ' << r.detail << ' ' << timing << std::endl;
    failures += !pass;
  }
  return failures == 0 ? 0 : 1;
}
