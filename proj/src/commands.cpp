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

#include "dictlearn/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "dictlearn/cdl.hpp"
#include "dictlearn/error.hpp"
#include "dictlearn/gen_model.hpp"
#include "dictlearn/image.hpp"
#include "dictlearn/io.hpp"
#include "dictlearn/linalg.hpp"
#include "dictlearn/odl.hpp"
#include "dictlearn/online.hpp"
#include "dictlearn/sparse_coding.hpp"

namespace fs = std::filesystem;

namespace dictlearn::cli {
namespace {

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  return s;
}

GenerativeParams generative_params(const ExperimentConfig& cfg) {
  GenerativeParams g;
  g.n = cfg.get_size("n");
  g.p = cfg.get_size("p");
  g.theta = cfg.get_double("theta");
  g.gamma = cfg.get_double("gamma", 1.0);
  g.sigma = cfg.get_double("sigma", g.gamma);
  g.kappa_hat = cfg.get_double("kappa_hat", 1.0);
  g.dict_kind =
      cfg.get_choice("dict_kind", {"orthogonal", "complete"}, "orthogonal") ==
              "complete"
          ? DictKind::kComplete
          : DictKind::kOrthogonal;
  g.value_dist = cfg.get_choice("value_dist",
                                {"rademacher", "sign_halfnormal"},
                                "rademacher") == "sign_halfnormal"
                     ? ValueDist::kSignHalfNormal
                     : ValueDist::kRademacher;
  g.seed = cfg.get_u64("seed", 0);
  try {
    g.validate();
  } catch (const Error& e) {
    rethrow_with_context(e, cfg.source());
  }
  return g;
}

fs::path output_dir(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.get_string("output_dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    fail(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  }
  return dir;
}

struct RunInputs {
  Matrix signals;
  std::optional<GroundTruth> truth;
  std::optional<GenerativeParams> gen;  // synthetic data only
  std::size_t n = 0;
};

RunInputs load_inputs(const ExperimentConfig& cfg, const std::string& solver) {
  const int sources = int{cfg.has("signals")} + int{cfg.has("images")} +
                      int{cfg.has("stream")};
  if (sources > 1) {
    fail(ErrorKind::kConfig,
         cfg.source() + ": signals, images and stream are exclusive");
  }
  if (cfg.has("stream") && solver != "online") {
    fail(ErrorKind::kConfig, cfg.source() + ": stream needs solver = online");
  }
  RunInputs in;
  if (sources == 0) {
    in.gen = generative_params(cfg);
    in.truth = sample_ground_truth(*in.gen);
    in.signals = in.truth->signals;
    in.n = in.gen->n;
    return in;
  }
  if (cfg.has("signals")) {
    in.signals = read_snapshot(cfg.get_string("signals")).matrix;
  } else if (cfg.has("images")) {
    std::vector<GrayImage> images;
    for (const auto& path : cfg.get_list("images")) {
      images.push_back(read_pgm(path));
    }
    in.signals = patch_matrix(images, cfg.get_size("patch_h", 10),
                              cfg.get_size("patch_w", 10));
  }
  if (cfg.has("truth_dictionary")) {
    GroundTruth t;
    t.dictionary = read_snapshot(cfg.get_string("truth_dictionary")).matrix;
    if (cfg.has("truth_code")) {
      t.code = read_snapshot(cfg.get_string("truth_code")).matrix;
    } else if (solver == "odl" || solver == "odl+warmup") {
      fail(ErrorKind::kConfig,
           cfg.source() + ": odl with truth_dictionary also needs truth_code");
    }
    t.signals = in.signals;
    in.truth = std::move(t);
  } else if (cfg.has("truth_code")) {
    fail(ErrorKind::kConfig,
         cfg.source() + ": truth_code needs truth_dictionary");
  }
  in.n = !in.signals.empty() ? in.signals.rows()
         : in.truth          ? in.truth->dictionary.rows()
                             : 0;
  return in;
}

Matrix initial_dictionary(const ExperimentConfig& cfg,
                          const std::string& solver, std::size_t n,
                          const std::optional<GroundTruth>& truth) {
  const std::string fallback =
      (solver != "odl+warmup" && truth) ? "perturb" : "identity";
  const std::string mode =
      cfg.get_choice("init", {"perturb", "identity", "snapshot"}, fallback);
  if (mode == "identity") return Matrix::identity(n);
  if (mode == "snapshot") {
    Matrix d0 = read_snapshot(cfg.get_string("init_path")).matrix;
    if (d0.rows() != n || !d0.is_square()) {
      fail(ErrorKind::kDimensionMismatch,
           "init snapshot is " + std::to_string(d0.rows()) + "x" +
               std::to_string(d0.cols()) + ", expected " + std::to_string(n) +
               "x" + std::to_string(n));
    }
    return d0;
  }
  if (!truth) {
    fail(ErrorKind::kConfig,
         cfg.source() + ": init = perturb needs a known dictionary");
  }
  const bool odl = solver == "odl" || solver == "odl+warmup";
  const PerturbKind kind =
      cfg.get_choice("init_kind", {"orthogonal", "general"},
                     odl ? "orthogonal" : "general") == "orthogonal"
          ? PerturbKind::kOrthogonal
          : PerturbKind::kGeneral;
  return perturb_dictionary(truth->dictionary,
                            cfg.get_double("init_distance", 0.1), kind,
                            cfg.get_u64("seed", 0));
}

double default_zeta(const ExperimentConfig& cfg) {
  return cfg.get_double("zeta", cfg.get_double("gamma", 1.0) / 2.0);
}

void print_summary(std::ostream& out, const std::string& solver,
                   std::size_t iterations, const std::string& status,
                   const std::vector<TraceRecord>& traces) {
  out << "solver=" << solver << " iterations=" << iterations
      << " status=" << status;
  if (!traces.empty() && traces.back().dict_err_aligned) {
    out << " dict_err_aligned=" << format_double(*traces.back().dict_err_aligned);
  }
  out << '\n';
}

int run_odl_command(const ExperimentConfig& cfg, const std::string& solver,
                    const RunInputs& in, const fs::path& dir,
                    std::ostream& out) {
  OdlOptions opts;
  opts.zeta = default_zeta(cfg);
  opts.max_iters = cfg.get_size("max_iters", 100);
  opts.stop_tol = cfg.get_double("stop_tol", 1e-12);
  if (solver == "odl+warmup") {
    WarmupOptions w;
    if (cfg.has("warmup_zeta0")) w.zeta0 = cfg.get_double("warmup_zeta0");
    w.beta = cfg.get_double("warmup_beta", w.beta);
    w.max_iters = cfg.get_size("warmup_max_iters", w.max_iters);
    opts.warmup = w;
  }
  opts.validate();
  const Matrix d0 = initial_dictionary(cfg, solver, in.n, in.truth);

  TraceCsvWriter writer(dir / "trace.csv", false);
  const OdlResult res =
      run_odl(in.signals, d0, opts, in.truth ? &*in.truth : nullptr,
              [&](const TraceRecord& r) { writer.write(r); });
  write_snapshot(dir / "dictionary.snap", res.dictionary,
                 SnapshotKind::kOrthogonal);
  write_snapshot(dir / "code.snap", res.code, SnapshotKind::kGeneral);
  print_summary(out, solver, res.iterations,
                res.converged ? "converged" : "iteration_limit", res.traces);
  return res.converged ? kExitOk : kExitIterationLimit;
}

int run_cdl_command(const ExperimentConfig& cfg, const RunInputs& in,
                    const fs::path& dir, std::ostream& out) {
  CdlOptions opts;
  opts.zeta = default_zeta(cfg);
  opts.batch_size = cfg.get_size("batch_size");
  opts.max_iters = cfg.get_size("max_iters", 100);
  opts.stop_tol = cfg.get_double("stop_tol", 1e-12);
  opts.sampling_seed = cfg.get_u64("seed", 0);
  if (cfg.has("scale") && cfg.get_string("scale") != "auto") {
    opts.scale = cfg.get_double("scale");
  } else if (in.gen && !cfg.has("scale")) {
    opts.scale =
        static_cast<double>(in.gen->p) * in.gen->theta * in.gen->sigma *
        in.gen->sigma;
  } else {
    opts.scale = default_scale(in.signals);
  }
  opts.validate(in.signals.cols());
  const Matrix a0 = initial_dictionary(cfg, "cdl", in.n, in.truth);

  TraceCsvWriter writer(dir / "trace.csv", in.truth.has_value());
  const CdlResult res =
      run_cdl(in.signals, a0, opts, in.truth ? &*in.truth : nullptr,
              [&](const TraceRecord& r) { writer.write(r); });
  write_snapshot(dir / "dictionary.snap", res.dictionary,
                 SnapshotKind::kGeneral);
  write_snapshot(dir / "orthogonal_dictionary.snap", res.orthogonal_dictionary,
                 SnapshotKind::kOrthogonal);
  write_snapshot(dir / "preconditioner.snap", res.p_mat,
                 SnapshotKind::kGeneral);
  print_summary(out, "cdl", res.iterations,
                res.converged ? "converged" : "iteration_limit", res.traces);
  return res.converged ? kExitOk : kExitIterationLimit;
}

int run_online_command(const ExperimentConfig& cfg, const RunInputs& in,
                       const fs::path& dir, std::ostream& out) {
  OnlineOptions opts;
  opts.zeta = default_zeta(cfg);
  opts.p1 = cfg.get_size("p1");
  opts.p2 = cfg.get_size("p2");
  opts.max_iters = cfg.get_size("max_iters");
  if (cfg.has("theta_sigma2") || !in.gen) {
    opts.theta_sigma2 = cfg.get_double("theta_sigma2");
  } else {
    opts.theta_sigma2 = in.gen->theta * in.gen->sigma * in.gen->sigma;
  }
  if (cfg.has("refresh_every")) {
    opts.refresh_every = cfg.get_size("refresh_every");
  }

  std::unique_ptr<std::ifstream> file;
  std::unique_ptr<SignalStream> stream;
  if (cfg.has("stream")) {
    const std::string path = cfg.get_string("stream");
    std::istream* src = &std::cin;
    if (path != "-") {
      file = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file) fail(ErrorKind::kIo, "cannot open stream " + path);
      src = file.get();
    }
    stream = std::make_unique<BinaryRecordStream>(*src, in.n);
  } else {
    stream = std::make_unique<MatrixColumnStream>(in.signals);
  }
  const std::size_t n = stream->dimension();
  const Matrix a0 = initial_dictionary(cfg, "online", n, in.truth);

  TraceCsvWriter writer(dir / "trace.csv", in.truth.has_value());
  const OnlineResult res =
      run_online(*stream, a0, opts, in.truth ? &*in.truth : nullptr,
                 [&](const TraceRecord& r) { writer.write(r); });
  write_snapshot(dir / "dictionary.snap", res.dictionary,
                 SnapshotKind::kGeneral);
  write_snapshot(dir / "orthogonal_dictionary.snap", res.orthogonal_dictionary,
                 SnapshotKind::kOrthogonal);
  write_snapshot(dir / "preconditioner.snap", res.state.p_mat(),
                 SnapshotKind::kGeneral);
  print_summary(out, "online", res.iterations, "completed", res.traces);
  return kExitOk;
}

struct LoadedDict {
  Matrix matrix;
  std::size_t patch_h = 0;
  std::size_t patch_w = 0;
};

LoadedDict load_image_dictionary(const ImageArgs& args) {
  LoadedDict d;
  if (args.dict == "dct") {
    d.patch_h = args.patch_h != 0 ? args.patch_h : 10;
    d.patch_w = args.patch_w != 0 ? args.patch_w : d.patch_h;
    d.matrix = dct_dictionary(d.patch_h, d.patch_w);
    return d;
  }
  d.matrix = read_snapshot(args.dict).matrix;
  d.patch_h = args.patch_h;
  d.patch_w = args.patch_w;
  return d;
}

ReconstructOptions image_options(const ImageArgs& args, const LoadedDict& d) {
  ReconstructOptions opts;
  opts.patch_h = d.patch_h;
  opts.patch_w = d.patch_w;
  opts.atoms = args.k;
  opts.residual_tol = args.residual_tol;
  opts.subtract_dc = args.subtract_dc;
  return opts;
}

void report(std::ostream& out, const ImageArgs& args, double db) {
  out << "input=" << args.input.string() << " dict=" << args.dict
      << " k=" << args.k << " psnr_db=" << format_double(db) << '\n';
}

std::string strip_column(const std::string& text, std::size_t column) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t start = 0;
    for (std::size_t c = 0; c < column && start != std::string::npos; ++c) {
      start = line.find(',', start);
      if (start != std::string::npos) ++start;
    }
    if (start != std::string::npos) {
      const auto end = line.find(',', start);
      line.erase(start, end == std::string::npos ? std::string::npos
                                                 : end - start + 1);
    }
    out += line;
    out += '\n';
  }
  return out;
}

std::string comparable_contents(const fs::path& file) {
  std::string text = read_file(file);
  if (file.extension() == ".csv" && text.rfind("iter,", 0) == 0) {
    const std::string header = text.substr(0, text.find('\n'));
    std::size_t column = 0;
    std::size_t pos = 0;
    while (true) {
      const auto comma = header.find(',', pos);
      const std::string name = header.substr(pos, comma - pos);
      if (name == "elapsed_ms") return strip_column(text, column);
      if (comma == std::string::npos) break;
      pos = comma + 1;
      ++column;
    }
  }
  return text;
}

std::vector<std::string> regular_files(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

int guarded(std::ostream& err, const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error kind=" << to_string(e.kind()) << " message=\""
        << one_line(e.what()) << "\"\n";
  } catch (const std::exception& e) {
    err << "error kind=internal message=\"" << one_line(e.what()) << "\"\n";
  }
  return kExitError;
}

int cmd_synth(const ExperimentConfig& cfg, std::ostream& out) {
  const GenerativeParams g = generative_params(cfg);
  const fs::path dir = output_dir(cfg);
  const GroundTruth truth = sample_ground_truth(g);
  write_snapshot(dir / "dictionary.snap", truth.dictionary,
                 g.dict_kind == DictKind::kOrthogonal
                     ? SnapshotKind::kOrthogonal
                     : SnapshotKind::kGeneral);
  write_snapshot(dir / "code.snap", truth.code, SnapshotKind::kGeneral);
  write_snapshot(dir / "signals.snap", truth.signals, SnapshotKind::kGeneral);
  write_support_csv(dir / "support.csv", truth.support);
  out << "n=" << g.n << " p=" << g.p << " nnz=" << truth.support.size()
      << " output_dir=" << dir.string() << '\n';
  return kExitOk;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
  const std::string solver =
      cfg.get_choice("solver", {"odl", "odl+warmup", "cdl", "online"});
  const fs::path dir = output_dir(cfg);
  const RunInputs in = load_inputs(cfg, solver);
  if (solver == "cdl") return run_cdl_command(cfg, in, dir, out);
  if (solver == "online") return run_online_command(cfg, in, dir, out);
  return run_odl_command(cfg, solver, in, dir, out);
}

int cmd_code(const CodeArgs& args, std::ostream& out) {
  const Matrix dict = read_snapshot(args.dict).matrix;
  const Matrix y = read_snapshot(args.signals).matrix;
  if (dict.rows() != y.rows()) {
    fail(ErrorKind::kDimensionMismatch,
         "dictionary has " + std::to_string(dict.rows()) +
             " rows, signals have " + std::to_string(y.rows()));
  }
  std::vector<SparseCode> codes;
  if (args.method == "omp") {
    codes.reserve(y.cols());
    for (std::size_t j = 0; j < y.cols(); ++j) {
      try {
        codes.push_back(omp(dict, y.column(j), args.k, args.residual_tol));
      } catch (const Error& e) {
        rethrow_with_context(e, "signal " + std::to_string(j));
      }
    }
  } else if (args.method == "threshold") {
    if (args.preconditioner.empty()) {
      fail(ErrorKind::kInvalidArgument,
           "threshold coding needs a preconditioner snapshot");
    }
    const Matrix p_mat = read_snapshot(args.preconditioner).matrix;
    codes = code_signals_with_preconditioner(dict, p_mat, y, args.zeta);
  } else {
    fail(ErrorKind::kInvalidArgument, "unknown coding method " + args.method);
  }

  std::string csv = "signal_index,atom,coefficient\n";
  for (std::size_t j = 0; j < codes.size(); ++j) {
    for (std::size_t i = 0; i < codes[j].nnz(); ++i) {
      csv += std::to_string(j) + ',' + std::to_string(codes[j].indices[i]) +
             ',' + format_double(codes[j].values[i]) + '\n';
    }
  }
  if (args.output.empty()) {
    out << csv;
  } else {
    std::ofstream f(args.output, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::kIo, "cannot write " + args.output.string());
    f << csv;
    if (!f) fail(ErrorKind::kIo, "write failed: " + args.output.string());
  }
  return kExitOk;
}

int cmd_denoise(const ImageArgs& args, std::ostream& out) {
  const GrayImage clean = read_pgm(args.input);
  const LoadedDict d = load_image_dictionary(args);
  const Corruption cor = corrupt(clean, args.missing, args.seed);
  if (!args.mask_output.empty()) {
    write_mask(args.mask_output, cor.observed, clean.height, clean.width);
  }
  if (!args.corrupted_output.empty()) {
    write_pgm(args.corrupted_output, cor.image, args.maxval);
  }
  const GrayImage rec =
      reconstruct(cor.image, d.matrix, image_options(args, d), &cor.observed);
  if (!args.output.empty()) write_pgm(args.output, rec, args.maxval);
  report(out, args, psnr(rec, clean));
  return kExitOk;
}

int cmd_reconstruct(const ImageArgs& args, std::ostream& out) {
  const GrayImage img = read_pgm(args.input);
  const LoadedDict d = load_image_dictionary(args);
  std::vector<bool> observed;
  if (!args.mask.empty()) {
    observed = read_mask(args.mask, img.height, img.width);
  }
  const GrayImage rec =
      reconstruct(img, d.matrix, image_options(args, d),
                  args.mask.empty() ? nullptr : &observed);
  if (!args.output.empty()) write_pgm(args.output, rec, args.maxval);
  const GrayImage ref =
      args.reference.empty() ? img : read_pgm(args.reference);
  report(out, args, psnr(rec, ref));
  return kExitOk;
}

std::string compare_outputs(const fs::path& a, const fs::path& b) {
  const auto fa = regular_files(a);
  const auto fb = regular_files(b);
  if (fa != fb) return "file sets differ";
  for (const auto& name : fa) {
    if (comparable_contents(a / name) != comparable_contents(b / name)) {
      return name + " differs";
    }
  }
  return {};
}

}  // namespace dictlearn::cli
