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

#include "dictlearn/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "dictlearn/error.hpp"
#include "dictlearn/rng.hpp"
#include "dictlearn/sparse_coding.hpp"

namespace dictlearn {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Reads the next whitespace-delimited header token, skipping # comments.
std::string next_token(std::istream& in, const std::string& where) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) fail(ErrorKind::kFormat, where + ": truncated PGM header");
  return tok;
}

std::size_t parse_positive(const std::string& tok, const std::string& where) {
  std::size_t pos = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || v == 0) {
    fail(ErrorKind::kFormat, where + ": bad PGM header field '" + tok + "'");
  }
  return v;
}

std::size_t resolve_patch_side(std::size_t requested, std::size_t atom_len) {
  if (requested != 0) return requested;
  const auto side = static_cast<std::size_t>(
      std::llround(std::sqrt(static_cast<double>(atom_len))));
  if (side * side != atom_len) {
    fail(ErrorKind::kInvalidArgument,
         "atom length " + std::to_string(atom_len) +
             " is not a square; give the patch shape explicitly");
  }
  return side;
}

}  // namespace

GrayImage::GrayImage(std::size_t h, std::size_t w)
    : height(h), width(w), pixels(h * w, 0.0) {}

GrayImage::GrayImage(std::size_t h, std::size_t w, std::vector<double> px)
    : height(h), width(w), pixels(std::move(px)) {
  if (pixels.size() != h * w) {
    fail(ErrorKind::kDimensionMismatch, "GrayImage: pixel count mismatch");
  }
  for (double v : pixels) {
    if (!std::isfinite(v)) {
      fail(ErrorKind::kInvalidArgument, "GrayImage: non-finite pixel");
    }
  }
}

GrayImage read_pgm(const std::filesystem::path& path) {
  const std::string where = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + where);
  if (next_token(in, where) != "P5") {
    fail(ErrorKind::kFormat, where + ": not a binary PGM (P5)");
  }
  const std::size_t width = parse_positive(next_token(in, where), where);
  const std::size_t height = parse_positive(next_token(in, where), where);
  const std::size_t maxval = parse_positive(next_token(in, where), where);
  if (maxval > 65535) fail(ErrorKind::kFormat, where + ": maxval > 65535");
  // next_token consumed exactly one whitespace byte after maxval.

  const bool wide = maxval > 255;
  const std::size_t count = width * height;
  std::vector<unsigned char> raw(count * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    fail(ErrorKind::kFormat, where + ": truncated pixel data");
  }
  std::vector<double> px(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = wide ? (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1]
                            : unsigned{raw[i]};
    if (v > maxval) fail(ErrorKind::kFormat, where + ": sample above maxval");
    px[i] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return GrayImage(height, width, std::move(px));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img,
               std::uint16_t maxval) {
  if (maxval == 0) fail(ErrorKind::kInvalidArgument, "write_pgm: maxval 0");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << '\n' << maxval << '\n';
  const bool wide = maxval > 255;
  for (double v : img.pixels) {
    const auto q = static_cast<unsigned>(
        std::lround(clamp01(v) * static_cast<double>(maxval)));
    if (wide) out.put(static_cast<char>(q >> 8));
    out.put(static_cast<char>(q & 0xff));
  }
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

std::vector<bool> read_mask(const std::filesystem::path& path,
                            std::size_t height, std::size_t width) {
  const GrayImage m = read_pgm(path);
  if (m.height != height || m.width != width) {
    fail(ErrorKind::kDimensionMismatch,
         path.string() + ": mask is " + std::to_string(m.height) + "x" +
             std::to_string(m.width) + ", image is " + std::to_string(height) +
             "x" + std::to_string(width));
  }
  std::vector<bool> observed(m.pixels.size());
  for (std::size_t i = 0; i < m.pixels.size(); ++i) {
    observed[i] = m.pixels[i] != 0.0;
  }
  return observed;
}

void write_mask(const std::filesystem::path& path,
                const std::vector<bool>& observed, std::size_t height,
                std::size_t width) {
  if (observed.size() != height * width) {
    fail(ErrorKind::kDimensionMismatch, "write_mask: size mismatch");
  }
  GrayImage m(height, width);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    m.pixels[i] = observed[i] ? 1.0 : 0.0;
  }
  write_pgm(path, m, 255);
}

PatchGrid extract_patches(const GrayImage& img, std::size_t patch_h,
                          std::size_t patch_w) {
  if (patch_h == 0 || patch_w == 0 || img.height % patch_h != 0 ||
      img.width % patch_w != 0) {
    fail(ErrorKind::kNonDivisibleDimensions,
         std::to_string(img.height) + "x" + std::to_string(img.width) +
             " image does not tile into " + std::to_string(patch_h) + "x" +
             std::to_string(patch_w) + " patches");
  }
  PatchGrid g;
  g.patch_h = patch_h;
  g.patch_w = patch_w;
  g.grid_rows = img.height / patch_h;
  g.grid_cols = img.width / patch_w;
  g.patches = Matrix(patch_h * patch_w, g.grid_rows * g.grid_cols);
  for (std::size_t gr = 0; gr < g.grid_rows; ++gr) {
    for (std::size_t gc = 0; gc < g.grid_cols; ++gc) {
      const std::size_t col = gr * g.grid_cols + gc;
      for (std::size_t r = 0; r < patch_h; ++r) {
        for (std::size_t c = 0; c < patch_w; ++c) {
          g.patches(r * patch_w + c, col) =
              img.at(gr * patch_h + r, gc * patch_w + c);
        }
      }
    }
  }
  return g;
}

GrayImage assemble_patches(const PatchGrid& g) {
  if (g.patches.rows() != g.patch_h * g.patch_w ||
      g.patches.cols() != g.grid_rows * g.grid_cols) {
    fail(ErrorKind::kDimensionMismatch, "assemble_patches: grid shape");
  }
  GrayImage img(g.grid_rows * g.patch_h, g.grid_cols * g.patch_w);
  for (std::size_t gr = 0; gr < g.grid_rows; ++gr) {
    for (std::size_t gc = 0; gc < g.grid_cols; ++gc) {
      const std::size_t col = gr * g.grid_cols + gc;
      for (std::size_t r = 0; r < g.patch_h; ++r) {
        for (std::size_t c = 0; c < g.patch_w; ++c) {
          img.at(gr * g.patch_h + r, gc * g.patch_w + c) =
              clamp01(g.patches(r * g.patch_w + c, col));
        }
      }
    }
  }
  return img;
}

Matrix dct_dictionary(std::size_t patch_h, std::size_t patch_w) {
  if (patch_h == 0 || patch_w == 0) {
    fail(ErrorKind::kInvalidArgument, "dct_dictionary: empty patch");
  }
  auto basis = [](std::size_t len) {
    Matrix b(len, len);  // b(k, x): k-th cosine at sample x
    const double l = static_cast<double>(len);
    for (std::size_t k = 0; k < len; ++k) {
      const double alpha = std::sqrt((k == 0 ? 1.0 : 2.0) / l);
      for (std::size_t x = 0; x < len; ++x) {
        b(k, x) = alpha * std::cos(std::numbers::pi *
                                   (2.0 * static_cast<double>(x) + 1.0) *
                                   static_cast<double>(k) / (2.0 * l));
      }
    }
    return b;
  };
  const Matrix bh = basis(patch_h);
  const Matrix bw = basis(patch_w);
  const std::size_t dim = patch_h * patch_w;
  Matrix d(dim, dim);
  for (std::size_t u = 0; u < patch_h; ++u) {
    for (std::size_t v = 0; v < patch_w; ++v) {
      const std::size_t atom = u * patch_w + v;
      for (std::size_t r = 0; r < patch_h; ++r) {
        for (std::size_t c = 0; c < patch_w; ++c) {
          d(r * patch_w + c, atom) = bh(u, r) * bw(v, c);
        }
      }
    }
  }
  return d;
}

Corruption corrupt(const GrayImage& img, double missing_fraction,
                   std::uint64_t seed) {
  if (!(missing_fraction >= 0.0 && missing_fraction <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "missing fraction must be in [0, 1]");
  }
  const std::size_t total = img.pixels.size();
  const auto missing = static_cast<std::size_t>(
      std::llround(missing_fraction * static_cast<double>(total)));
  Rng rng = Rng::derive(seed, "corrupt");
  Corruption out{img, std::vector<bool>(total, true)};
  for (std::size_t idx : rng.sample_without_replacement(total, missing)) {
    out.image.pixels[idx] = 0.0;
    out.observed[idx] = false;
  }
  return out;
}

GrayImage reconstruct(const GrayImage& img, const Matrix& dict,
                      const ReconstructOptions& opts,
                      const std::vector<bool>* observed) {
  const std::size_t ph = resolve_patch_side(opts.patch_h, dict.rows());
  const std::size_t pw =
      opts.patch_w != 0 ? opts.patch_w : (opts.patch_h != 0 ? dict.rows() / ph
                                                            : ph);
  if (ph * pw != dict.rows()) {
    fail(ErrorKind::kDimensionMismatch,
         "patch shape " + std::to_string(ph) + "x" + std::to_string(pw) +
             " does not match atom length " + std::to_string(dict.rows()));
  }
  if (opts.atoms == 0 || opts.atoms > dict.cols()) {
    fail(ErrorKind::kInvalidArgument, "atom budget out of range");
  }
  if (observed != nullptr && observed->size() != img.pixels.size()) {
    fail(ErrorKind::kDimensionMismatch, "mask size != image size");
  }

  PatchGrid grid = extract_patches(img, ph, pw);
  PatchGrid mask_grid;
  if (observed != nullptr) {
    GrayImage m(img.height, img.width);
    for (std::size_t i = 0; i < observed->size(); ++i) {
      m.pixels[i] = (*observed)[i] ? 1.0 : 0.0;
    }
    mask_grid = extract_patches(m, ph, pw);
  }

  const std::size_t dim = ph * pw;
  for (std::size_t col = 0; col < grid.patches.cols(); ++col) {
    Vector patch = grid.patches.column(col);
    std::vector<bool> seen(dim, true);
    if (observed != nullptr) {
      for (std::size_t i = 0; i < dim; ++i) {
        seen[i] = mask_grid.patches(i, col) != 0.0;
      }
    }
    double mean = 0.0;
    if (opts.subtract_dc) {
      std::size_t cnt = 0;
      for (std::size_t i = 0; i < dim; ++i) {
        if (seen[i]) {
          mean += patch[i];
          ++cnt;
        }
      }
      mean = cnt > 0 ? mean / static_cast<double>(cnt) : 0.0;
      for (double& v : patch) v -= mean;
    }

    SparseCode code;
    try {
      if (observed != nullptr) {
        const std::size_t seen_count =
            static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
        code = masked_omp(dict, patch, seen,
                          std::min(opts.atoms, seen_count), opts.residual_tol);
      } else {
        code = omp(dict, patch, std::min(opts.atoms, dim), opts.residual_tol);
      }
    } catch (const Error& e) {
      rethrow_with_context(e, "reconstruct patch " + std::to_string(col));
    }
    Vector rec = synthesize(dict, code);
    for (double& v : rec) v += mean;
    grid.patches.set_column(col, rec);
  }
  return assemble_patches(grid);
}

double psnr(const GrayImage& a, const GrayImage& b) {
  if (a.height != b.height || a.width != b.width) {
    fail(ErrorKind::kDimensionMismatch, "psnr: image sizes differ");
  }
  if (a.pixels.empty()) return kPsnrCapDb;
  double se = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = a.pixels[i] - b.pixels[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.pixels.size());
  if (mse == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, -10.0 * std::log10(mse));
}

Matrix patch_matrix(const std::vector<GrayImage>& images, std::size_t patch_h,
                    std::size_t patch_w) {
  std::vector<Matrix> parts;
  std::size_t total = 0;
  for (const auto& img : images) {
    parts.push_back(extract_patches(img, patch_h, patch_w).patches);
    total += parts.back().cols();
  }
  Matrix y(patch_h * patch_w, total);
  std::size_t offset = 0;
  for (const auto& part : parts) {
    for (std::size_t r = 0; r < part.rows(); ++r) {
      std::copy(part.row(r).begin(), part.row(r).end(),
                y.row(r).begin() + static_cast<std::ptrdiff_t>(offset));
    }
    offset += part.cols();
  }
  return y;
}

}  // namespace dictlearn
