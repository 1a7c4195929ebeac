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
#include <optional>
#include <vector>

#include "dictlearn/matrix.hpp"

namespace dictlearn {

// Grayscale image with intensities in [0, 1], row-major.
struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(std::size_t h, std::size_t w);
  GrayImage(std::size_t h, std::size_t w, std::vector<double> px);

  double& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
  double at(std::size_t r, std::size_t c) const {
    return pixels[r * width + c];
  }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// Binary PGM (P5). maxval <= 255 is read as 8-bit samples, larger as 16-bit
// big-endian; values map linearly to [0, 1].
GrayImage read_pgm(const std::filesystem::path& path);
// Writes with the given maxval (255 or 65535 typical); pixels are clamped to
// [0, 1] and rounded.
void write_pgm(const std::filesystem::path& path, const GrayImage& img,
               std::uint16_t maxval = 255);

// Masks are PGMs with 0 = missing and any other value = observed.
std::vector<bool> read_mask(const std::filesystem::path& path,
                            std::size_t height, std::size_t width);
void write_mask(const std::filesystem::path& path,
                const std::vector<bool>& observed, std::size_t height,
                std::size_t width);

// Non-overlapping tiling of an image into vectorized patches. Column
// g = gr * grid_cols + gc holds the patch at grid cell (gr, gc), flattened
// row-major.
struct PatchGrid {
  std::size_t patch_h = 0;
  std::size_t patch_w = 0;
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  Matrix patches;
};

PatchGrid extract_patches(const GrayImage& img, std::size_t patch_h,
                          std::size_t patch_w);
// Inverse of extract_patches; pixels are clamped to [0, 1].
GrayImage assemble_patches(const PatchGrid& grid);

// Orthonormal separable 2-D DCT-II basis. Atom u * patch_w + v is the
// product of the u-th vertical and v-th horizontal cosine, flattened
// row-major; atom 0 is constant.
Matrix dct_dictionary(std::size_t patch_h, std::size_t patch_w);

struct Corruption {
  GrayImage image;
  std::vector<bool> observed;  // row-major, false where a pixel was dropped
};

// Zeroes exactly round(missing_fraction * pixels) uniformly chosen pixels.
Corruption corrupt(const GrayImage& img, double missing_fraction,
                   std::uint64_t seed);

struct ReconstructOptions {
  std::size_t patch_h = 0;  // 0: square patches sized from the dictionary
  std::size_t patch_w = 0;
  std::size_t atoms = 35;
  double residual_tol = 1e-9;
  // Remove each patch's mean (over observed pixels) before coding and add it
  // back afterwards.
  bool subtract_dc = false;
};

// Codes every patch with OMP (masked OMP when `observed` is given) and
// assembles dict * code.
GrayImage reconstruct(const GrayImage& img, const Matrix& dict,
                      const ReconstructOptions& opts,
                      const std::vector<bool>* observed = nullptr);

inline constexpr double kPsnrCapDb = 200.0;

// 10 log10(1 / MSE), capped at kPsnrCapDb.
double psnr(const GrayImage& a, const GrayImage& b);

// Matrix whose columns are the patches of every image, in order.
Matrix patch_matrix(const std::vector<GrayImage>& images, std::size_t patch_h,
                    std::size_t patch_w);

}  // namespace dictlearn
