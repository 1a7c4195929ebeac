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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "dictlearn/error.hpp"
#include "dictlearn/image.hpp"
#include "dictlearn/linalg.hpp"
#include "dictlearn/rng.hpp"
#include "test_support.hpp"

namespace dictlearn {
namespace {

namespace fs = std::filesystem;
using testing::TestRng;

GrayImage random_image(std::size_t h, std::size_t w, std::uint64_t seed) {
  TestRng rng(seed);
  GrayImage img(h, w);
  for (double& v : img.pixels) v = rng.uniform();
  return img;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "dl-img-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(Patches, ShapeAndOrder) {
  const GrayImage img = random_image(50, 50, 1);
  const PatchGrid g = extract_patches(img, 5, 5);
  EXPECT_EQ(g.patches.rows(), 25u);
  EXPECT_EQ(g.patches.cols(), 100u);
  // Patch 11 sits at grid (1, 1); its entry (2, 3) is pixel (7, 8).
  EXPECT_EQ(g.patches(2 * 5 + 3, 11), img.at(7, 8));
}

TEST(Patches, NonDivisible) {
  try {
    extract_patches(GrayImage(7, 7), 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonDivisibleDimensions);
  }
}

TEST(Patches, RoundTrip) {
  const std::pair<std::size_t, std::size_t> sizes[] = {
      {10, 10}, {20, 30}, {50, 50}};
  for (auto [h, w] : sizes) {
    const GrayImage img = random_image(h, w, h * w);
    for (std::size_t ph : {1u, 2u, 5u, 10u}) {
      EXPECT_EQ(assemble_patches(extract_patches(img, ph, ph)), img);
    }
  }
}

TEST(Patches, AssembleClamps) {
  PatchGrid g = extract_patches(GrayImage(2, 2), 2, 2);
  g.patches(0, 0) = 1.5;
  g.patches(1, 0) = -0.25;
  const GrayImage img = assemble_patches(g);
  EXPECT_EQ(img.at(0, 0), 1.0);
  EXPECT_EQ(img.at(0, 1), 0.0);
}

TEST(Dct, Examples) {
  EXPECT_EQ(dct_dictionary(1, 1), (Matrix{{1.0}}));
  const Matrix d = dct_dictionary(4, 4);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(d(i, 0), 0.25, 1e-15);
  const Matrix d2 = dct_dictionary(2, 3);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(d2(i, 0), 1.0 / std::sqrt(6.0), 1e-15);
  }
}

TEST(Dct, Orthonormal) {
  for (std::size_t ph = 1; ph <= 16; ++ph) {
    for (std::size_t pw : {ph, ph + 3}) {
      EXPECT_LE(linalg::orthogonality_defect(dct_dictionary(ph, pw)), 1e-10)
          << ph << "x" << pw;
    }
  }
}

TEST(Corrupt, ExactCountAndPreservation) {
  const GrayImage img = random_image(100, 100, 2);
  const Corruption c = corrupt(img, 0.5, 9);
  std::size_t missing = 0;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (c.observed[i]) {
      EXPECT_EQ(c.image.pixels[i], img.pixels[i]);
    } else {
      EXPECT_EQ(c.image.pixels[i], 0.0);
      ++missing;
    }
  }
  EXPECT_EQ(missing, 5000u);
  EXPECT_EQ(corrupt(img, 0.5, 9).observed, c.observed);
  EXPECT_NE(corrupt(img, 0.5, 10).observed, c.observed);
}

TEST(Corrupt, Extremes) {
  const GrayImage img = random_image(10, 10, 3);
  const Corruption none = corrupt(img, 0.0, 1);
  EXPECT_EQ(none.image, img);
  const Corruption all = corrupt(img, 1.0, 1);
  EXPECT_EQ(all.image, GrayImage(10, 10));
  EXPECT_THROW(corrupt(img, 1.5, 1), Error);
}

TEST(Psnr, Examples) {
  const GrayImage a(4, 4);
  EXPECT_EQ(psnr(a, a), kPsnrCapDb);
  GrayImage ones(4, 4);
  for (double& v : ones.pixels) v = 1.0;
  EXPECT_NEAR(psnr(a, ones), 0.0, 1e-12);
  GrayImage b(4, 4);
  for (double& v : b.pixels) v = std::sqrt(0.005);
  EXPECT_NEAR(psnr(a, b), 23.0103, 1e-4);
  EXPECT_THROW(psnr(a, GrayImage(4, 5)), Error);
}

TEST(Pgm, RoundTrip8And16Bit) {
  TempDir dir;
  GrayImage img(3, 5);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = static_cast<double>(i * 17 % 256) / 255.0;
  }
  write_pgm(dir.path() / "a.pgm", img);
  const GrayImage back = read_pgm(dir.path() / "a.pgm");
  ASSERT_EQ(back.height, 3u);
  ASSERT_EQ(back.width, 5u);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    EXPECT_NEAR(back.pixels[i], img.pixels[i], 1e-12);
  }
  GrayImage fine(2, 2, {0.0, 1.0 / 65535.0, 0.5, 1.0});
  write_pgm(dir.path() / "b.pgm", fine, 65535);
  const GrayImage fb = read_pgm(dir.path() / "b.pgm");
  EXPECT_NEAR(fb.pixels[1], 1.0 / 65535.0, 1e-15);
  EXPECT_NEAR(fb.pixels[2], 32768.0 / 65535.0, 1e-12);
}

TEST(Pgm, HeaderWithComments) {
  TempDir dir;
  const fs::path p = dir.path() / "c.pgm";
  {
    std::ofstream out(p, std::ios::binary);
    out << "P5\n# made by hand\n2 1\n# max\n255\n";
    out.put(static_cast<char>(0));
    out.put(static_cast<char>(255));
  }
  const GrayImage img = read_pgm(p);
  EXPECT_EQ(img, GrayImage(1, 2, {0.0, 1.0}));
}

TEST(Pgm, Errors) {
  TempDir dir;
  EXPECT_THROW(read_pgm(dir.path() / "missing.pgm"), Error);
  const fs::path p = dir.path() / "bad.pgm";
  {
    std::ofstream out(p, std::ios::binary);
    out << "P2\n2 2\n255\n";
  }
  try {
    read_pgm(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
  {
    std::ofstream out(p, std::ios::binary);
    out << "P5\n4 4\n255\nab";
  }
  EXPECT_THROW(read_pgm(p), Error);
}

TEST(Mask, RoundTrip) {
  TempDir dir;
  const Corruption c = corrupt(random_image(6, 4, 4), 0.3, 2);
  write_mask(dir.path() / "m.pgm", c.observed, 6, 4);
  EXPECT_EQ(read_mask(dir.path() / "m.pgm", 6, 4), c.observed);
  EXPECT_THROW(read_mask(dir.path() / "m.pgm", 4, 6), Error);
}

TEST(Reconstruct, FullDctBasisIsExact) {
  const GrayImage img = random_image(20, 20, 5);
  ReconstructOptions o;
  o.atoms = 25;
  const GrayImage rec = reconstruct(img, dct_dictionary(5, 5), o);
  EXPECT_GE(psnr(rec, img), 150.0);
}

TEST(Reconstruct, PsnrGrowsWithBudget) {
  // Averaged over 20 images; a larger budget never does worse on average.
  const Matrix d = dct_dictionary(8, 8);
  std::vector<double> mean(5, 0.0);
  const std::size_t budgets[] = {1, 4, 8, 16, 32};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GrayImage img = random_image(16, 16, 100 + seed);
    for (std::size_t b = 0; b < 5; ++b) {
      ReconstructOptions o;
      o.atoms = budgets[b];
      mean[b] += psnr(reconstruct(img, d, o), img) / 20.0;
    }
  }
  for (std::size_t b = 1; b < 5; ++b) EXPECT_GE(mean[b], mean[b - 1]);
}

TEST(Reconstruct, MaskedBeatsCorrupted) {
  // Smooth image: each 8x8 patch is a few low-frequency DCT atoms.
  const Matrix d = dct_dictionary(8, 8);
  Rng rng = Rng::derive(7, "img");
  GrayImage img(32, 32);
  PatchGrid g = extract_patches(img, 8, 8);
  for (std::size_t col = 0; col < g.patches.cols(); ++col) {
    Vector x(64, 0.0);
    x[0] = 4.0;
    x[1] = rng.uniform() - 0.5;
    x[8] = rng.uniform() - 0.5;
    for (std::size_t i = 0; i < 64; ++i) {
      g.patches(i, col) = linalg::dot(d.row(i), x);
    }
  }
  img = assemble_patches(g);
  const Corruption c = corrupt(img, 0.5, 3);
  ReconstructOptions o;
  o.atoms = 3;
  const GrayImage rec = reconstruct(c.image, d, o, &c.observed);
  EXPECT_GT(psnr(rec, img), psnr(c.image, img) + 20.0);
}

TEST(Reconstruct, PatchShapeErrors) {
  ReconstructOptions o;
  o.atoms = 4;
  EXPECT_THROW(reconstruct(GrayImage(10, 10), dct_dictionary(3, 3), o), Error);
  o.atoms = 100;
  EXPECT_THROW(reconstruct(GrayImage(10, 10), dct_dictionary(5, 5), o), Error);
  o.atoms = 4;
  o.patch_h = 2;
  o.patch_w = 8;
  EXPECT_NO_THROW(reconstruct(GrayImage(4, 8), dct_dictionary(2, 8), o));
}

TEST(PatchMatrix, Concatenates) {
  const GrayImage a = random_image(4, 4, 1);
  const GrayImage b = random_image(2, 4, 2);
  const Matrix m = patch_matrix({a, b}, 2, 2);
  EXPECT_EQ(m.rows(), 4u);
  EXPECT_EQ(m.cols(), 6u);
  EXPECT_EQ(m(0, 4), b.at(0, 0));
}

}  // namespace
}  // namespace dictlearn
