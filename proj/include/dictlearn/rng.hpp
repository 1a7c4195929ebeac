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
#include <random>
#include <string_view>
#include <vector>

namespace dictlearn {

// Seeded random source with a platform-independent output sequence.
//
// The engine is std::mt19937_64, whose output is fixed by the C++ standard.
// The standard distributions are not, so uniform, normal and index draws are
// implemented here:
//   uniform  = (engine() >> 11) * 2^-53
//   normal   = Marsaglia polar method on two uniforms in (-1, 1)
//   below(n) = rejection sampling on the top bits
// Independent streams are derived from (seed, tag) with SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // A stream keyed by `tag`, statistically independent of other tags.
  static Rng derive(std::uint64_t seed, std::string_view tag);
  static Rng derive(std::uint64_t seed, std::string_view tag,
                    std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double normal();   // N(0, 1)
  bool bernoulli(double p) { return uniform() < p; }
  double rademacher() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }
  std::size_t below(std::size_t n);  // uniform in [0, n)

  // `count` distinct indices from [0, n), sorted ascending.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t count);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dictlearn
