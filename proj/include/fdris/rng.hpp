// SPDX-License-Identifier: Apache-2.0
//
// fdris: full-duplex two-RIS cell simulator and DDPG training harness
// Copyright (C) 2026 The fdris authors
// All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstdint>
#include <cmath>
#include <random>

namespace fdris {

using Rng = std::mt19937_64;

/// Independent random streams used inside one run. Each stream gets its own
/// generator so that adding draws to one component never shifts another.
enum class Stream : std::uint64_t {
  channel = 1,
  fading = 2,
  mobility = 3,
  pilot = 4,
  episode = 5,
  network_init = 6,
  exploration = 7,
  replay = 8,
  csi = 9,
  baseline = 10,
  evaluation = 11,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based seeding: (master_seed, run_index, stream) -> generator.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t run_index, Stream stream) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ splitmix64(run_index + 0x1000));
  s = splitmix64(s ^ splitmix64(static_cast<std::uint64_t>(stream) + 0x2000));
  return Rng(s);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng, double stddev) {
  if (stddev == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, stddev)(rng);
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
inline std::complex<double> complex_gaussian(Rng& rng, double variance) {
  if (variance == 0.0) return {0.0, 0.0};
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace fdris
