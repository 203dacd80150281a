// Copyright 2026 The clvr Authors
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

// Seeded random streams. All sampling uses std::mt19937_64, whose output
// sequence is fixed by the C++ standard, so a seed reproduces a trajectory on
// every conforming platform.

#ifndef CLVR_RNG_HPP_
#define CLVR_RNG_HPP_

#include <cstdint>
#include <random>

#include "clvr/sparse_matrix.hpp"

namespace clvr {

// Independent seed for a numbered sub-stream (splitmix64 finalizer).
constexpr std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with a 53-bit mantissa.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on {0, ..., m - 1} as floor(u m).
  Index Below(Index m) {
    const Index j = static_cast<Index>(Uniform() * static_cast<double>(m));
    return j < m ? j : m - 1;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace clvr

#endif  // CLVR_RNG_HPP_
