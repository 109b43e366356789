// Copyright 2026 The brdgen Authors.
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

#ifndef BRD_RNG_HPP
#define BRD_RNG_HPP

#include <cstdint>
#include <random>

namespace brd {

// One master seed per run; every consumer derives its own stream with a fixed
// offset so adding a component never perturbs the draws of another.
namespace seed_stream {
inline constexpr std::uint64_t kPopulationInit = 0x01;
inline constexpr std::uint64_t kLearnerInit = 0x02;
inline constexpr std::uint64_t kGradCheck = 0x03;
inline constexpr std::uint64_t kMonteCarlo = 0x04;
inline constexpr std::uint64_t kTests = 0x7f;
}  // namespace seed_stream

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ stream);
}

// mt19937_64 with a uniform mapping that avoids std::uniform_real_distribution;
// the distribution classes are implementation-defined, the engine is not, so
// this stays bit-reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace brd

#endif  // BRD_RNG_HPP
