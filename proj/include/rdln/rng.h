// include/rdln/rng.h

// Copyright 2026  RDLN Lab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RDLN_RNG_H_
#define RDLN_RNG_H_

#include <cmath>
#include <cstdint>

#include "rdln/common.h"

namespace rdln {

// SplitMix64 (Steele, Lea & Flood; reference implementation by S. Vigna).
// A 64-bit counter-based generator: the state advances by a fixed odd
// constant and each output is a finalizing mix of the counter, so streams
// are reproducible bit-for-bit on every platform. Test vectors (seed 0):
//   0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F.
// All randomness in this project flows through this generator; platform
// library generators are never used.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 bits of precision.
  double NextDouble() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), rejection-sampled so every value is
  // exactly equally likely.
  std::uint64_t NextBelow(std::uint64_t bound) {
    if (bound == 0) throw ParamError("NextBelow: bound must be positive");
    std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      std::uint64_t x = Next();
      if (x >= threshold) return x % bound;
    }
  }

  // Uniform double in [lo, hi).
  double NextInRange(double lo, double hi) {
    return lo + (hi - lo) * NextDouble();
  }

  // One standard normal deviate via the Box-Muller transform. Each pair of
  // deviates consumes exactly two uniforms, in the order (u1, u2); the
  // second deviate of the pair is cached and returned by the next call.
  double NextGaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - NextDouble();  // (0, 1]; keeps the log finite
    double u2 = NextDouble();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace rdln

#endif  // RDLN_RNG_H_
