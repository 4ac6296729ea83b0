// ssrnn/rng.hpp

// Copyright 2026  The ssrnn authors

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

#ifndef SSRNN_RNG_HPP_
#define SSRNN_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace ssrnn {

namespace detail {

// splitmix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

// Splittable value-type PRNG (splitmix64). All stochastic operations in the
// library take an RngState explicitly; there is no global randomness. Streams
// derived with split() are independent of the parent and of each other, so
// consumers cannot perturb one another no matter how work is ordered.
//
// Output is a pure function of the 64-bit state, which makes every draw
// reproducible bit-for-bit from a single seed.
class RngState {
 public:
  RngState() : state_(0) {}

  static RngState FromSeed(std::uint64_t seed) {
    return RngState(detail::Mix64(seed + detail::kGolden));
  }

  std::uint64_t NextU64() {
    state_ += detail::kGolden;
    return detail::Mix64(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double NextDouble() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double NextUniform(double lo, double hi) {
    return lo + (hi - lo) * NextDouble();
  }

  // Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
  std::uint64_t NextBelow(std::uint64_t n) {
    const std::uint64_t limit = n * (~std::uint64_t{0} / n);
    std::uint64_t x = NextU64();
    while (x >= limit) {
      x = NextU64();
    }
    return x % n;
  }

  // Standard normal via Box-Muller. Consumes exactly two uniform draws.
  double NextGaussian() {
    // u1 in (0, 1] so the log is finite.
    const double u1 =
        static_cast<double>((NextU64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = NextDouble();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Derives an independent stream. The child state mixes both the parent
  // state and the salt, so split(a).split(b) and split(b).split(a) differ.
  RngState Split(std::uint64_t salt) const {
    return RngState(
        detail::Mix64(state_ ^ detail::Mix64(salt + detail::kGolden)));
  }

  RngState Split(std::uint64_t a, std::uint64_t b) const {
    return Split(a).Split(b);
  }

  RngState Split(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return Split(a).Split(b).Split(c);
  }

  std::uint64_t state() const { return state_; }

  friend bool operator==(const RngState&, const RngState&) = default;

 private:
  explicit RngState(std::uint64_t state) : state_(state) {}

  std::uint64_t state_;
};

}  // namespace ssrnn

#endif  // SSRNN_RNG_HPP_
