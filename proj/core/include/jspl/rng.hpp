// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "jspl/types.hpp"

namespace jspl {

// splitmix64 step; used both as a stand-alone mixer and to derive
// per-task child seeds so trials are reproducible in any execution order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic child seed from a master seed and a stream tag.
inline std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t tag) {
  std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + tag * 0x9e3779b97f4a7c15ULL);
  splitmix64(s);
  return splitmix64(s);
}

inline std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t tag_a, std::uint64_t tag_b) {
  return deriveSeed(deriveSeed(master, tag_a), tag_b);
}

inline std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t tag_a, std::uint64_t tag_b,
                                std::uint64_t tag_c) {
  return deriveSeed(deriveSeed(master, tag_a, tag_b), tag_c);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int uniformInt(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  // CN(0, var): independent real/imag parts with variance var/2 each.
  Complex complexGaussian(double var) {
    const double s = std::sqrt(var / 2.0);
    const double re = gaussian();
    const double im = gaussian();
    return {s * re, s * im};
  }

  // Unit-modulus QPSK point, Gray-labelled quadrants.
  Complex qpsk() {
    static constexpr double inv_sqrt2 = 0.7071067811865476;
    const int q = uniformInt(0, 3);
    const double re = (q & 1) ? -inv_sqrt2 : inv_sqrt2;
    const double im = (q & 2) ? -inv_sqrt2 : inv_sqrt2;
    return {re, im};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace jspl
