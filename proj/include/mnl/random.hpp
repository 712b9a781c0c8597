/// @file  random.hpp
/// @brief Seeded random stream with portable, implementation-independent draws.
///
/// std::uniform_real_distribution and friends are implementation-defined, so
/// the same seed can give different streams across standard libraries. All
/// sampling in this project goes through RandomStream, which maps mt19937_64
/// output to doubles in a fixed way. Given a seed, a stream is reproducible
/// everywhere.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mnl {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1); safe to pass through log().
  double uniformOpen() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniformInt(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do {
      draw = gen_();
    } while (draw >= limit);
    return draw % n;
  }

  /// Standard Gumbel via inverse CDF: -log(-log(U)), U in (0,1).
  double gumbel() {
    return -std::log(-std::log(uniformOpen()));
  }

  /// Bernoulli with success probability p.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mnl
