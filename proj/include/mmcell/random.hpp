// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "types.hpp"

namespace mmcell {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Folds a list of integer tags into a child seed. Distinct tag tuples give
// statistically unrelated streams, which is what lets every trial, link and
// noise block draw independently of scheduling order.
template <class... Tags>
std::uint64_t derive_seed(std::uint64_t base, Tags... tags) {
  std::uint64_t h = splitmix64(base);
  ((h = splitmix64(h ^ static_cast<std::uint64_t>(tags))), ...);
  return h;
}

enum class StreamKind : std::uint64_t {
  trial = 1,
  deployment,
  link,
  aoa_error,
  bs_noise,
  ls_noise,
  selftest,
};

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double normal() { return normal_(engine_); }

  // CN(0, variance): independent real and imaginary parts, each N(0, variance/2).
  cd complex_normal(double variance = 1.0) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  CMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, double variance) {
    CMatrix out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = complex_normal(variance);
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline RandomStream trial_substream(std::uint64_t trial_seed, StreamKind kind, std::uint64_t a = 0,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
  return RandomStream(derive_seed(trial_seed, static_cast<std::uint64_t>(kind), a, b, c));
}

inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(StreamKind::trial), trial);
}

}  // namespace mmcell
