// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace infominer {

/// Deterministic generator used for every random decision in a run.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are implementation-defined, so all
/// derived draws are computed here from raw 64-bit outputs:
///   - uniform_index(n): rejection sampling on the top of the range,
///   - uniform01():      53 high bits scaled by 2^-53,
///   - normal():         Box-Muller, one value per call (no caching).
/// A given seed therefore yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Independent streams derived from one master seed.
enum class RngStream : std::uint64_t {
  Undersample = 1,
  Split = 2,
  Init = 3,
  Shuffle = 4,
  Dropout = 5,
  Baseline = 6,
};

/// splitmix64 finalizer applied to (master + stream offset). A single master
/// seed thus reproduces every sub-stream of a training job.
constexpr std::uint64_t derive_seed(std::uint64_t master, RngStream stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(stream);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t master, RngStream stream) {
  return Rng(derive_seed(master, stream));
}

}  // namespace infominer
