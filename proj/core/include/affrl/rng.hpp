#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <span>

#include "affrl/error.hpp"

namespace affrl {

/// Deterministic pseudo-random source (splitmix64). std:: distributions are
/// implementation-defined, so every draw used by the engine goes through
/// this class; fixed seed means bit-identical streams on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], both inclusive. Modulo reduction; the bias
  /// is immaterial for the ranges used here (all far below 2^32).
  int next_int(int lo, int hi) {
    if (hi < lo) throw Error("BadRange", "next_int: hi < lo");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Draw an index from a categorical distribution by CDF inversion.
  /// Probabilities must be nonnegative; they are normalized by their sum.
  std::size_t categorical(std::span<const double> probabilities) {
    if (probabilities.empty()) throw Error("EmptySet", "categorical: no outcomes");
    double total = 0.0;
    for (double p : probabilities) {
      if (p < 0.0) throw Error("BadProbability", "categorical: negative probability");
      total += p;
    }
    if (total <= 0.0) throw Error("BadProbability", "categorical: zero total mass");
    const double u = next_double() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
      acc += probabilities[i];
      if (u < acc) return i;
    }
    return probabilities.size() - 1;  // u landed on accumulated rounding slack
  }

 private:
  std::uint64_t state_;
};

}  // namespace affrl
