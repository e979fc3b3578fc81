#pragma once

#include <cstdint>

namespace edgegen {

/// SplitMix64 output finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for the `index`-th child of `seed`; stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/**
 * Counter-based pseudo-random stream.
 *
 * Draw n of a stream keyed by k is mix64(k + n * 0x9E3779B97F4A7C15), i.e.
 * SplitMix64 with the state expressed as (key, counter). A stream is fully
 * described by those two integers, so any draw can be reproduced from a seed
 * without replaying the whole history, and child streams are obtained by
 * hashing a tag into the key.
 *
 * Doubles use the top 53 bits: (u64 >> 11) * 2^-53, in [0, 1).
 */
class RngStream {
 public:
  explicit RngStream(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1).
  double uniform01() noexcept;

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept;

  /// Uniform integer on [0, n); n must be > 0. Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Uniform integer on [lo, hi] inclusive.
  std::int64_t integer(std::int64_t lo, std::int64_t hi) noexcept;

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double normal() noexcept;

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Independent child stream; does not advance this stream.
  [[nodiscard]] RngStream split(std::uint64_t tag) const noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace edgegen
