// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ippp/error.hpp"

namespace ippp {

/// Philox4x64-10 counter-based generator. The key is (seed, stream) and the
/// 256-bit counter enumerates output blocks, so a stream never revisits a
/// block before 2^64 blocks and distinct streams use distinct keys.
///
/// Satisfies UniformRandomBitGenerator, so it also plugs into <random>.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 4) {
      block_ = philox(counter_, {seed_, stream_});
      if (++counter_[0] == 0) ++counter_[1];
      index_ = 0;
    }
    return block_[index_++];
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Block philox(Block counter, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const auto [hi0, lo0] = mulhilo(kMultiplier0, counter[0]);
      const auto [hi1, lo1] = mulhilo(kMultiplier1, counter[2]);
      counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    }
    return counter;
  }

 private:
  static constexpr std::uint64_t kMultiplier0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMultiplier1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  struct HiLo {
    std::uint64_t hi;
    std::uint64_t lo;
  };

  static HiLo mulhilo(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
    return {static_cast<std::uint64_t>(product >> 64), static_cast<std::uint64_t>(product)};
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  Block counter_{};
  Block block_{};
  int index_ = 4;
};

/// Uniform on [0, 1) with 53 bits of precision.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Inverse transform of a uniform u in [0, 1): -log(1 - u) / rate.
inline double exponential_from_uniform(double u, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidRate("exponential rate must be finite and > 0");
  return -std::log1p(-u) / rate;
}

inline double exponential(Rng& rng, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidRate("exponential rate must be finite and > 0");
  return exponential_from_uniform(uniform01(rng), rate);
}

/// Sum of `shape` independent exponential(rate) draws, taken in order.
inline double erlang(Rng& rng, long long shape, double rate) {
  if (shape < 1) throw InvalidShape("Erlang shape must be >= 1");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidRate("Erlang rate must be finite and > 0");
  double sum = 0.0;
  for (long long i = 0; i < shape; ++i) sum += exponential(rng, rate);
  return sum;
}

namespace detail {

inline constexpr double kPoissonChunk = 30.0;

// Knuth's product method.
inline std::uint64_t poisson_small(Rng& rng, double mu) {
  const double limit = std::exp(-mu);
  std::uint64_t count = 0;
  double product = uniform01(rng);
  while (product > limit) {
    ++count;
    product *= uniform01(rng);
  }
  return count;
}

}  // namespace detail

/// Poisson(mu). Means above 30 are split into ceil(mu / 30) equal chunks
/// whose independent draws are summed.
inline std::uint64_t poisson(Rng& rng, double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidMean("Poisson mean must be finite and >= 0");
  if (mu <= detail::kPoissonChunk) return detail::poisson_small(rng, mu);
  const double chunks = std::ceil(mu / detail::kPoissonChunk);
  const double part = mu / chunks;
  std::uint64_t total = 0;
  for (double i = 0; i < chunks; ++i) total += detail::poisson_small(rng, part);
  return total;
}

}  // namespace ippp
