// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ippp/rng.hpp"
#include "support/oracles.hpp"

namespace ippp {
namespace {

template <class Draw>
std::pair<double, double> mean_and_variance(int n, Draw draw) {
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = draw();
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  return {mean, (sum_sq - n * mean * mean) / (n - 1)};
}

// Random123 known-answer vectors for Philox4x64-10.
TEST(Rng, PhiloxKnownAnswers) {
  EXPECT_EQ(Rng::philox({0, 0, 0, 0}, {0, 0}),
            (Rng::Block{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL}));
  EXPECT_EQ(Rng::philox({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                        {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}),
            (Rng::Block{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL, 0x57bd43b5e52b7fe6ULL}));
}

TEST(Uniform01, GoldenFirstDraw) {
  Rng rng(42);
  EXPECT_EQ(uniform01(rng), 0.65393818477312704);
}

TEST(Uniform01, RangeAndMean) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 1'000'000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // 3 sigma = 3 / sqrt(12) / 1000.
  EXPECT_NEAR(sum / 1e6, 0.5, 0.002);
}

TEST(Exponential, MeanAtRateTwo) {
  Rng rng(2);
  const auto [mean, var] = mean_and_variance(100'000, [&] { return exponential(rng, 2.0); });
  EXPECT_NEAR(mean, 0.5, 0.005);
  (void)var;
}

TEST(Exponential, Errors) {
  Rng rng(3);
  EXPECT_THROW(exponential(rng, 0.0), InvalidRate);
  EXPECT_THROW(exponential(rng, -1.0), InvalidRate);
}

TEST(Exponential, ZeroUniformMapsToZero) { EXPECT_EQ(exponential_from_uniform(0.0, 3.0), 0.0); }

// At least 95 of 100 seeds pass KS at alpha = 0.01.
TEST(Exponential, KolmogorovSmirnovAcrossSeeds) {
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed, 5);
    std::vector<double> draws(10'000);
    for (auto& d : draws) d = exponential(rng, 1.0);
    if (oracle::ks_statistic(draws, [](double x) { return 1.0 - std::exp(-x); }) < 1.63 / 100.0) ++passes;
  }
  EXPECT_GE(passes, 95);
}

TEST(Erlang, ShapeOneIsExponential) {
  Rng a(9), b(9);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(erlang(a, 1, 1.0), exponential(b, 1.0));
}

TEST(Erlang, MeanOfShapeFour) {
  Rng rng(4);
  const auto [mean, var] = mean_and_variance(100'000, [&] { return erlang(rng, 4, 1.0); });
  EXPECT_NEAR(mean, 4.0, 0.06);
  (void)var;
}

TEST(Erlang, Errors) {
  Rng rng(5);
  EXPECT_THROW(erlang(rng, 0, 1.0), InvalidShape);
  EXPECT_THROW(erlang(rng, 2, 0.0), InvalidRate);
}

TEST(Poisson, ZeroMean) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(poisson(rng, 0.0), 0u);
}

TEST(Poisson, MomentsAtHundred) {
  Rng rng(7);
  const auto [mean, var] = mean_and_variance(100'000, [&] { return static_cast<double>(poisson(rng, 100.0)); });
  EXPECT_NEAR(mean, 100.0, 1.0);
  EXPECT_NEAR(var, 100.0, 1.0);
}

TEST(Poisson, Errors) {
  Rng rng(8);
  EXPECT_THROW(poisson(rng, -1.0), InvalidMean);
  EXPECT_THROW(poisson(rng, std::nan("")), InvalidMean);
  EXPECT_THROW(poisson(rng, std::numeric_limits<double>::infinity()), InvalidMean);
}

// Chunked sampling at mu = 60 against a single-shot inversion sampler.
TEST(Poisson, ChunkSplittingMatchesInversionReference) {
  constexpr double mu = 60.0;
  constexpr int n = 100'000;
  Rng rng(10);
  const auto [mean, var] = mean_and_variance(n, [&] { return static_cast<double>(poisson(rng, mu)); });

  std::mt19937_64 engine(10);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto [ref_mean, ref_var] = mean_and_variance(n, [&] {
    const double u = unif(engine);
    double pmf = std::exp(-mu), cdf = pmf;
    int k = 0;
    while (cdf < u && k < 1000) {
      ++k;
      pmf *= mu / k;
      cdf += pmf;
    }
    return static_cast<double>(k);
  });
  // Difference of two independent means: sd sqrt(2 mu / n). Variances: sd
  // sqrt(2 (mu + 2 mu^2) / n).
  EXPECT_NEAR(mean, ref_mean, 3 * std::sqrt(2 * mu / n));
  EXPECT_NEAR(var, ref_var, 3 * std::sqrt(2 * (mu + 2 * mu * mu) / n));
  EXPECT_NEAR(mean, mu, 3 * std::sqrt(mu / n));
}

TEST(Rng, ReproducibleAcrossInstances) {
  Rng a(123, 4), b(123, 4);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(uniform01(a), uniform01(b));
    EXPECT_EQ(exponential(a, 1.5), exponential(b, 1.5));
    EXPECT_EQ(erlang(a, 3, 1.0), erlang(b, 3, 1.0));
    EXPECT_EQ(poisson(a, 42.0), poisson(b, 42.0));
  }
}

TEST(Rng, StreamsDiffer) {
  Rng a(123, 0), b(123, 1), c(124, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    same_ab += x == b();
    same_ac += x == c();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(Rng, WorksWithStandardDistributions) {
  Rng rng(1);
  std::uniform_int_distribution<int> die(1, 6);
  for (int i = 0; i < 100; ++i) {
    const int v = die(rng);
    EXPECT_GE(v, 1);
    EXPECT_LE(v, 6);
  }
}

}  // namespace
}  // namespace ippp
