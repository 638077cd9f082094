// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "ippp/sampling_bounded.hpp"
#include "support/oracles.hpp"

namespace ippp {
namespace {

constexpr double kTol = 1e-9;

TEST(ExpectedCount, Examples) {
  EXPECT_NEAR(expected_count(RateModel::constant(2), Interval(0, 3)), 6.0, 1e-14);
  EXPECT_NEAR(expected_count(RateModel::from_expression("x"), Interval(0, 2)), 2.0, kTol);
  EXPECT_EQ(expected_count(RateModel::constant(0), Interval(0, 3)), 0.0);
}

TEST(SampleCount, ZeroMassGivesZero) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_count(RateModel::constant(0), Interval(0, 5), rng), 0u);
}

TEST(SampleCount, UnitRateMoments) {
  Rng rng(2);
  const auto model = RateModel::constant(1);
  const Interval window(0, 50);
  double sum = 0, sum_sq = 0;
  constexpr int reps = 100'000;
  for (int i = 0; i < reps; ++i) {
    const auto k = static_cast<double>(sample_count(model, window, rng, kTol));
    sum += k;
    sum_sq += k * k;
  }
  const double mean = sum / reps;
  const double var = (sum_sq - reps * mean * mean) / (reps - 1);
  EXPECT_NEAR(mean, 50.0, 0.07);
  EXPECT_NEAR(var, 50.0, 1.5);
}

TEST(SampleLocation, ConstantRateIsUniform) {
  Rng rng(3);
  const Interval window(-2, 3);
  std::vector<double> xs(10'000);
  for (auto& x : xs) x = sample_location(RateModel::constant(4), window, rng);
  EXPECT_LT(oracle::ks_statistic(xs, [](double x) { return (x + 2) / 5; }), oracle::ks_critical_001(xs.size()));
}

// r(x) = x on [0, 1] normalizes to f_P = 2x, so F_P = x^2.
TEST(SampleLocation, LinearRateFollowsSquareLaw) {
  Rng rng(4);
  std::vector<double> xs(10'000);
  for (auto& x : xs) x = sample_location(RateModel::from_expression("x"), Interval(0, 1), rng);
  EXPECT_LT(oracle::ks_statistic(xs, [](double x) { return x * x; }), oracle::ks_critical_001(xs.size()));
}

TEST(SampleLocation, ZeroRateAndNonTermination) {
  Rng rng(5);
  EXPECT_THROW(sample_location(RateModel::constant(0), Interval(0, 1), rng), ZeroRate);
  const auto sparse = RateModel::constant(1e-12).with_declared_bound(1e6);
  EXPECT_THROW(sample_location(sparse, Interval(0, 1), rng), NonTermination);
}

// A spike narrower than the bound grid: the sampler must raise its bound.
TEST(SampleLocation, BoundDoublesWhenViolated) {
  const auto spike = RateModel::from_expression("1 + 100*exp(-((x-0.50049)*1e4)^2)");
  const Interval window(0, 1);
  double bound = bound_on(spike, window);
  ASSERT_LT(bound, 2.0);

  std::vector<std::string> log;
  auto previous = log_sink();
  log_sink() = [&log](std::string_view line) { log.emplace_back(line); };
  Rng rng(6);
  int near_spike = 0;
  for (int i = 0; i < 50'000; ++i) {
    const double x = sample_location(spike, window, rng, bound);
    ASSERT_TRUE(window.contains(x));
    near_spike += std::fabs(x - 0.50049) < 3e-4;
  }
  log_sink() = previous;
  EXPECT_GE(bound, 101.0);
  EXPECT_FALSE(log.empty());
  EXPECT_NE(log.front().find("rejection bound raised"), std::string::npos);
  // Spike mass 100 * sqrt(pi) * 1e-4 out of ~1.0177; expect ~0.0174 * 50000 = 870.
  EXPECT_GT(near_spike, 600);
}

TEST(SimulateWindow, ZeroRateIsEmpty) {
  Rng rng(7);
  EXPECT_TRUE(simulate_window(RateModel::constant(0), Interval(0, 10), rng).empty());
}

TEST(SimulateWindow, UnitRateCountsAndLocations) {
  Rng rng(8);
  const Interval window(0, 10);
  const auto model = RateModel::constant(1);
  double total = 0;
  std::vector<double> pooled;
  constexpr int reps = 10'000;
  for (int i = 0; i < reps; ++i) {
    const auto events = simulate_window(model, window, rng);
    total += static_cast<double>(events.size());
    EXPECT_TRUE(std::is_sorted(events.points().begin(), events.points().end()));
    pooled.insert(pooled.end(), events.points().begin(), events.points().end());
  }
  EXPECT_NEAR(total / reps, 10.0, 0.1);
  EXPECT_LT(oracle::ks_statistic(pooled, [](double x) { return x / 10; }), oracle::ks_critical_001(pooled.size()));
}

TEST(SimulateWindow, DeterministicForFixedSeed) {
  const auto model = RateModel::from_expression("2 + sin(x)");
  Rng a(99, 3), b(99, 3);
  const auto first = simulate_window(model, Interval(0, 20), a);
  const auto second = simulate_window(model, Interval(0, 20), b);
  EXPECT_EQ(first, second);
  EXPECT_EQ(first.meta().seed, 99u);
  EXPECT_EQ(first.meta().stream, 3u);
  EXPECT_EQ(first.meta().model, "expr:2 + sin(x)");
}

TEST(SimulateConditional, Counts) {
  Rng rng(9);
  EXPECT_TRUE(simulate_conditional(RateModel::constant(1), Interval(0, 1), 0, rng).empty());
  const auto five = simulate_conditional(RateModel::from_expression("1+x^2"), Interval(-1, 2), 5, rng);
  ASSERT_EQ(five.size(), 5u);
  EXPECT_TRUE(std::is_sorted(five.points().begin(), five.points().end()));
  EXPECT_THROW(simulate_conditional(RateModel::constant(0), Interval(0, 1), 1, rng), ZeroRate);
}

TEST(SimulateConditional, SinglePointFollowsLocationLaw) {
  Rng rng(10);
  std::vector<double> xs;
  for (int i = 0; i < 10'000; ++i)
    xs.push_back(simulate_conditional(RateModel::from_expression("x"), Interval(0, 1), 1, rng).points()[0]);
  EXPECT_LT(oracle::ks_statistic(xs, [](double x) { return x * x; }), oracle::ks_critical_001(xs.size()));
}

TEST(SimulateConditional, PerformsNoIntegration) {
  Rng rng(11);
  ScopedIntegrationBan ban;
  EXPECT_THROW(simulate_window(RateModel::constant(1), Interval(0, 1), rng), Error);
  const auto events = simulate_conditional(RateModel::from_expression("exp(sin(3*x))"), Interval(0, 4), 25, rng);
  EXPECT_EQ(events.size(), 25u);
}

TEST(DensityFP, Examples) {
  EXPECT_NEAR(density_fP(RateModel::constant(3), Interval(1, 5), 2.0), 0.25, 1e-14);
  EXPECT_EQ(density_fP(RateModel::constant(3), Interval(1, 5), 7.0), 0.0);
  // 1 / (integral of x over [0, 2]) = 1/2.
  EXPECT_NEAR(density_fP(RateModel::from_expression("x"), Interval(0, 2), 1.0), 0.5, 1e-9);
  EXPECT_THROW(density_fP(RateModel::constant(0), Interval(0, 1), 0.5), ZeroMass);
}

TEST(CdfFP, Examples) {
  const auto model = RateModel::from_expression("x");
  const Interval unit(0, 1);
  EXPECT_NEAR(cdf_FP(model, unit, 1.0), 1.0, kTol);
  EXPECT_EQ(cdf_FP(model, unit, 0.0), 0.0);
  EXPECT_EQ(cdf_FP(model, unit, -3.0), 0.0);
  EXPECT_EQ(cdf_FP(model, unit, 3.0), 1.0);
  EXPECT_NEAR(cdf_FP(model, unit, 0.5), 0.25, kTol);
  EXPECT_THROW(cdf_FP(RateModel::constant(0), unit, 0.5), ZeroMass);
}

TEST(DensityOrderStat, SingleDrawIsLocationDensity) {
  const auto model = RateModel::from_expression("1+x^2");
  const Interval window(-1, 2);
  for (double x = -1.5; x <= 2.5; x += 0.25)
    EXPECT_NEAR(density_order_stat(model, window, 1, 1, x), density_fP(model, window, x), 1e-15);
}

TEST(DensityOrderStat, UniformCaseIsBeta) {
  // k C(m,k) x^(k-1) (1-x)^(m-k) = 2 * 3 * 0.5 * 0.5.
  EXPECT_NEAR(density_order_stat(RateModel::constant(2), Interval(0, 1), 2, 3, 0.5), 1.5, 1e-12);
  const WindowLaw law(RateModel::constant(2), Interval(0, 1));
  for (double x = 0.0; x <= 1.0; x += 0.05) {
    EXPECT_NEAR(law.order_stat_pdf(3, 7, x), oracle::beta_pdf(3, 5, x), 1e-9);
    // Log-space path above m = 60.
    EXPECT_NEAR(law.order_stat_pdf(30, 100, x), oracle::beta_pdf(30, 71, x),
                1e-9 * std::max(1.0, oracle::beta_pdf(30, 71, x)));
  }
}

TEST(DensityOrderStat, Normalized) {
  const auto model = RateModel::sinusoidal(2, 1, 1, 0);
  const Interval window(0, 6);
  const WindowLaw law(model, window, 1e-12);
  for (auto [k, m] : {std::pair{1, 1}, {1, 5}, {3, 5}, {5, 5}}) {
    const double total = adaptive_gauss_kronrod([&](double x) { return law.order_stat_pdf(k, m, x); }, 0, 6, 1e-10);
    EXPECT_NEAR(total, 1.0, 1e-6) << k << "/" << m;
  }
}

TEST(DensityOrderStat, Errors) {
  const auto model = RateModel::constant(1);
  EXPECT_THROW(density_order_stat(model, Interval(0, 1), 0, 3, 0.5), InvalidIndex);
  EXPECT_THROW(density_order_stat(model, Interval(0, 1), 4, 3, 0.5), InvalidIndex);
  EXPECT_EQ(density_order_stat(model, Interval(0, 1), 1, 3, 1.5), 0.0);
}

}  // namespace
}  // namespace ippp
