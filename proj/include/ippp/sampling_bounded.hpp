// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <string_view>
#include <vector>

#include "ippp/error.hpp"
#include "ippp/quadrature.hpp"
#include "ippp/rate_model.hpp"
#include "ippp/rng.hpp"

namespace ippp {

struct EventMeta {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string method;
  std::string model;
};

/// Sorted event locations inside a window, with what it takes to reproduce them.
class EventSet {
 public:
  EventSet(Interval window, std::vector<double> points, EventMeta meta)
      : window_(window), points_(std::move(points)), meta_(std::move(meta)) {
    std::sort(points_.begin(), points_.end());
    for (double p : points_)
      if (!window_.contains(p)) throw InvalidParameter("event outside its window");
  }

  const Interval& window() const noexcept { return window_; }
  const std::vector<double>& points() const noexcept { return points_; }
  const EventMeta& meta() const noexcept { return meta_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  bool operator==(const EventSet& other) const {
    return window_ == other.window_ && points_ == other.points_ && meta_.seed == other.meta_.seed &&
           meta_.stream == other.meta_.stream && meta_.method == other.meta_.method &&
           meta_.model == other.meta_.model;
  }

 private:
  Interval window_;
  std::vector<double> points_;
  EventMeta meta_;
};

/// Receives diagnostics such as rejection-bound increases. Defaults to stderr.
inline std::function<void(std::string_view)>& log_sink() {
  static std::function<void(std::string_view)> sink = [](std::string_view line) { std::clog << line << '\n'; };
  return sink;
}

namespace detail {
inline constexpr long kMaxRejections = 1'000'000;
}

/// mu(A): expected number of points in the window.
inline double expected_count(const RateModel& model, const Interval& window, double tol = kDefaultTolerance) {
  return integrate(model, window.lo(), window.hi(), tol);
}

inline std::uint64_t sample_count(const RateModel& model, const Interval& window, Rng& rng,
                                  double tol = kDefaultTolerance) {
  return poisson(rng, expected_count(model, window, tol));
}

/// One draw from P = mu(. n A) / mu(A) by rejection against the constant
/// `bound`. If a candidate shows r(x) > bound, the bound is doubled until it
/// covers r(x) and the draw restarts; the raised bound is written back.
inline double sample_location(const RateModel& model, const Interval& window, Rng& rng, double& bound) {
  if (!(bound > 0.0)) throw ZeroRate("rate bound on the window is zero; location law undefined");
  long rejections = 0;
  while (true) {
    const double x = window.lo() + window.length() * uniform01(rng);
    const double u = uniform01(rng);
    const double rate = model(x);
    if (rate > bound) {
      const double old = bound;
      while (rate > bound) bound *= 2.0;
      log_sink()("ippp: rejection bound raised from " + std::to_string(old) + " to " + std::to_string(bound) +
                 " (r(" + std::to_string(x) + ") = " + std::to_string(rate) + ")");
      rejections = 0;
      continue;
    }
    if (u * bound <= rate && rate > 0.0) return x;
    if (++rejections >= detail::kMaxRejections)
      throw NonTermination("rejection sampler gave up after " + std::to_string(detail::kMaxRejections) +
                           " consecutive rejections");
  }
}

inline double sample_location(const RateModel& model, const Interval& window, Rng& rng) {
  double bound = bound_on(model, window);
  return sample_location(model, window, rng, bound);
}

namespace detail {

inline std::vector<double> draw_locations(const RateModel& model, const Interval& window, Rng& rng,
                                          std::uint64_t count) {
  std::vector<double> points;
  if (count == 0) return points;
  points.reserve(count);
  double bound = bound_on(model, window);
  for (std::uint64_t i = 0; i < count; ++i) points.push_back(sample_location(model, window, rng, bound));
  return points;
}

}  // namespace detail

/// Poisson count, then that many i.i.d. locations.
inline EventSet simulate_window(const RateModel& model, const Interval& window, Rng& rng,
                                double tol = kDefaultTolerance) {
  EventMeta meta{rng.seed(), rng.stream(), "rejection", model.description()};
  const std::uint64_t count = sample_count(model, window, rng, tol);
  return EventSet(window, detail::draw_locations(model, window, rng, count), std::move(meta));
}

/// Exactly m i.i.d. locations. The rate is used unnormalized, so nothing is integrated.
inline EventSet simulate_conditional(const RateModel& model, const Interval& window, std::uint64_t m, Rng& rng) {
  EventMeta meta{rng.seed(), rng.stream(), "conditional", model.description()};
  return EventSet(window, detail::draw_locations(model, window, rng, m), std::move(meta));
}

/// The location law P on a window, with mu(A) integrated once up front.
class WindowLaw {
 public:
  WindowLaw(RateModel model, Interval window, double tol = kDefaultTolerance)
      : model_(std::move(model)), window_(window), tol_(tol),
        mass_(integrate(model_, window.lo(), window.hi(), tol)) {
    if (mass_ <= tol_) throw ZeroMass("intensity mass of the window is zero (" + std::to_string(mass_) + ")");
  }

  double mass() const noexcept { return mass_; }
  const Interval& window() const noexcept { return window_; }
  const RateModel& model() const noexcept { return model_; }

  double pdf(double x) const { return window_.contains(x) ? model_(x) / mass_ : 0.0; }

  double cdf(double x) const {
    if (x <= window_.lo()) return 0.0;
    const double upper = std::min(x, window_.hi());
    return std::clamp(integrate(model_, window_.lo(), upper, tol_) / mass_, 0.0, 1.0);
  }

  /// Density of the k-th smallest of m i.i.d. draws from P.
  double order_stat_pdf(long long k, long long m, double x) const {
    if (k < 1 || k > m) throw InvalidIndex("order statistic needs 1 <= k <= m");
    if (!window_.contains(x)) return 0.0;
    const double f = pdf(x);
    if (f == 0.0) return 0.0;
    const double F = cdf(x);
    const auto km = static_cast<double>(k);
    const auto mm = static_cast<double>(m);
    if (m <= 60) {
      return km * binomial(m, k) * std::pow(F, km - 1) * std::pow(1.0 - F, mm - km) * f;
    }
    double log_value = std::log(km) + std::lgamma(mm + 1) - std::lgamma(km + 1) - std::lgamma(mm - km + 1);
    if (k > 1) {
      if (F <= 0.0) return 0.0;
      log_value += (km - 1) * std::log(F);
    }
    if (m > k) {
      if (F >= 1.0) return 0.0;
      log_value += (mm - km) * std::log1p(-F);
    }
    return std::exp(log_value) * f;
  }

 private:
  static double binomial(long long m, long long k) {
    k = std::min(k, m - k);
    double result = 1.0;
    for (long long i = 1; i <= k; ++i) result = result * static_cast<double>(m - k + i) / static_cast<double>(i);
    return result;
  }

  RateModel model_;
  Interval window_;
  double tol_;
  double mass_;
};

inline double density_fP(const RateModel& model, const Interval& window, double x, double tol = kDefaultTolerance) {
  return WindowLaw(model, window, tol).pdf(x);
}

inline double cdf_FP(const RateModel& model, const Interval& window, double x, double tol = kDefaultTolerance) {
  return WindowLaw(model, window, tol).cdf(x);
}

inline double density_order_stat(const RateModel& model, const Interval& window, long long k, long long m, double x,
                                 double tol = kDefaultTolerance) {
  if (k < 1 || k > m) throw InvalidIndex("order statistic needs 1 <= k <= m");
  return WindowLaw(model, window, tol).order_stat_pdf(k, m, x);
}

}  // namespace ippp
