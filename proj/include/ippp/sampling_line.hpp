// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ippp/error.hpp"
#include "ippp/quadrature.hpp"
#include "ippp/rate_model.hpp"
#include "ippp/rng.hpp"
#include "ippp/sampling_bounded.hpp"

namespace ippp {

enum class Direction { above, below };

/// The n-th point above or below a known point of the process.
struct NthPointQuery {
  double anchor;
  long long n;
  Direction direction;

  void validate(const RateModel& model) const {
    if (n < 1) throw InvalidIndex("n-th point query needs n >= 1");
    if (!std::isfinite(anchor)) throw InvalidParameter("anchor must be finite");
    if (!model.domain().contains(anchor)) throw DomainViolation(anchor);
  }
};

/// Unit-rate Poisson points pushed through the generalized inverse of R.
/// Events come out in increasing order; each inversion is bracketed from the
/// previous event.
inline EventSet sample_path_timechange(const CumulativeIntensity& R, const Interval& window, Rng& rng) {
  EventMeta meta{rng.seed(), rng.stream(), "timechange", R.model().description()};
  const double top = R(window.hi());
  double y = R(window.lo());
  double previous = window.lo();
  std::vector<double> points;
  while (true) {
    y += exponential(rng, 1.0);
    if (y > top) break;
    const double t = R.invert(y, Interval(previous, std::nextafter(previous, kInfinity)));
    previous = std::clamp(t, window.lo(), window.hi());
    points.push_back(previous);
  }
  return EventSet(window, std::move(points), std::move(meta));
}

inline EventSet sample_path_timechange(const RateModel& model, const Interval& window, Rng& rng,
                                       double tol = kDefaultTolerance) {
  return sample_path_timechange(CumulativeIntensity(model, tol), window, rng);
}

/// y = R(anchor) +/- Erlang(n, 1), mapped back through R^{-1}. Empty when the
/// process has fewer than n points on that side.
inline std::optional<double> sample_nth_point(const CumulativeIntensity& R, const NthPointQuery& query, Rng& rng) {
  query.validate(R.model());
  const double anchor_value = R(query.anchor);
  const double offset = erlang(rng, query.n, 1.0);
  const double y = query.direction == Direction::above ? anchor_value + offset : anchor_value - offset;
  const double limit = query.direction == Direction::above ? R.upper_limit() : R.lower_limit();
  if (query.direction == Direction::above ? y > limit : y < limit) return std::nullopt;
  try {
    const double width = std::max(1.0, std::fabs(query.anchor) * 1e-12);
    return R.invert(y, Interval(query.anchor, query.anchor + width));
  } catch (const OutOfRange&) {
    return std::nullopt;
  }
}

inline std::optional<double> sample_nth_point(const RateModel& model, const NthPointQuery& query, Rng& rng,
                                              double tol = kDefaultTolerance) {
  return sample_nth_point(CumulativeIntensity(model, tol), query, rng);
}

/// Erlang(n, 1) density at u >= 0.
inline double erlang_pdf(long long n, double u) {
  if (n < 1) throw InvalidShape("Erlang shape must be >= 1");
  if (u < 0.0) return 0.0;
  if (u == 0.0) return n == 1 ? 1.0 : 0.0;
  const auto shape = static_cast<double>(n);
  return std::exp((shape - 1) * std::log(u) - u - std::lgamma(shape));
}

/// Density of the n-th point on the query's side of the anchor:
/// r(x) times the Erlang(n, 1) density of |R(x) - R(anchor)|. Its total mass
/// is below one when the intensity mass on that side is finite.
inline double density_nth_point(const CumulativeIntensity& R, const NthPointQuery& query, double x) {
  query.validate(R.model());
  const bool on_side = query.direction == Direction::above ? x > query.anchor : x < query.anchor;
  if (!on_side) return 0.0;
  const double rate = R.model().extended(x);
  if (rate == 0.0) return 0.0;
  const double gap = query.direction == Direction::above ? R(x) - R(query.anchor) : R(query.anchor) - R(x);
  return rate * erlang_pdf(query.n, std::max(0.0, gap));
}

inline double density_nth_point(const RateModel& model, const NthPointQuery& query, double x,
                                double tol = kDefaultTolerance) {
  return density_nth_point(CumulativeIntensity(model, tol), query, x);
}

/// P(Erlang(n, 1) <= u) = 1 - exp(-u) * sum_{j < n} u^j / j!
inline double erlang_cdf(long long n, double u) {
  if (n < 1) throw InvalidShape("Erlang shape must be >= 1");
  if (!(u > 0.0)) return 0.0;
  if (std::isinf(u)) return 1.0;
  double tail = 0.0;
  for (long long j = 0; j < n; ++j) {
    const auto jj = static_cast<double>(j);
    tail += std::exp(jj * std::log(u) - u - std::lgamma(jj + 1));
  }
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

/// Intensity mass strictly on the query's side of the anchor (may be infinite).
inline double directional_mass(const CumulativeIntensity& R, const NthPointQuery& query) {
  const double anchor_value = R(query.anchor);
  return query.direction == Direction::above ? R.upper_limit() - anchor_value : anchor_value - R.lower_limit();
}

/// Total mass of density_nth_point: the probability that the n-th point exists.
inline double nth_point_mass(const CumulativeIntensity& R, const NthPointQuery& query) {
  query.validate(R.model());
  return erlang_cdf(query.n, directional_mass(R, query));
}

}  // namespace ippp
