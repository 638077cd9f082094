// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ippp/error.hpp"
#include "ippp/rate_expr.hpp"

namespace ippp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Bounded observation window [lo, hi] with finite lo < hi.
class Interval {
 public:
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidInterval("interval endpoints must be finite");
    if (!(lo < hi)) throw InvalidInterval("interval requires lo < hi");
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double length() const noexcept { return hi_ - lo_; }
  bool contains(double x) const noexcept { return lo_ <= x && x <= hi_; }

  bool operator==(const Interval&) const = default;

 private:
  double lo_;
  double hi_;
};

/// Where a rate function is defined: the whole line, a half line, or an
/// interval. Endpoints may be infinite.
struct Domain {
  double lo = -kInfinity;
  double hi = kInfinity;

  static Domain whole_line() { return {}; }
  static Domain from(double lo) { return {lo, kInfinity}; }
  static Domain up_to(double hi) { return {-kInfinity, hi}; }
  static Domain of(const Interval& interval) { return {interval.lo(), interval.hi()}; }

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool contains(const Interval& w) const noexcept { return lo <= w.lo() && w.hi() <= hi; }
  bool empty() const noexcept { return !(lo <= hi); }

  Domain intersect(const Domain& other) const { return {std::max(lo, other.lo), std::min(hi, other.hi)}; }

  bool operator==(const Domain&) const = default;
};

namespace family {

struct Constant {
  double c;
};

/// max(0, a + b x)
struct Linear {
  double a;
  double b;
};

/// values[i] on [breaks[i], breaks[i+1]); the last piece is closed on the
/// right. Zero outside [breaks.front(), breaks.back()].
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values;
};

/// a + b sin(omega x + phi) with a >= |b|
struct Sinusoidal {
  double a;
  double b;
  double omega;
  double phi;
};

}  // namespace family

/// A nonnegative rate function r on a domain. Immutable after construction.
class RateModel {
 public:
  using Source = std::variant<std::shared_ptr<const RateExpr>, family::Constant, family::Linear,
                              family::PiecewiseConstant, family::Sinusoidal>;

  static RateModel from_expression(const std::string& text) {
    return RateModel(std::make_shared<const RateExpr>(parse(text)));
  }
  static RateModel from_expression(RateExpr expr) {
    return RateModel(std::make_shared<const RateExpr>(std::move(expr)));
  }

  static RateModel constant(double c) {
    if (!std::isfinite(c) || c < 0.0) throw InvalidParameter("constant rate requires finite c >= 0");
    return RateModel(family::Constant{c});
  }

  static RateModel linear(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidParameter("linear rate requires finite a, b");
    return RateModel(family::Linear{a, b});
  }

  static RateModel piecewise_constant(std::vector<double> breaks, std::vector<double> values) {
    if (breaks.size() < 2 || values.size() + 1 != breaks.size())
      throw InvalidParameter("piecewise-constant rate needs k+1 breakpoints for k values");
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      if (!std::isfinite(breaks[i])) throw InvalidParameter("breakpoints must be finite");
      if (i > 0 && !(breaks[i - 1] < breaks[i])) throw InvalidParameter("breakpoints must increase strictly");
    }
    for (double v : values)
      if (!std::isfinite(v) || v < 0.0) throw InvalidParameter("piecewise-constant values must be finite and >= 0");
    return RateModel(family::PiecewiseConstant{std::move(breaks), std::move(values)});
  }

  static RateModel sinusoidal(double a, double b, double omega, double phi) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(omega) || !std::isfinite(phi))
      throw InvalidParameter("sinusoidal rate requires finite parameters");
    if (a < std::fabs(b)) throw InvalidParameter("sinusoidal rate requires a >= |b|");
    return RateModel(family::Sinusoidal{a, b, omega, phi});
  }

  RateModel with_domain(Domain domain) const {
    if (domain.empty() || std::isnan(domain.lo) || std::isnan(domain.hi))
      throw InvalidParameter("empty rate domain");
    RateModel copy = *this;
    copy.domain_ = domain;
    return copy;
  }

  RateModel with_declared_bound(double bound) const {
    if (!std::isfinite(bound) || bound < 0.0) throw InvalidParameter("declared bound must be finite and >= 0");
    RateModel copy = *this;
    copy.declared_bound_ = bound;
    return copy;
  }

  const Source& source() const noexcept { return source_; }
  const Domain& domain() const noexcept { return domain_; }
  std::optional<double> declared_bound() const noexcept { return declared_bound_; }
  bool is_expression() const noexcept { return std::holds_alternative<std::shared_ptr<const RateExpr>>(source_); }

  /// r(x). Throws DomainViolation outside the domain and NegativeRate on r(x) < 0.
  double operator()(double x) const {
    if (!domain_.contains(x)) throw DomainViolation(x);
    const double value = raw(x);
    if (!std::isfinite(value)) throw EvalError(0, "non-finite rate at x = " + std::to_string(x));
    if (value < 0.0) throw NegativeRate(x, value);
#ifndef NDEBUG
    if (declared_bound_ && value > *declared_bound_) throw BoundViolation(x, value, *declared_bound_);
#endif
    return value;
  }

  /// r(x) extended by zero outside the domain.
  double extended(double x) const { return domain_.contains(x) ? (*this)(x) : 0.0; }

  /// The closed set outside of which r vanishes identically, as far as the
  /// source can tell. Expression rates report their whole domain.
  Domain support() const {
    return std::visit(
        [this](const auto& s) -> Domain {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, family::Constant>) {
            return s.c > 0.0 ? domain_ : Domain{kInfinity, -kInfinity};
          } else if constexpr (std::is_same_v<T, family::Linear>) {
            if (s.b > 0.0) return domain_.intersect(Domain::from(-s.a / s.b));
            if (s.b < 0.0) return domain_.intersect(Domain::up_to(-s.a / s.b));
            return s.a > 0.0 ? domain_ : Domain{kInfinity, -kInfinity};
          } else if constexpr (std::is_same_v<T, family::PiecewiseConstant>) {
            return domain_.intersect(Domain{s.breaks.front(), s.breaks.back()});
          } else {
            return domain_;
          }
        },
        source_);
  }

  /// Points where r may be discontinuous or non-smooth; quadrature splits there.
  std::vector<double> breakpoints() const {
    std::vector<double> points;
    if (const auto* pw = std::get_if<family::PiecewiseConstant>(&source_)) points = pw->breaks;
    if (const auto* lin = std::get_if<family::Linear>(&source_); lin && lin->b != 0.0)
      points.push_back(-lin->a / lin->b);
    if (std::isfinite(domain_.lo)) points.push_back(domain_.lo);
    if (std::isfinite(domain_.hi)) points.push_back(domain_.hi);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
  }

  /// Human-readable provenance, e.g. `expr:sin(x)^2+1` or `sin:a=2,b=1,omega=1,phi=0`.
  std::string description() const {
    std::ostringstream out;
    out.precision(17);
    std::visit(
        [&out](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, std::shared_ptr<const RateExpr>>) {
            out << "expr:" << s->source();
          } else if constexpr (std::is_same_v<T, family::Constant>) {
            out << "constant:c=" << s.c;
          } else if constexpr (std::is_same_v<T, family::Linear>) {
            out << "linear:a=" << s.a << ",b=" << s.b;
          } else if constexpr (std::is_same_v<T, family::PiecewiseConstant>) {
            out << "pwconst:breaks=";
            for (std::size_t i = 0; i < s.breaks.size(); ++i) out << (i ? ":" : "") << s.breaks[i];
            out << ",values=";
            for (std::size_t i = 0; i < s.values.size(); ++i) out << (i ? ":" : "") << s.values[i];
          } else {
            out << "sin:a=" << s.a << ",b=" << s.b << ",omega=" << s.omega << ",phi=" << s.phi;
          }
        },
        source_);
    if (std::isfinite(domain_.lo) || std::isfinite(domain_.hi))
      out << ";domain=[" << domain_.lo << "," << domain_.hi << "]";
    if (declared_bound_) out << ";bound=" << *declared_bound_;
    return out.str();
  }

 private:
  explicit RateModel(Source source) : source_(std::move(source)) {}

  double raw(double x) const {
    return std::visit(
        [x](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, std::shared_ptr<const RateExpr>>) {
            return (*s)(x);
          } else if constexpr (std::is_same_v<T, family::Constant>) {
            return s.c;
          } else if constexpr (std::is_same_v<T, family::Linear>) {
            return std::max(0.0, s.a + s.b * x);
          } else if constexpr (std::is_same_v<T, family::PiecewiseConstant>) {
            if (x < s.breaks.front() || x > s.breaks.back()) return 0.0;
            const auto it = std::upper_bound(s.breaks.begin(), s.breaks.end(), x);
            const auto piece = static_cast<std::size_t>(it - s.breaks.begin()) - 1;
            return s.values[std::min(piece, s.values.size() - 1)];
          } else {
            return s.a + s.b * std::sin(s.omega * x + s.phi);
          }
        },
        source_);
  }

  Source source_;
  Domain domain_;
  std::optional<double> declared_bound_;
};

inline double evaluate(const RateModel& model, double x) { return model(x); }

namespace detail {

inline constexpr int kBoundGridPoints = 1025;
inline constexpr double kBoundSafetyFactor = 1.5;

/// Exact supremum of a + b sin(omega x + phi) over [lo, hi].
inline double sinusoidal_sup(const family::Sinusoidal& s, double lo, double hi) {
  const double at_ends = std::max(s.a + s.b * std::sin(s.omega * lo + s.phi), s.a + s.b * std::sin(s.omega * hi + s.phi));
  if (s.b == 0.0 || s.omega == 0.0) return at_ends;
  double p0 = s.omega * lo + s.phi;
  double p1 = s.omega * hi + s.phi;
  if (p0 > p1) std::swap(p0, p1);
  // Phase at which sin reaches +1 when b > 0, -1 when b < 0.
  const double target = s.b > 0.0 ? std::numbers::pi / 2 : -std::numbers::pi / 2;
  const double k = std::ceil((p0 - target) / (2 * std::numbers::pi));
  if (target + 2 * std::numbers::pi * k <= p1) return s.a + std::fabs(s.b);
  return at_ends;
}

}  // namespace detail

/// An upper bound for r on the window, used by rejection sampling. Exact for
/// the built-in families; for expressions, a grid maximum times 1.5, which the
/// sampler corrects at run time if it turns out too small.
inline double bound_on(const RateModel& model, const Interval& window) {
  if (model.declared_bound()) return *model.declared_bound();
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, family::Constant>) {
          return s.c;
        } else if constexpr (std::is_same_v<T, family::Linear>) {
          return std::max({0.0, s.a + s.b * window.lo(), s.a + s.b * window.hi()});
        } else if constexpr (std::is_same_v<T, family::PiecewiseConstant>) {
          double sup = 0.0;
          for (std::size_t i = 0; i < s.values.size(); ++i) {
            const bool last = i + 1 == s.values.size();
            const bool overlaps = s.breaks[i] <= window.hi() &&
                                  (last ? s.breaks[i + 1] >= window.lo() : s.breaks[i + 1] > window.lo());
            if (overlaps) sup = std::max(sup, s.values[i]);
          }
          return sup;
        } else if constexpr (std::is_same_v<T, family::Sinusoidal>) {
          return detail::sinusoidal_sup(s, window.lo(), window.hi());
        } else {
          double grid_max = 0.0;
          const int last = detail::kBoundGridPoints - 1;
          for (int i = 0; i <= last; ++i) {
            const double x = i == last ? window.hi() : window.lo() + window.length() * i / last;
            grid_max = std::max(grid_max, model(x));
          }
          return grid_max * detail::kBoundSafetyFactor;
        }
      },
      model.source());
}

}  // namespace ippp
