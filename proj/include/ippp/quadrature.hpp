// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "ippp/error.hpp"
#include "ippp/rate_model.hpp"

namespace ippp {

inline constexpr double kDefaultTolerance = 1e-9;

namespace detail {

// Gauss-Kronrod 7-15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the Kronrod nodes with odd index (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr int kMaxDepth = 50;
inline constexpr std::size_t kMaxSegments = 20000;

inline thread_local int integration_ban_depth = 0;

struct Segment {
  double a;
  double b;
  double value;
  double error;
  int depth;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(const F& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = kKronrodWeights[7] * f(center);
  double gauss = kGaussWeights[3] * f(center);
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half), depth};
}

}  // namespace detail

/// Test hook: while an instance is alive on the current thread, every call to
/// the integration routines throws.
class ScopedIntegrationBan {
 public:
  ScopedIntegrationBan() { ++detail::integration_ban_depth; }
  ~ScopedIntegrationBan() { --detail::integration_ban_depth; }
  ScopedIntegrationBan(const ScopedIntegrationBan&) = delete;
  ScopedIntegrationBan& operator=(const ScopedIntegrationBan&) = delete;
};

/// Globally adaptive Gauss-Kronrod 7-15 quadrature of f over [a, b]. The
/// segment with the largest error estimate is bisected until the summed
/// estimate drops below `tol`. `splits` are points inside (a, b) where f may
/// be non-smooth; they seed the initial partition.
template <class F>
double adaptive_gauss_kronrod(const F& f, double a, double b, double tol, const std::vector<double>& splits = {}) {
  if (detail::integration_ban_depth > 0) throw Error("integration is disabled on this thread");
  if (!(tol > 0.0)) throw InvalidParameter("integration tolerance must be > 0");
  if (!(a <= b)) throw InvalidParameter("integration bounds require a <= b");
  if (a == b) return 0.0;

  std::vector<double> edges{a};
  for (double s : splits)
    if (s > a && s < b) edges.push_back(s);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());

  std::priority_queue<detail::Segment> queue;
  double error = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i] == edges[i + 1]) continue;
    auto seg = detail::gauss_kronrod_15(f, edges[i], edges[i + 1], 0);
    error += seg.error;
    magnitude += std::fabs(seg.value);
    queue.push(seg);
  }

  // Below the rounding floor of the sum itself the estimate is noise.
  auto target = [&] { return std::max(tol, 64 * std::numeric_limits<double>::epsilon() * magnitude); };
  while (error > target()) {
    const detail::Segment worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.depth >= detail::kMaxDepth || queue.size() >= detail::kMaxSegments || mid <= worst.a ||
        mid >= worst.b)
      throw ToleranceNotMet(error);
    queue.pop();
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid, worst.depth + 1);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b, worst.depth + 1);
    error += left.error + right.error - worst.error;
    magnitude += std::fabs(left.value) + std::fabs(right.value) - std::fabs(worst.value);
    queue.push(left);
    queue.push(right);
  }
  double sum = 0.0;
  while (!queue.empty()) {
    sum += queue.top().value;
    queue.pop();
  }
  return sum;
}

namespace detail {

/// Integral of r, extended by zero outside its support, over [a, b].
inline double integrate_extended(const RateModel& model, double a, double b, double tol) {
  const Domain support = model.support();
  if (support.empty()) return 0.0;
  const double lo = std::max(a, support.lo);
  const double hi = std::min(b, support.hi);
  if (!(lo < hi)) return 0.0;
  return adaptive_gauss_kronrod([&model](double x) { return model(x); }, lo, hi, tol, model.breakpoints());
}

}  // namespace detail

/// The intensity measure of [a, b]: the integral of r over it.
inline double integrate(const RateModel& model, double a, double b, double tol = kDefaultTolerance) {
  if (!model.domain().contains(a)) throw DomainViolation(a);
  if (!model.domain().contains(b)) throw DomainViolation(b);
  if (!(tol > 0.0)) throw InvalidParameter("integration tolerance must be > 0");
  if (!(a <= b)) throw InvalidParameter("integration bounds require a <= b");
  return detail::integrate_extended(model, a, b, tol);
}

/// R(t) = integral of r over (0, t] for t >= 0 and minus the integral over
/// (t, 0] for t < 0, with r taken as zero outside its domain.
///
/// Values are memoized at fixed checkpoints: multiples of `spacing` out to 64
/// spacings from the origin, then doubling. A query integrates only from the
/// nearest checkpoint towards the origin. Checkpoint positions do not depend
/// on query history, so results are identical under any call interleaving.
class CumulativeIntensity {
 public:
  explicit CumulativeIntensity(RateModel model, double tol = kDefaultTolerance, double spacing = 1.0)
      : model_(std::move(model)), tol_(tol), spacing_(spacing), support_(model_.support()),
        memo_(std::make_unique<Memo>()) {
    if (!(tol > 0.0)) throw InvalidParameter("integration tolerance must be > 0");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidParameter("checkpoint spacing must be > 0");
  }

  CumulativeIntensity(const CumulativeIntensity& other)
      : model_(other.model_), tol_(other.tol_), spacing_(other.spacing_), support_(other.support_),
        memo_(std::make_unique<Memo>()) {
    std::lock_guard lock(other.memo_->mutex);
    memo_->positive = other.memo_->positive;
    memo_->negative = other.memo_->negative;
  }
  CumulativeIntensity(CumulativeIntensity&&) noexcept = default;
  CumulativeIntensity& operator=(CumulativeIntensity other) noexcept {
    swap(other);
    return *this;
  }

  void swap(CumulativeIntensity& other) noexcept {
    std::swap(model_, other.model_);
    std::swap(tol_, other.tol_);
    std::swap(spacing_, other.spacing_);
    std::swap(support_, other.support_);
    std::swap(memo_, other.memo_);
  }

  const RateModel& model() const noexcept { return model_; }
  double tolerance() const noexcept { return tol_; }
  /// Closed set outside of which R is flat.
  const Domain& support() const noexcept { return support_; }

  double operator()(double t) const {
    if (std::isnan(t)) throw InvalidParameter("R evaluated at NaN");
    if (t == 0.0 || support_.empty()) return 0.0;
    // r vanishes outside the support, so R is flat there.
    t = clamp_to_support(t);
    if (t == 0.0) return 0.0;
    const double magnitude = std::fabs(t);
    const std::size_t index = checkpoint_index(magnitude);
    const double anchor = boundary(index);
    const double base = checkpoint_value(t > 0.0, index);
    if (t > 0.0) return base + detail::integrate_extended(model_, anchor, t, tol_);
    return base - detail::integrate_extended(model_, t, -anchor, tol_);
  }

  /// R at the lower and upper end of the support; infinite when the support
  /// is unbounded on that side.
  double lower_limit() const { return std::isfinite(support_.lo) ? (*this)(support_.lo) : -kInfinity; }
  double upper_limit() const { return std::isfinite(support_.hi) ? (*this)(support_.hi) : kInfinity; }

  /// Generalized inverse inf{t : R(t) >= y}, restricted to the support.
  double invert(double y, std::optional<Interval> hint = std::nullopt) const;

  std::size_t checkpoint_count() const {
    std::lock_guard lock(memo_->mutex);
    return memo_->positive.size() + memo_->negative.size() - 1;
  }

  /// Memoized (t, R(t)) pairs in increasing t.
  std::vector<std::pair<double, double>> checkpoints() const {
    std::lock_guard lock(memo_->mutex);
    std::vector<std::pair<double, double>> table;
    for (std::size_t i = memo_->negative.size(); i-- > 1;) table.emplace_back(-boundary(i), memo_->negative[i]);
    for (std::size_t i = 0; i < memo_->positive.size(); ++i) table.emplace_back(boundary(i), memo_->positive[i]);
    return table;
  }

 private:
  static constexpr std::size_t kLinearCheckpoints = 64;
  static constexpr double kMaxExtent = 1e12;

  struct Memo {
    std::mutex mutex;
    std::vector<double> positive{0.0};
    std::vector<double> negative{0.0};
  };

  double clamp_to_support(double t) const { return std::clamp(t, support_.lo, support_.hi); }

  double boundary(std::size_t index) const {
    if (index <= kLinearCheckpoints) return spacing_ * static_cast<double>(index);
    return spacing_ * static_cast<double>(kLinearCheckpoints) *
           std::ldexp(1.0, static_cast<int>(index - kLinearCheckpoints));
  }

  std::size_t checkpoint_index(double magnitude) const {
    std::size_t index = 0;
    if (magnitude < spacing_ * static_cast<double>(kLinearCheckpoints)) {
      index = static_cast<std::size_t>(std::floor(magnitude / spacing_));
    } else {
      const double ratio = magnitude / (spacing_ * static_cast<double>(kLinearCheckpoints));
      index = kLinearCheckpoints + static_cast<std::size_t>(std::max(0.0, std::floor(std::log2(ratio))));
    }
    while (index > 0 && boundary(index) > magnitude) --index;
    while (boundary(index + 1) <= magnitude) ++index;
    return index;
  }

  double checkpoint_value(bool positive_side, std::size_t index) const {
    std::lock_guard lock(memo_->mutex);
    auto& table = positive_side ? memo_->positive : memo_->negative;
    while (table.size() <= index) {
      const std::size_t i = table.size() - 1;
      const double near = boundary(i);
      const double far = boundary(i + 1);
      const double piece = positive_side ? detail::integrate_extended(model_, near, far, tol_)
                                         : detail::integrate_extended(model_, -far, -near, tol_);
      table.push_back(positive_side ? table.back() + piece : table.back() - piece);
    }
    return table[index];
  }

  RateModel model_;
  double tol_;
  double spacing_;
  Domain support_;
  std::unique_ptr<Memo> memo_;
};

inline double CumulativeIntensity::invert(double y, std::optional<Interval> hint) const {
  if (!std::isfinite(y)) throw InvalidParameter("cannot invert R at a non-finite value");
  if (support_.empty()) {
    if (y == 0.0) return std::clamp(0.0, model_.domain().lo, model_.domain().hi);
    throw OutOfRange(y, 0.0);
  }
  const auto& R = *this;
  if (std::isfinite(support_.hi)) {
    const double top = R(support_.hi);
    if (y > top) throw OutOfRange(y, top);
  }
  if (std::isfinite(support_.lo)) {
    const double bottom = R(support_.lo);
    if (y < bottom) throw OutOfRange(y, bottom);
    if (y == bottom) return support_.lo;
  }

  // Bracket lo < hi with R(lo) < y <= R(hi), widening outwards by doubling.
  double lo = clamp_to_support(hint ? hint->lo() : 0.0);
  double hi = clamp_to_support(hint ? hint->hi() : 0.0);
  double step = hint ? std::max(1.0, hint->length()) : 1.0;
  double r_lo = R(lo);
  while (r_lo >= y) {
    hi = lo;
    lo = std::max(support_.lo, lo - step);
    step *= 2;
    if (std::fabs(lo) > kMaxExtent) throw OutOfRange(y, R(lo));
    r_lo = R(lo);
    if (lo == support_.lo && r_lo >= y) return lo;
  }
  step = hint ? std::max(1.0, hint->length()) : 1.0;
  double r_hi = R(hi);
  while (r_hi < y) {
    lo = hi;
    r_lo = r_hi;
    hi = std::min(support_.hi, hi + step);
    step *= 2;
    if (std::fabs(hi) > kMaxExtent) throw OutOfRange(y, R(hi));
    r_hi = R(hi);
  }

  // Safeguarded Newton on the bracket, with R' = r. Bisection takes over
  // wherever r vanishes, which walks plateaus to their left edge.
  auto width_tol = [this](double t) { return std::max(tol_, std::fabs(t) * 1e-12); };
  double last_width = hi - lo;
  double last_t = hi;
  double last_value = r_hi;
  for (int iteration = 0; iteration < 400; ++iteration) {
    const double width = hi - lo;
    if (r_hi - y <= tol_ && width <= width_tol(hi)) return hi;
    if (width <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(hi))) return hi;

    double candidate = 0.5 * (lo + hi);
    const bool stalled = iteration % 4 == 3 && width > 0.5 * last_width;
    if (iteration % 4 == 3) last_width = width;
    if (!stalled) {
      if (r_hi - y <= tol_) {
        // Close enough in value; pull lo up to confirm the bracket width.
        candidate = std::max(hi - 0.5 * width_tol(hi), 0.5 * (lo + hi));
      } else {
        const double rate = model_.extended(last_t);
        if (rate > 0.0) {
          const double newton = last_t - (last_value - y) / rate;
          if (newton > lo && newton < hi) candidate = newton;
        }
      }
    }
    const double value = R(candidate);
    last_t = candidate;
    last_value = value;
    if (value >= y) {
      hi = candidate;
      r_hi = value;
    } else {
      lo = candidate;
      r_lo = value;
    }
  }
  return hi;
}

inline CumulativeIntensity cumulative_intensity(const RateModel& model, double tol = kDefaultTolerance) {
  return CumulativeIntensity(model, tol);
}

inline double invert_R(const CumulativeIntensity& R, double y, std::optional<Interval> bracket_hint = std::nullopt) {
  return R.invert(y, bracket_hint);
}

}  // namespace ippp
