#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbspline/error.hpp"

namespace gbs {

enum class KnotFunctionKind { linear, trigonometric, exponential };

inline const char* kind_name(KnotFunctionKind kind) {
  switch (kind) {
    case KnotFunctionKind::linear: return "linear";
    case KnotFunctionKind::trigonometric: return "trigonometric";
    case KnotFunctionKind::exponential: return "exponential";
  }
  return "unknown";
}

struct KnotFunctionSpec {
  KnotFunctionKind kind = KnotFunctionKind::linear;
  double omega = 0.0;  // ignored for linear

  friend bool operator==(const KnotFunctionSpec&, const KnotFunctionSpec&) = default;
};

inline KnotFunctionSpec linear_spec() { return {KnotFunctionKind::linear, 0.0}; }
inline KnotFunctionSpec trig_spec(double omega) { return {KnotFunctionKind::trigonometric, omega}; }
inline KnotFunctionSpec exp_spec(double omega) { return {KnotFunctionKind::exponential, omega}; }

enum class Generator { u = 0, v = 1 };

namespace detail {

// Sum_{n >= first, n = first (mod 2)} sign^((n-first)/2) x^n / n!
inline double shifted_series(int first, double x, bool alternate) {
  double term = 1.0;
  for (int n = 1; n <= first; ++n) term *= x / n;
  double sum = term;
  for (int n = first + 2; n < first + 400; n += 2) {
    term *= x * x / (static_cast<double>(n - 1) * n);
    if (alternate) term = -term;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum) || term == 0.0) break;
  }
  return sum;
}

// Value of sin(x + n pi/2) without accumulating phase error.
inline double sin_quarter(double x, int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return std::sin(x);
    case 1: return std::cos(x);
    case 2: return -std::sin(x);
    default: return -std::cos(x);
  }
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace detail

/// Per-interval Chebyshev pairs (u_j, v_j) over a knot sequence.
///
/// Generators are normalized so that u rises from 0 to 1 and v falls from 1
/// to 0 across each interval. Order k >= 1 means the k-fold iterated integral
/// anchored at the interval's left endpoint (every antiderivative vanishes
/// there); order k < 0 means the |k|-th derivative.
class KnotFunctionFamily {
 public:
  KnotFunctionFamily() = default;

  /// `per_interval[j]` describes interval [knots[j], knots[j+1]]; it must be
  /// empty exactly when the interval is shorter than `tol`.
  KnotFunctionFamily(std::vector<double> knots, std::vector<std::optional<KnotFunctionSpec>> per_interval,
                     double tol = kDefaultTol)
      : knots_(std::move(knots)), specs_(std::move(per_interval)), tol_(tol) {
    if (knots_.size() < 2 || specs_.size() != knots_.size() - 1)
      throw Error(ErrorCode::InvalidFamily, "need one entry per knot interval");
    for (std::size_t j = 0; j < specs_.size(); ++j) {
      const double h = knots_[j + 1] - knots_[j];
      if (h <= tol_) {
        specs_[j].reset();
        continue;
      }
      if (!specs_[j])
        throw Error(ErrorCode::InvalidFamily, "interval " + std::to_string(j) + " has no knot functions");
      validate(*specs_[j], h, j);
    }
  }

  /// One spec per interval longer than `tol`, in order.
  static KnotFunctionFamily from_nonempty(std::vector<double> knots, std::span<const KnotFunctionSpec> specs,
                                          double tol = kDefaultTol) {
    std::vector<std::optional<KnotFunctionSpec>> per_interval(knots.size() > 0 ? knots.size() - 1 : 0);
    std::size_t next = 0;
    for (std::size_t j = 0; j < per_interval.size(); ++j) {
      if (knots[j + 1] - knots[j] <= tol) continue;
      if (next >= specs.size())
        throw Error(ErrorCode::InvalidFamily, "fewer family entries than nonzero-length intervals");
      per_interval[j] = specs[next++];
    }
    if (next != specs.size())
      throw Error(ErrorCode::InvalidFamily, "more family entries than nonzero-length intervals");
    return KnotFunctionFamily(std::move(knots), std::move(per_interval), tol);
  }

  static KnotFunctionFamily uniform(std::vector<double> knots, KnotFunctionSpec spec, double tol = kDefaultTol) {
    std::vector<std::optional<KnotFunctionSpec>> per_interval(knots.size() > 0 ? knots.size() - 1 : 0);
    for (std::size_t j = 0; j < per_interval.size(); ++j)
      if (knots[j + 1] - knots[j] > tol) per_interval[j] = spec;
    return KnotFunctionFamily(std::move(knots), std::move(per_interval), tol);
  }

  std::span<const double> knots() const { return knots_; }
  std::size_t interval_count() const { return specs_.size(); }
  double tol() const { return tol_; }
  bool has_functions(std::size_t j) const { return j < specs_.size() && specs_[j].has_value(); }
  const std::optional<KnotFunctionSpec>& spec(std::size_t j) const { return specs_.at(j); }
  double left(std::size_t j) const { return knots_[j]; }
  double right(std::size_t j) const { return knots_[j + 1]; }

  /// Specs of the nonempty intervals, in order.
  std::vector<KnotFunctionSpec> nonempty_specs() const {
    std::vector<KnotFunctionSpec> out;
    for (const auto& s : specs_)
      if (s) out.push_back(*s);
    return out;
  }

  /// Index of the nonempty interval containing t; half-open except for the
  /// last nonempty interval, which is closed. Returns nullopt outside.
  std::optional<std::size_t> locate(double t) const {
    std::optional<std::size_t> last;
    for (std::size_t j = 0; j < specs_.size(); ++j)
      if (specs_[j]) last = j;
    if (!last) return std::nullopt;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.begin()) return std::nullopt;
    std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (j >= specs_.size()) {
      if (t == knots_.back() && knots_[*last + 1] == t) return last;
      return std::nullopt;
    }
    while (!specs_[j]) {
      // t lies on a cluster of coincident knots; step back to a real interval.
      if (j == 0) return std::nullopt;
      --j;
    }
    if (t > knots_[j + 1] + tol_) return std::nullopt;
    return j;
  }

  /// Order-k value of generator `which` on interval j at parameter t.
  double value(std::size_t j, Generator which, int order, double t) const {
    if (!has_functions(j))
      throw Error(ErrorCode::OutOfInterval, "interval " + std::to_string(j) + " carries no knot functions");
    const double a = knots_[j];
    const double b = knots_[j + 1];
    const double slack = 1e-12 * (1.0 + std::abs(a) + std::abs(b));
    if (t < a - slack || t > b + slack)
      throw Error(ErrorCode::OutOfInterval,
                  "t=" + std::to_string(t) + " outside interval " + std::to_string(j));
    t = std::clamp(t, a, b);
    const KnotFunctionSpec& sp = *specs_[j];
    const double h = b - a;
    const double s = t - a;
    const double w = b - t;
    switch (sp.kind) {
      case KnotFunctionKind::linear: return linear_value(which, order, s, w, h);
      case KnotFunctionKind::trigonometric: return periodic_value(which, order, s, w, h, sp.omega, true);
      case KnotFunctionKind::exponential: return periodic_value(which, order, s, w, h, sp.omega, false);
    }
    throw Error(ErrorCode::UnsupportedOrder, "unknown knot function kind");
  }

 private:
  static void validate(const KnotFunctionSpec& sp, double h, std::size_t j) {
    if (sp.kind == KnotFunctionKind::linear) return;
    if (!(sp.omega > 0.0) || !std::isfinite(sp.omega))
      throw Error(ErrorCode::InvalidFamily, "omega must be positive on interval " + std::to_string(j));
    if (sp.kind == KnotFunctionKind::trigonometric && !(sp.omega * h < std::numbers::pi))
      throw Error(ErrorCode::InvalidFamily,
                  "trigonometric pair is not Chebyshev on interval " + std::to_string(j) + " (omega*h >= pi)");
  }

  static double linear_value(Generator which, int order, double s, double w, double h) {
    using detail::factorial;
    if (order < 0) {
      if (order < -1) return 0.0;
      return which == Generator::u ? 1.0 / h : -1.0 / h;
    }
    const double up = std::pow(s, order + 1) / (factorial(order + 1) * h);
    if (which == Generator::u) return up;
    if (order == 0) return w / h;
    return std::pow(s, order) / factorial(order) - up;
  }

  // sin/sinh pair: u = S(omega s)/S(omega h), v = S(omega w)/S(omega h).
  static double periodic_value(Generator which, int order, double s, double w, double h, double omega,
                               bool trig) {
    const double denom = trig ? std::sin(omega * h) : std::sinh(omega * h);
    if (order <= 0) {
      const int d = -order;
      const double x = omega * (which == Generator::u ? s : w);
      double f;
      if (trig)
        f = detail::sin_quarter(x, d);
      else
        f = (d % 2 == 0) ? std::sinh(x) : std::cosh(x);
      double scale = std::pow(omega, d) / denom;
      if (which == Generator::v && d % 2 == 1) scale = -scale;
      return f * scale;
    }
    // Left-anchored iterated integrals via the Taylor tail of sin/cos (sinh/cosh).
    const double x = omega * s;
    const double odd = detail::shifted_series(order + 1, x, trig);  // k-fold integral of sin(x)
    const double even = detail::shifted_series(order, x, trig);     // k-fold integral of cos(x)
    const double scale = 1.0 / (std::pow(omega, order) * denom);
    if (which == Generator::u) return odd * scale;
    // S(omega (h - s)) = S(omega h) C(omega s) -+ C(omega h) S(omega s)
    const double sh = trig ? std::sin(omega * h) : std::sinh(omega * h);
    const double ch = trig ? std::cos(omega * h) : std::cosh(omega * h);
    return (sh * even - ch * odd) * scale;
  }

  std::vector<double> knots_;
  std::vector<std::optional<KnotFunctionSpec>> specs_;
  double tol_ = kDefaultTol;
};

inline double knot_function_value(const KnotFunctionFamily& fam, std::size_t interval, Generator which, int order,
                                  double t) {
  return fam.value(interval, which, order, t);
}

/// Knot-function values at reg1 interval endpoints, indexed
/// [order][interval][endpoint][generator].
class IntegralTable {
 public:
  IntegralTable() = default;
  IntegralTable(std::size_t orders, std::size_t intervals)
      : orders_(orders), intervals_(intervals),
        data_(orders * intervals * 4, std::numeric_limits<double>::quiet_NaN()) {}

  std::size_t orders() const { return orders_; }
  std::size_t intervals() const { return intervals_; }

  double at(std::size_t order, std::size_t interval, int endpoint, Generator w) const {
    return data_[index(order, interval, endpoint, w)];
  }
  double& at(std::size_t order, std::size_t interval, int endpoint, Generator w) {
    return data_[index(order, interval, endpoint, w)];
  }

 private:
  std::size_t index(std::size_t order, std::size_t interval, int endpoint, Generator w) const {
    return ((order * intervals_ + interval) * 2 + static_cast<std::size_t>(endpoint)) * 2 +
           static_cast<std::size_t>(w);
  }

  std::size_t orders_ = 0;
  std::size_t intervals_ = 0;
  std::vector<double> data_;
};

inline constexpr int kLeft = 0;
inline constexpr int kRight = 1;

/// Index of the nonempty family interval containing [a, b]; throws
/// IntervalStraddle when [a, b] crosses a breakpoint by more than tol.
inline std::size_t containing_interval(const KnotFunctionFamily& fam, double a, double b, double tol) {
  const auto j = fam.locate(0.5 * (a + b));
  if (!j || a < fam.left(*j) - tol || b > fam.right(*j) + tol)
    throw Error(ErrorCode::IntervalStraddle,
                "[" + std::to_string(a) + ", " + std::to_string(b) + "] is not inside one source interval");
  return *j;
}

/// Entry [k][j][e][w] is the order (k - derivative_offset) value of generator
/// w of the fam0 interval containing reg1 interval j, at endpoint e.
/// Rows of zero-length reg1 intervals stay NaN.
inline IntegralTable build_integral_table(const KnotFunctionFamily& fam0, std::span<const double> reg1,
                                          int derivative_offset, int max_order, double tol = kDefaultTol) {
  const std::size_t n = reg1.size() > 0 ? reg1.size() - 1 : 0;
  IntegralTable table(static_cast<std::size_t>(max_order + 1), n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = reg1[j];
    const double b = reg1[j + 1];
    if (b - a <= tol) continue;
    const std::size_t src = containing_interval(fam0, a, b, tol);
    const double ends[2] = {std::clamp(a, fam0.left(src), fam0.right(src)),
                            std::clamp(b, fam0.left(src), fam0.right(src))};
    for (int k = 0; k <= max_order; ++k)
      for (int e = 0; e < 2; ++e)
        for (Generator w : {Generator::u, Generator::v})
          table.at(static_cast<std::size_t>(k), j, e, w) = fam0.value(src, w, k - derivative_offset, ends[e]);
  }
  return table;
}

}  // namespace gbs
