#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gbspline/gbspline.hpp"

namespace gbs::testing {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Open knot vector of degree p over [a, b] with the given interior knots.
inline std::vector<double> open_knots(int p, std::vector<double> interior, double a = 0.0, double b = 1.0) {
  std::vector<double> k(static_cast<std::size_t>(p) + 1, a);
  k.insert(k.end(), interior.begin(), interior.end());
  k.insert(k.end(), static_cast<std::size_t>(p) + 1, b);
  return k;
}

/// Degree-4 open knot vector with one interior knot: [0^5, .5, 1^5].
inline std::vector<double> deg4_midpoint_knots() { return open_knots(4, {0.5}); }

inline std::vector<double> random_values(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(rng);
  return out;
}

struct Built {
  SplineCurve curve;
  LocalBasis basis;
};

inline Built make_curve(const std::vector<double>& knots, int p, KnotFunctionSpec spec, std::vector<double> cpts) {
  KnotVector kv = KnotVector::general(knots, p);
  KnotFunctionFamily fam = KnotFunctionFamily::uniform(knots, spec);
  LocalBasis basis = build_local_basis(kv, fam);
  return {SplineCurve(kv, fam, std::move(cpts)), std::move(basis)};
}

inline Built make_random_curve(const std::vector<double>& knots, int p, KnotFunctionSpec spec, unsigned seed) {
  const std::size_t n = knots.size() - static_cast<std::size_t>(p) - 1;
  return make_curve(knots, p, spec, random_values(n, seed));
}

inline Built rebuild(const SplineCurve& c) {
  return {c, build_local_basis(c.kv, c.fam)};
}

inline std::vector<double> uniform_samples(double a, double b, int count = 1001) {
  std::vector<double> ts(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) ts[static_cast<std::size_t>(k)] = k + 1 == count ? b : a + (b - a) * k / (count - 1);
  return ts;
}

/// max |f0(t) - f1(t)| over uniform samples of f0's active region.
inline double max_curve_gap(const Built& a, const Built& b, int count = 1001) {
  double gap = 0.0;
  for (double t : uniform_samples(a.curve.kv.active_begin(), a.curve.kv.active_end(), count))
    gap = std::max(gap, std::abs(eval_curve(a.curve, a.basis, t) - eval_curve(b.curve, b.basis, t)));
  return gap;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// order-th derivative of a degree-p local term on family interval j.
inline double local_derivative(const LocalTerm& term, const KnotFunctionFamily& fam, std::size_t j, int p, int order,
                               double t) {
  const double s = t - fam.left(j);
  double v = poly_derivatives(term.poly.coeffs, s, static_cast<std::size_t>(order) + 1)[static_cast<std::size_t>(order)];
  v += term.a * fam.value(j, Generator::u, p - 1 - order, t);
  v += term.b * fam.value(j, Generator::v, p - 1 - order, t);
  return v;
}

/// Worst relative mismatch of one-sided derivatives (orders 1..p-1) of every
/// basis function across each simple interior knot.
inline double worst_knot_derivative_jump(const LocalBasis& basis) {
  const KnotVector& kv = basis.knots();
  const int p = basis.degree();
  double worst = 0.0;
  for (std::size_t j = kv.active_first() + 1; j < kv.active_last(); ++j) {
    const double x = kv[j];
    if (kv.multiplicity(x) != 1) continue;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const bool left_in = j - 1 >= i && j - 1 <= i + static_cast<std::size_t>(p);
      const bool right_in = j >= i && j <= i + static_cast<std::size_t>(p);
      for (int r = 1; r <= p - 1; ++r) {
        const double dl = left_in ? local_derivative(basis.term(i, j - 1 - i), basis.family(), j - 1, p, r, x) : 0.0;
        const double dr = right_in ? local_derivative(basis.term(i, j - i), basis.family(), j, p, r, x) : 0.0;
        worst = std::max(worst, std::abs(dl - dr) / std::max(1.0, std::max(std::abs(dl), std::abs(dr))));
      }
    }
  }
  return worst;
}

}  // namespace gbs::testing
