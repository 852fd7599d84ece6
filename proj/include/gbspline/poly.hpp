#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gbspline/error.hpp"

namespace gbs {

/// Polynomial in the shifted power basis: value(s) = sum_k coeffs[k] s^k,
/// where s is measured from the left end of an interval of length `length`.
struct PolyTerm {
  std::vector<double> coeffs;
  double length = 0.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

inline double poly_eval(std::span<const double> coeffs, double s) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
  return acc;
}

inline double poly_eval(const PolyTerm& p, double s) { return poly_eval(p.coeffs, s); }

/// Antiderivative vanishing at s = 0.
inline PolyTerm integrate_poly(const PolyTerm& p) {
  PolyTerm out{std::vector<double>(p.coeffs.size() + 1, 0.0), p.length};
  for (std::size_t k = 0; k < p.coeffs.size(); ++k) out.coeffs[k + 1] = p.coeffs[k] / static_cast<double>(k + 1);
  return out;
}

/// Coefficients of q(s) = p(s + shift), by repeated synthetic division.
inline std::vector<double> taylor_shift(std::vector<double> c, double shift) {
  const std::size_t n = c.size();
  if (shift == 0.0) return c;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t k = n - 1; k > i; --k) c[k - 1] += shift * c[k];
  return c;
}

/// Derivatives p(s), p'(s), ..., p^(count-1)(s).
inline std::vector<double> poly_derivatives(std::span<const double> coeffs, double s, std::size_t count) {
  std::vector<double> shifted = taylor_shift(std::vector<double>(coeffs.begin(), coeffs.end()), s);
  std::vector<double> out(count, 0.0);
  double fact = 1.0;
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    if (k < shifted.size()) out[k] = shifted[k] * fact;
  }
  return out;
}

/// Re-expands a polynomial defined over [source_left, source_right] onto the
/// consecutive intervals [targets[j], targets[j+1]], each in its own local
/// coordinate.
inline std::vector<PolyTerm> restrict_poly(const PolyTerm& p, double source_left, double source_right,
                                           std::span<const double> targets, double tol = kDefaultTol) {
  if (targets.empty()) return {};
  if (targets.front() < source_left - tol || targets.back() > source_right + tol)
    throw Error(ErrorCode::TargetsOutsideSource, "restriction targets leave the source interval");
  std::vector<PolyTerm> out;
  out.reserve(targets.size() - 1);
  for (std::size_t j = 0; j + 1 < targets.size(); ++j) {
    if (targets[j + 1] < targets[j])
      throw Error(ErrorCode::TargetsOutsideSource, "restriction targets must be nondecreasing");
    out.push_back({taylor_shift(p.coeffs, targets[j] - source_left), targets[j + 1] - targets[j]});
  }
  return out;
}

/// Zero-pads every polynomial to `target_degree`.
inline std::vector<PolyTerm> elevate_polys(std::vector<PolyTerm> polys, int target_degree) {
  for (auto& p : polys) {
    if (p.degree() > target_degree)
      throw Error(ErrorCode::TargetTooSmall, "cannot elevate degree " + std::to_string(p.degree()) + " to " +
                                                 std::to_string(target_degree));
    p.coeffs.resize(static_cast<std::size_t>(target_degree + 1), 0.0);
  }
  return polys;
}

/// Polynomial with the given derivatives at s = 0.
inline PolyTerm left_taylor_series(std::span<const double> derivs, double h) {
  PolyTerm out{std::vector<double>(derivs.begin(), derivs.end()), h};
  double fact = 1.0;
  for (std::size_t k = 1; k < out.coeffs.size(); ++k) {
    fact *= static_cast<double>(k);
    out.coeffs[k] /= fact;
  }
  return out;
}

/// Polynomial with the given derivatives at s = h, expressed around s = 0.
inline PolyTerm right_taylor_series(std::span<const double> derivs, double h) {
  PolyTerm around_right = left_taylor_series(derivs, h);
  return {taylor_shift(std::move(around_right.coeffs), -h), h};
}

/// Coefficient-wise comparison with absolute tolerance tol * max(1, max|c|).
inline bool poly_close(std::span<const double> a, std::span<const double> b, double tol = 1e-10) {
  const std::size_t n = std::max(a.size(), b.size());
  double scale = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < a.size()) scale = std::max(scale, std::abs(a[k]));
    if (k < b.size()) scale = std::max(scale, std::abs(b[k]));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double x = k < a.size() ? a[k] : 0.0;
    const double y = k < b.size() ? b[k] : 0.0;
    if (std::abs(x - y) > tol * scale) return false;
  }
  return true;
}

}  // namespace gbs
