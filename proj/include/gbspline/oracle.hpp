#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbspline/error.hpp"
#include "gbspline/knot_functions.hpp"

namespace gbs {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_depth = 40;
};

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double fa, double m, double fm,
                           double b, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw Error(ErrorCode::DepthExceeded, "adaptive Simpson did not converge");
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               const QuadratureConfig& cfg = {}) {
  if (b <= a) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, m, fm, b, fb, whole, cfg.abs_tol, cfg.max_depth);
}

/// Reference GB-spline evaluator built directly from the recursive-integral
/// definition: N_i^1 from the knot functions, then
/// N_i^p = Phi_i^{p-1} - Phi_{i+1}^{p-1} with every integral done by
/// adaptive quadrature. Slow; meant for tests.
class QuadratureOracle {
 public:
  QuadratureOracle(std::span<const double> knots, const KnotFunctionFamily& fam, QuadratureConfig cfg = {})
      : knots_(knots.begin(), knots.end()), fam_(fam), cfg_(cfg) {}

  double basis(std::size_t i, int p, double t) {
    const std::size_t m = knots_.size();
    const auto up = static_cast<std::size_t>(p);
    if (i + up + 1 >= m) return 0.0;
    // Last basis function takes the value 1 at the right end of an open knot vector.
    if (p >= 1 && i == m - up - 2 && t == knots_[m - 1] && knots_[m - up - 1] == knots_[m - 1] &&
        knots_[m - up - 2] != knots_[m - up - 1])
      return 1.0;
    if (p == 1) return degree_one(i, t);
    return phi(i, p - 1, t) - phi(i + 1, p - 1, t);
  }

  /// delta_i^p, the integral of N_i^p over its support.
  double delta(std::size_t i, int p) {
    const auto key = std::pair{i, p};
    if (auto it = deltas_.find(key); it != deltas_.end()) return it->second;
    double total = 0.0;
    for (std::size_t j = i; j <= i + static_cast<std::size_t>(p); ++j)
      if (fam_.has_functions(j)) total += piece_integral(i, p, j, knots_[j + 1]);
    deltas_[key] = total;
    return total;
  }

  double phi(std::size_t i, int p, double t) {
    const std::size_t end = i + static_cast<std::size_t>(p) + 1;
    const double d = delta(i, p);
    if (d == 0.0) return t < knots_[end] ? 0.0 : 1.0;
    if (t <= knots_[i]) return 0.0;
    if (t >= knots_[end]) return 1.0;
    const Key key{i, p, std::bit_cast<std::uint64_t>(t)};
    if (auto it = phis_.find(key); it != phis_.end()) return it->second;
    double acc = 0.0;
    for (std::size_t j = i; j < end && knots_[j] < t; ++j)
      if (fam_.has_functions(j)) acc += piece_integral(i, p, j, std::min(t, knots_[j + 1]));
    const double value = acc / d;
    phis_[key] = value;
    return value;
  }

 private:
  struct Key {
    std::size_t i;
    int p;
    std::uint64_t t;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::uint64_t>{}(k.t) ^ (k.i * 0x9e3779b97f4a7c15ULL) ^ (static_cast<std::size_t>(k.p) << 48);
    }
  };
  struct PairHash {
    std::size_t operator()(const std::pair<std::size_t, int>& k) const { return k.first * 64 + static_cast<std::size_t>(k.second); }
  };

  double degree_one(std::size_t i, double t) const {
    if (t >= knots_[i] && t < knots_[i + 1] && fam_.has_functions(i)) return fam_.value(i, Generator::u, 0, t);
    if (t >= knots_[i + 1] && t <= knots_[i + 2] && fam_.has_functions(i + 1))
      return fam_.value(i + 1, Generator::v, 0, t);
    return 0.0;
  }

  // Integral of N_i^p over [t_j, upper] within knot interval j.
  double piece_integral(std::size_t i, int p, std::size_t j, double upper) {
    const double lo = knots_[j];
    const double hi = knots_[j + 1];
    auto f = [&](double s) {
      // keep evaluations on the correct side of interval boundaries
      s = std::min(std::max(s, lo), std::nextafter(hi, lo));
      if (s < lo) s = lo;
      return basis(i, p, s);
    };
    return adaptive_simpson(f, lo, upper, cfg_);
  }

  std::vector<double> knots_;
  KnotFunctionFamily fam_;
  QuadratureConfig cfg_;
  std::unordered_map<Key, double, KeyHash> phis_;
  std::unordered_map<std::pair<std::size_t, int>, double, PairHash> deltas_;
};

inline double oracle_eval_basis(std::span<const double> knots, const KnotFunctionFamily& fam, std::size_t i, int p,
                                double t, const QuadratureConfig& cfg = {}) {
  if (p < 1) throw Error(ErrorCode::DegreeTooSmall, "oracle needs degree >= 1");
  QuadratureOracle oracle(knots, fam, cfg);
  return oracle.basis(i, p, t);
}

}  // namespace gbs
