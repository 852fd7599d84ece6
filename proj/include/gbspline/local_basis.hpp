#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gbspline/diagonals.hpp"
#include "gbspline/error.hpp"
#include "gbspline/knot_functions.hpp"
#include "gbspline/knot_vector.hpp"
#include "gbspline/poly.hpp"

namespace gbs {

/// Local representation on one interval: poly(s) + a u^[p-1](t) + b v^[p-1](t).
/// Terms on zero-length intervals are marked missing (NaN coefficients).
struct LocalTerm {
  PolyTerm poly;
  double a = 0.0;
  double b = 0.0;

  static LocalTerm missing(std::size_t poly_len) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return {{std::vector<double>(poly_len, nan), 0.0}, nan, nan};
  }

  bool is_missing() const { return std::isnan(a); }

  LocalTerm scaled(double c) const {
    LocalTerm out = *this;
    for (double& x : out.poly.coeffs) x *= c;
    out.a *= c;
    out.b *= c;
    return out;
  }

  LocalTerm& operator+=(const LocalTerm& o) {
    if (poly.coeffs.size() < o.poly.coeffs.size()) poly.coeffs.resize(o.poly.coeffs.size(), 0.0);
    for (std::size_t k = 0; k < o.poly.coeffs.size(); ++k) poly.coeffs[k] += o.poly.coeffs[k];
    a += o.a;
    b += o.b;
    return *this;
  }
};

/// Value of a local term of degree `degree` on family interval j at t.
inline double eval_local_term(const LocalTerm& term, const KnotFunctionFamily& fam, std::size_t j, int degree,
                              double t) {
  double value = poly_eval(term.poly, t - fam.left(j));
  if (term.a != 0.0) value += term.a * fam.value(j, Generator::u, degree - 1, t);
  if (term.b != 0.0) value += term.b * fam.value(j, Generator::v, degree - 1, t);
  return value;
}

/// Integral of a degree-`degree` local term over its whole interval j.
inline double integrate_local_term(const LocalTerm& term, const KnotFunctionFamily& fam, std::size_t j, int degree) {
  const double h = fam.right(j) - fam.left(j);
  double value = poly_eval(integrate_poly(term.poly), h);
  for (auto [coef, g] : {std::pair{term.a, Generator::u}, std::pair{term.b, Generator::v}}) {
    if (coef == 0.0) continue;
    value += coef * (fam.value(j, g, degree, fam.right(j)) - fam.value(j, g, degree, fam.left(j)));
  }
  return value;
}

/// Index of the nonempty knot interval of the active region containing t.
/// Intervals are half-open except the last nonempty one, which is closed.
inline std::size_t active_interval(const KnotVector& kv, const KnotFunctionFamily& fam, double t) {
  const std::size_t first = kv.active_first();
  const std::size_t last = kv.active_last();
  if (!(t >= kv[first] && t <= kv[last]))
    throw Error(ErrorCode::OutOfActiveRegion, "t=" + std::to_string(t) + " is outside [" +
                                                  std::to_string(kv[first]) + ", " + std::to_string(kv[last]) + "]");
  auto knots = kv.knots();
  auto begin = knots.begin() + static_cast<std::ptrdiff_t>(first);
  auto end = knots.begin() + static_cast<std::ptrdiff_t>(last) + 1;
  std::size_t j = static_cast<std::size_t>(std::upper_bound(begin, end, t) - knots.begin());
  j = j == 0 ? 0 : j - 1;
  if (j >= last) j = last - 1;
  while (j > first && !fam.has_functions(j)) --j;
  if (!fam.has_functions(j)) {
    // only empty intervals to the left: take the first real one to the right
    while (j + 1 < last && !fam.has_functions(j)) ++j;
  }
  if (!fam.has_functions(j)) throw Error(ErrorCode::OutOfActiveRegion, "active region has no nonempty interval");
  return j;
}

/// Local representations of all degree-p GB-spline basis functions over a
/// knot vector. Row i holds N_i on intervals i, i+1, ..., i+p.
class LocalBasis {
 public:
  const KnotVector& knots() const { return kv_; }
  const KnotFunctionFamily& family() const { return fam_; }
  int degree() const { return kv_.degree(); }
  std::size_t size() const { return table_.size(); }
  double tol() const { return fam_.tol(); }

  const std::vector<std::vector<LocalTerm>>& table() const { return table_; }
  const LocalTerm& term(std::size_t i, std::size_t slot) const { return table_.at(i).at(slot); }

  /// Normalization integral delta_i^level for level in 1..p.
  double delta(int level, std::size_t i) const { return deltas_.at(static_cast<std::size_t>(level)).at(i); }

 private:
  friend LocalBasis build_local_basis(const KnotVector&, const KnotFunctionFamily&);
  LocalBasis(KnotVector kv, KnotFunctionFamily fam) : kv_(std::move(kv)), fam_(std::move(fam)) {}

  KnotVector kv_;
  KnotFunctionFamily fam_;
  std::vector<std::vector<LocalTerm>> table_;
  std::vector<std::vector<double>> deltas_;
};

inline LocalBasis build_local_basis(const KnotVector& kv, const KnotFunctionFamily& fam) {
  const int p = kv.degree();
  if (p < 1) throw Error(ErrorCode::DegreeTooSmall, "basis construction needs degree >= 1");
  const std::size_t m = kv.size();
  if (fam.knots().size() != m || !std::equal(fam.knots().begin(), fam.knots().end(), kv.knots().begin()))
    throw Error(ErrorCode::InvalidFamily, "knot functions are defined over a different knot vector");

  LocalBasis basis(kv, fam);
  basis.deltas_.resize(static_cast<std::size_t>(p) + 1);

  auto nonempty = [&](std::size_t j) { return fam.has_functions(j); };

  // degree 1: u_i on [t_i, t_{i+1}), v_{i+1} on [t_{i+1}, t_{i+2}]
  std::vector<std::vector<LocalTerm>> level(m - 2, std::vector<LocalTerm>(2));
  for (std::size_t i = 0; i < level.size(); ++i) {
    level[i][0] = nonempty(i) ? LocalTerm{{{}, kv[i + 1] - kv[i]}, 1.0, 0.0} : LocalTerm::missing(0);
    level[i][1] = nonempty(i + 1) ? LocalTerm{{{}, kv[i + 2] - kv[i + 1]}, 0.0, 1.0} : LocalTerm::missing(0);
  }

  // Per-interval integrals of each function at the current level.
  auto integrals_of = [&](const std::vector<std::vector<LocalTerm>>& lv, int d) {
    std::vector<std::vector<double>> out(lv.size());
    for (std::size_t i = 0; i < lv.size(); ++i) {
      out[i].assign(lv[i].size(), 0.0);
      for (std::size_t s = 0; s < lv[i].size(); ++s)
        if (!lv[i][s].is_missing()) out[i][s] = integrate_local_term(lv[i][s], fam, i + s, d);
    }
    return out;
  };
  auto sums_of = [](const std::vector<std::vector<double>>& ints) {
    std::vector<double> out(ints.size(), 0.0);
    for (std::size_t i = 0; i < ints.size(); ++i)
      for (double x : ints[i]) out[i] += x;
    return out;
  };
  auto all_missing = [](const std::vector<LocalTerm>& row) {
    return std::all_of(row.begin(), row.end(), [](const LocalTerm& t) { return t.is_missing(); });
  };

  std::vector<std::vector<double>> ints = integrals_of(level, 1);
  basis.deltas_[1] = sums_of(ints);

  for (int d = 2; d <= p; ++d) {
    const std::vector<std::vector<LocalTerm>>& prev = level;
    const auto& prev_delta = basis.deltas_[static_cast<std::size_t>(d - 1)];
    const auto ud = static_cast<std::size_t>(d);
    const std::size_t count = m - ud - 1;
    const std::size_t poly_len = ud - 1;

    // Phi_r^{d-1} at the left end of interval j (r's support is r .. r+d-1).
    auto phi_left = [&](std::size_t r, std::size_t j) -> double {
      if (all_missing(prev[r])) return j >= r + ud ? 1.0 : 0.0;
      if (j <= r) return 0.0;
      if (j >= r + ud) return 1.0;
      double acc = 0.0;
      for (std::size_t k = r; k < j; ++k) acc += ints[r][k - r];
      return acc / prev_delta[r];
    };

    std::vector<std::vector<LocalTerm>> next(count, std::vector<LocalTerm>(ud + 1));
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t s = 0; s <= ud; ++s) {
        const std::size_t j = i + s;
        if (!nonempty(j)) {
          next[i][s] = LocalTerm::missing(poly_len);
          continue;
        }
        const double tj = kv[j];
        LocalTerm term{{std::vector<double>(poly_len, 0.0), kv[j + 1] - tj}, 0.0, 0.0};
        term.poly.coeffs[0] = phi_left(i, j) - phi_left(i + 1, j);

        auto accumulate = [&](std::size_t r, std::size_t slot, double sign) {
          if (all_missing(prev[r])) return;
          const LocalTerm& src = prev[r][slot];
          const double scale = sign / prev_delta[r];
          PolyTerm ip = integrate_poly(src.poly);
          for (std::size_t k = 0; k < ip.coeffs.size(); ++k) term.poly.coeffs[k] += scale * ip.coeffs[k];
          double at_left = 0.0;
          if (src.a != 0.0) at_left += src.a * fam.value(j, Generator::u, d - 1, tj);
          if (src.b != 0.0) at_left += src.b * fam.value(j, Generator::v, d - 1, tj);
          term.poly.coeffs[0] -= scale * at_left;
          term.a += scale * src.a;
          term.b += scale * src.b;
        };
        if (s < ud) accumulate(i, s, 1.0);
        if (s >= 1) accumulate(i + 1, s - 1, -1.0);
        next[i][s] = std::move(term);
      }
    }
    level = std::move(next);
    ints = integrals_of(level, d);
    basis.deltas_[ud] = sums_of(ints);
  }

  basis.table_ = std::move(level);
  return basis;
}

inline double eval_basis_function(const LocalBasis& basis, std::size_t i, double t) {
  const std::size_t j = active_interval(basis.knots(), basis.family(), t);
  const auto p = static_cast<std::size_t>(basis.degree());
  if (i >= basis.size() || j < i || j > i + p) return 0.0;
  return eval_local_term(basis.term(i, j - i), basis.family(), j, basis.degree(), t);
}

/// Values of the p+1 basis functions that may be nonzero at t, together with
/// the index of the first one.
inline std::pair<std::size_t, std::vector<double>> eval_nonzero_basis(const LocalBasis& basis, double t) {
  const std::size_t j = active_interval(basis.knots(), basis.family(), t);
  const auto p = static_cast<std::size_t>(basis.degree());
  std::vector<double> values(p + 1);
  for (std::size_t c = 0; c <= p; ++c)
    values[c] = eval_local_term(basis.term(j - p + c, p - c), basis.family(), j, basis.degree(), t);
  return {j - p, std::move(values)};
}

/// Scalar GB-spline curve: sum_i cpts[i] N_i^p(t) over the active region.
struct SplineCurve {
  KnotVector kv;
  KnotFunctionFamily fam;
  std::vector<double> cpts;

  SplineCurve(KnotVector k, KnotFunctionFamily f, std::vector<double> c)
      : kv(std::move(k)), fam(std::move(f)), cpts(std::move(c)) {
    if (cpts.size() != kv.basis_count())
      throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(kv.basis_count()) +
                                                 " control points, got " + std::to_string(cpts.size()));
  }
};

inline double eval_curve(const SplineCurve& curve, const LocalBasis& basis, double t) {
  if (curve.cpts.size() != basis.size())
    throw Error(ErrorCode::LengthMismatch, "control points do not match the basis");
  const auto [first, values] = eval_nonzero_basis(basis, t);
  double acc = 0.0;
  for (std::size_t c = 0; c < values.size(); ++c) acc += curve.cpts[first + c] * values[c];
  return acc;
}

/// A spline written interval by interval over the active region of a knot
/// vector. Piece k lives on [breaks[k], breaks[k+1]], which is knot interval
/// first_interval + k of `family`.
struct PiecewiseCurve {
  std::vector<double> breaks;
  std::vector<LocalTerm> pieces;
  int degree = 0;
  KnotFunctionFamily family;
  std::size_t first_interval = 0;

  double operator()(double t) const {
    if (!(t >= breaks.front() && t <= breaks.back()))
      throw Error(ErrorCode::OutOfActiveRegion, "t=" + std::to_string(t) + " is outside the curve's domain");
    std::size_t k = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), t) - breaks.begin());
    k = k == 0 ? 0 : k - 1;
    if (k >= pieces.size()) k = pieces.size() - 1;
    while (k > 0 && pieces[k].is_missing()) --k;
    while (k + 1 < pieces.size() && pieces[k].is_missing()) ++k;
    const std::size_t j = first_interval + k;
    return eval_local_term(pieces[k], family, j, degree, t);
  }
};

inline PiecewiseCurve form_piecewise(std::span<const double> cpts, const LocalBasis& basis) {
  if (cpts.size() != basis.size())
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(basis.size()) + " control points, got " +
                                               std::to_string(cpts.size()));
  std::vector<std::vector<LocalTerm>> weighted(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    weighted[i].reserve(basis.table()[i].size());
    for (const LocalTerm& term : basis.table()[i]) weighted[i].push_back(term.scaled(cpts[i]));
  }
  const auto by_interval = full_reverse_diagonals(weighted);

  const int p = basis.degree();
  PiecewiseCurve curve{active_region(basis.knots()), {}, p, basis.family(), basis.knots().active_first()};
  curve.pieces.reserve(by_interval.size());
  for (const auto& row : by_interval) {
    LocalTerm sum = row.front();
    for (std::size_t c = 1; c < row.size(); ++c) sum += row[c];
    curve.pieces.push_back(std::move(sum));
  }
  return curve;
}

}  // namespace gbs
