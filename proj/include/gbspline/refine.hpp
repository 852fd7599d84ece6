#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbspline/diagonals.hpp"
#include "gbspline/error.hpp"
#include "gbspline/knot_functions.hpp"
#include "gbspline/knot_vector.hpp"
#include "gbspline/local_basis.hpp"
#include "gbspline/poly.hpp"

namespace gbs {

struct RefineOptions {
  double tol = kDefaultTol;           // zero-length interval threshold
  double coef_tol = kDefaultCoefTol;  // coefficient / Taylor agreement
};

struct RefineReport {
  /// Largest reciprocal condition estimate over the local systems.
  double worst_condition = 0.0;
  bool ill_conditioned() const { return worst_condition > 1e12; }
};

using GenCoef = std::array<double, 2>;

/// Source local representation re-indexed by the intervals of reg1.
struct LocalPieces {
  std::vector<double> breaks;
  std::vector<PolyTerm> polys;
  std::vector<GenCoef> genfunc;
  std::vector<double> lengths;
  std::vector<bool> pos;
};

/// Subdivides the polynomial parts of `curve0` onto the intervals of reg1 and
/// copies each general-function row from the source interval containing it.
inline LocalPieces refine_local(const PiecewiseCurve& curve0, std::span<const double> reg1, double tol = kDefaultTol) {
  const std::size_t n1 = reg1.size() - 1;
  std::size_t poly_len = 0;
  for (const auto& piece : curve0.pieces)
    if (!piece.is_missing()) poly_len = std::max(poly_len, piece.poly.coeffs.size());

  LocalPieces out;
  out.breaks.assign(reg1.begin(), reg1.end());
  out.polys.assign(n1, PolyTerm{std::vector<double>(poly_len, 0.0), 0.0});
  out.genfunc.assign(n1, GenCoef{0.0, 0.0});
  out.lengths.resize(n1);
  out.pos.resize(n1);

  const auto& reg0 = curve0.breaks;
  std::size_t k = 0;
  for (std::size_t j = 0; j < n1; ++j) {
    const double a = reg1[j];
    const double b = reg1[j + 1];
    out.lengths[j] = b - a;
    out.pos[j] = b - a > tol;
    out.polys[j].length = b - a;
    if (!out.pos[j]) continue;
    while (k < curve0.pieces.size() && (curve0.pieces[k].is_missing() || reg0[k + 1] <= a + tol)) ++k;
    if (k == curve0.pieces.size() || a < reg0[k] - tol || b > reg0[k + 1] + tol)
      throw Error(ErrorCode::IntervalStraddle, "target interval " + std::to_string(j) +
                                                   " is not contained in a single source interval");
    const LocalTerm& src = curve0.pieces[k];
    const double targets[2] = {a, b};
    PolyTerm piece = restrict_poly(src.poly, reg0[k], reg0[k + 1], targets, tol).front();
    piece.coeffs.resize(poly_len, 0.0);
    out.polys[j] = std::move(piece);
    out.genfunc[j] = {src.a, src.b};
  }
  return out;
}

struct KnotFuncRepresentation {
  std::vector<GenCoef> genfunc;
  std::vector<PolyTerm> offset;
};

/// Rewrites the general-function part of each reg1 piece in the target knot
/// functions, returning new coefficients plus polynomial compensation terms.
///
/// rints0 holds orders 0..q-1 of the (q-p)-th derivatives of the source
/// generators, rints1 orders 0..q-1 of the target generators. `excess`, when
/// given, adds polynomial parts of degree above q-2 that must be absorbed
/// into the general-function terms as well.
inline KnotFuncRepresentation represent_knot_funcs(std::span<const GenCoef> genfunc0, const IntegralTable& rints0,
                                                   const IntegralTable& rints1, std::span<const double> lengths,
                                                   const std::vector<bool>& pos, const RefineOptions& opts = {},
                                                   std::span<const PolyTerm> excess = {}) {
  const std::size_t q = rints1.orders();
  const std::size_t n = genfunc0.size();
  if (rints0.orders() != q || q < 2)
    throw Error(ErrorCode::InvalidPlan, "integral tables must carry matching orders 0..q-1 with q >= 2");
  KnotFuncRepresentation out{std::vector<GenCoef>(n, GenCoef{0.0, 0.0}),
                             std::vector<PolyTerm>(n, PolyTerm{std::vector<double>(q - 1, 0.0), 0.0})};

  std::vector<std::array<double, 2>> ivals(q);
  for (std::size_t j = 0; j < n; ++j) {
    const double h = lengths[j];
    out.offset[j].length = h;
    if (!pos[j]) continue;

    // ivals[k][e]: derivative of order q-1-k of the source general term.
    for (std::size_t k = 0; k < q; ++k)
      for (int e = 0; e < 2; ++e)
        ivals[k][static_cast<std::size_t>(e)] = genfunc0[j][0] * rints0.at(k, j, e, Generator::u) +
                                                genfunc0[j][1] * rints0.at(k, j, e, Generator::v);
    if (!excess.empty() && !excess[j].coeffs.empty()) {
      const auto left = poly_derivatives(excess[j].coeffs, 0.0, q);
      const auto right = poly_derivatives(excess[j].coeffs, h, q);
      for (std::size_t k = 0; k < q; ++k) {
        ivals[k][0] += left[q - 1 - k];
        ivals[k][1] += right[q - 1 - k];
      }
    }

    // Order q-1 derivative lies in span{u~, v~}: match it at both endpoints.
    const double m00 = rints1.at(0, j, kLeft, Generator::u), m01 = rints1.at(0, j, kLeft, Generator::v);
    const double m10 = rints1.at(0, j, kRight, Generator::u), m11 = rints1.at(0, j, kRight, Generator::v);
    const double det = m00 * m11 - m01 * m10;
    const double scale = std::max({std::abs(m00), std::abs(m01), std::abs(m10), std::abs(m11)});
    if (!(std::abs(det) > 1e-14 * scale * scale))
      throw Error(ErrorCode::SingularGeneratorSystem,
                  "target knot functions are dependent on interval " + std::to_string(j));
    const double a = (ivals[0][0] * m11 - m01 * ivals[0][1]) / det;
    const double b = (m00 * ivals[0][1] - ivals[0][0] * m10) / det;
    out.genfunc[j] = {a, b};

    // Remaining derivative orders q-2..0 belong to a polynomial of degree q-2.
    std::vector<double> left(q - 1), right(q - 1);
    for (std::size_t k = 1; k < q; ++k) {
      const std::size_t order = q - 1 - k;
      for (int e = 0; e < 2; ++e) {
        const double nint = a * rints1.at(k, j, e, Generator::u) + b * rints1.at(k, j, e, Generator::v);
        (e == kLeft ? left : right)[order] = ivals[k][static_cast<std::size_t>(e)] - nint;
      }
    }
    const PolyTerm from_left = left_taylor_series(left, h);
    const PolyTerm from_right = right_taylor_series(right, h);

    double diff = 0.0, size = 0.0, hk = 1.0;
    for (std::size_t k = 0; k + 1 < q; ++k) {
      diff += std::abs(from_left.coeffs[k] - from_right.coeffs[k]) * hk;
      size += std::max(std::abs(from_left.coeffs[k]), std::abs(from_right.coeffs[k])) * hk;
      hk *= h;
    }
    if (diff > opts.coef_tol * std::max(1.0, size))
      throw Error(ErrorCode::TaylorMismatch, "left/right polynomial reconstructions disagree on interval " +
                                                 std::to_string(j) + " (difference " + std::to_string(diff) + ")");
    for (std::size_t k = 0; k + 1 < q; ++k)
      out.offset[j].coeffs[k] = 0.5 * (from_left.coeffs[k] + from_right.coeffs[k]);
  }
  return out;
}

/// Control points over the target basis for a piecewise curve over the same
/// active region. The curve must lie in the span of `basis1`.
inline std::vector<double> refine_curve(const PiecewiseCurve& curve0, const LocalBasis& basis1,
                                        const IntegralTable& rints0, const IntegralTable& rints1,
                                        const RefineOptions& opts = {}, RefineReport* report = nullptr) {
  const int q = basis1.degree();
  if (q < 2) throw Error(ErrorCode::DegreeTooSmall, "refinement targets need degree >= 2");
  const auto uq = static_cast<std::size_t>(q);
  const std::vector<double> reg1 = active_region(basis1.knots());
  if (std::abs(reg1.front() - curve0.breaks.front()) > opts.tol ||
      std::abs(reg1.back() - curve0.breaks.back()) > opts.tol)
    throw Error(ErrorCode::InvalidPlan, "source and target active regions differ");

  LocalPieces lp = refine_local(curve0, reg1, opts.tol);
  const std::size_t n1 = lp.polys.size();

  // Polynomial parts above degree q-2 are handed to represent_knot_funcs.
  std::vector<PolyTerm> excess;
  for (std::size_t j = 0; j < n1; ++j) {
    auto& c = lp.polys[j].coeffs;
    if (c.size() > uq - 1) {
      PolyTerm high{std::vector<double>(c.size(), 0.0), lp.polys[j].length};
      bool any = false;
      for (std::size_t k = uq - 1; k < c.size(); ++k) {
        high.coeffs[k] = c[k];
        any = any || c[k] != 0.0;
      }
      c.resize(uq - 1);
      if (any) {
        excess.resize(n1);
        excess[j] = std::move(high);
      }
    }
  }
  lp.polys = elevate_polys(std::move(lp.polys), q - 2);

  const KnotFuncRepresentation rep =
      represent_knot_funcs(lp.genfunc, rints0, rints1, lp.lengths, lp.pos, opts, excess);
  for (std::size_t j = 0; j < n1; ++j)
    for (std::size_t k = 0; k + 1 < uq; ++k) lp.polys[j].coeffs[k] += rep.offset[j].coeffs[k];

  const auto lbases = full_reverse_diagonals(basis1.table());
  if (lbases.size() != n1) throw Error(ErrorCode::InvalidPlan, "target basis does not match reg1");

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> coefs(n1, std::vector<double>(uq + 1, nan));
  Eigen::MatrixXd system(uq + 1, uq + 1);
  Eigen::VectorXd rhs(uq + 1);
  for (std::size_t j = 0; j < n1; ++j) {
    if (!lp.pos[j]) continue;
    for (std::size_t r = 0; r <= uq; ++r) {
      const LocalTerm& t = lbases[j][r];
      if (t.is_missing())
        throw Error(ErrorCode::InvalidPlan, "target basis has no local term on interval " + std::to_string(j));
      for (std::size_t k = 0; k + 1 < uq; ++k) system(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = t.poly.coeffs[k];
      system(static_cast<Eigen::Index>(uq - 1), static_cast<Eigen::Index>(r)) = t.a;
      system(static_cast<Eigen::Index>(uq), static_cast<Eigen::Index>(r)) = t.b;
    }
    for (std::size_t k = 0; k + 1 < uq; ++k) rhs(static_cast<Eigen::Index>(k)) = lp.polys[j].coeffs[k];
    rhs(static_cast<Eigen::Index>(uq - 1)) = rep.genfunc[j][0];
    rhs(static_cast<Eigen::Index>(uq)) = rep.genfunc[j][1];

    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible())
      throw Error(ErrorCode::SingularLocalSystem, "local basis is dependent on interval " + std::to_string(j));
    if (report) report->worst_condition = std::max(report->worst_condition, 1.0 / lu.rcond());
    const Eigen::VectorXd c = lu.solve(rhs);
    for (std::size_t r = 0; r <= uq; ++r) coefs[j][r] = c(static_cast<Eigen::Index>(r));
  }
  return reverse_diagonal_averages(coefs, opts.coef_tol);
}

/// Knot functions over `target` inherited from `source`: every nonempty
/// target interval takes the kind and frequency of the source interval that
/// contains it (or the nearest one, outside the source range).
inline KnotFunctionFamily inherit_family(const KnotFunctionFamily& source, const KnotVector& target,
                                         double tol = kDefaultTol) {
  const auto specs = source.nonempty_specs();
  if (specs.empty()) throw Error(ErrorCode::InvalidFamily, "source family has no knot functions");
  std::vector<std::optional<KnotFunctionSpec>> per(target.size() - 1);
  for (std::size_t j = 0; j + 1 < target.size(); ++j) {
    if (target[j + 1] - target[j] <= tol) continue;
    const double mid = 0.5 * (target[j] + target[j + 1]);
    if (auto src = source.locate(mid))
      per[j] = source.spec(*src);
    else
      per[j] = mid < source.knots().front() ? specs.front() : specs.back();
  }
  return KnotFunctionFamily({target.knots().begin(), target.knots().end()}, std::move(per), tol);
}

/// Precomputed projection from one GB-spline basis onto another with the same
/// active region. Reusable for every component of a multi-dimensional curve.
class RefinementPlan {
 public:
  RefinementPlan(LocalBasis source, const KnotVector& target_kv, const KnotFunctionFamily& target_fam,
                 RefineOptions opts = {})
      : source_(std::move(source)), target_(build_local_basis(target_kv, target_fam)), opts_(opts) {
    const int p = source_.degree();
    const int q = target_.degree();
    if (p < 2) throw Error(ErrorCode::DegreeTooSmall, "refinement needs source degree >= 2");
    if (q < p) throw Error(ErrorCode::InvalidPlan, "target degree is lower than source degree");
    const KnotVector& kv0 = source_.knots();
    if (std::abs(kv0.active_begin() - target_kv.active_begin()) > opts_.tol ||
        std::abs(kv0.active_end() - target_kv.active_end()) > opts_.tol)
      throw Error(ErrorCode::InvalidPlan, "source and target active regions differ");
    const std::vector<double> reg1 = active_region(target_kv);
    rints0_ = build_integral_table(source_.family(), reg1, q - p, q - 1, opts_.tol);
    rints1_ = build_integral_table(target_fam, reg1, 0, q - 1, opts_.tol);
  }

  const LocalBasis& source() const { return source_; }
  const LocalBasis& target() const { return target_; }
  const IntegralTable& rints0() const { return rints0_; }
  const IntegralTable& rints1() const { return rints1_; }
  const RefineOptions& options() const { return opts_; }

  std::vector<double> apply(std::span<const double> cpts, RefineReport* report = nullptr) const {
    return refine_curve(form_piecewise(cpts, source_), target_, rints0_, rints1_, opts_, report);
  }

 private:
  LocalBasis source_;
  LocalBasis target_;
  IntegralTable rints0_;
  IntegralTable rints1_;
  RefineOptions opts_;
};

inline KnotVector rebuild_like(const KnotVector& original, std::vector<double> knots, int degree) {
  return original.is_open() ? KnotVector::open(std::move(knots), degree)
                            : KnotVector::general(std::move(knots), degree);
}

/// `kv` with `new_knots` merged in. Each new knot must be strictly inside the
/// active region and no knot may exceed multiplicity p+1.
inline KnotVector inserted_knot_vector(const KnotVector& kv, std::span<const double> new_knots) {
  std::vector<double> knots(kv.knots().begin(), kv.knots().end());
  for (double x : new_knots) {
    if (!(x > kv.active_begin() && x < kv.active_end()))
      throw Error(ErrorCode::KnotOutsideActiveRegion, "knot " + std::to_string(x) + " is not inside the active region");
    knots.insert(std::upper_bound(knots.begin(), knots.end(), x), x);
  }
  const auto cap = static_cast<std::size_t>(kv.degree()) + 1;
  for (double x : new_knots)
    if (static_cast<std::size_t>(std::count(knots.begin(), knots.end(), x)) > cap)
      throw Error(ErrorCode::MultiplicityOverflow, "knot " + std::to_string(x) + " would exceed multiplicity " +
                                                       std::to_string(cap));
  return rebuild_like(kv, std::move(knots), kv.degree());
}

/// Knot vector for elevation by r: every distinct interior active knot and
/// both end knots gain r extra copies.
inline KnotVector elevated_knot_vector(const KnotVector& kv, int r) {
  if (r < 1) throw Error(ErrorCode::InvalidPlan, "elevation amount must be at least 1");
  const auto ur = static_cast<std::size_t>(r);
  std::vector<double> knots(ur, kv[0]);
  const double lo = kv.active_begin();
  const double hi = kv.active_end();
  for (std::size_t i = 0; i < kv.size(); ++i) {
    knots.push_back(kv[i]);
    const bool interior = kv[i] > lo && kv[i] < hi;
    const bool last_copy = i + 1 == kv.size() || kv[i + 1] != kv[i];
    if (interior && last_copy) knots.insert(knots.end(), ur, kv[i]);
  }
  knots.insert(knots.end(), ur, kv[kv.size() - 1]);
  return rebuild_like(kv, std::move(knots), kv.degree() + r);
}

inline void require_derivative_closed(const KnotFunctionFamily& fam) {
  for (const auto& s : fam.nonempty_specs())
    if (s.kind == KnotFunctionKind::linear)
      throw Error(ErrorCode::FamilyNotClosedUnderDerivative,
                  "linear knot functions lose a dimension under differentiation");
}

/// Re-expresses `curve` over an arbitrary target knot vector with the same
/// active region (insertion, elevation, end-condition change, or any mix).
inline SplineCurve refine_to(const SplineCurve& curve, const LocalBasis& basis0, const KnotVector& target,
                             const RefineOptions& opts = {}, RefineReport* report = nullptr) {
  KnotFunctionFamily fam1 = inherit_family(curve.fam, target, opts.tol);
  if (target.degree() > curve.kv.degree()) require_derivative_closed(curve.fam);
  RefinementPlan plan(basis0, target, fam1, opts);
  return SplineCurve(target, std::move(fam1), plan.apply(curve.cpts, report));
}

inline SplineCurve insert_knots(const SplineCurve& curve, const LocalBasis& basis0, std::span<const double> new_knots,
                                const RefineOptions& opts = {}) {
  const KnotVector target = inserted_knot_vector(curve.kv, new_knots);
  if (new_knots.empty()) return curve;
  return refine_to(curve, basis0, target, opts);
}

inline SplineCurve elevate_degree(const SplineCurve& curve, const LocalBasis& basis0, int by,
                                  const RefineOptions& opts = {}) {
  require_derivative_closed(curve.fam);
  return refine_to(curve, basis0, elevated_knot_vector(curve.kv, by), opts);
}

/// End-condition change: same degree and active region, different end knots.
inline SplineCurve change_end_conditions(const SplineCurve& curve, const LocalBasis& basis0,
                                         const KnotVector& target, const RefineOptions& opts = {}) {
  if (target.degree() != curve.kv.degree())
    throw Error(ErrorCode::InvalidPlan, "end-condition change keeps the degree");
  return refine_to(curve, basis0, target, opts);
}

/// Coefficients of f(t) = t in `basis`.
inline std::vector<double> greville_abscissae(const LocalBasis& basis, const RefineOptions& opts = {}) {
  const std::vector<double> reg = active_region(basis.knots());
  const int p = basis.degree();
  PiecewiseCurve line{reg, {}, p, basis.family(), basis.knots().active_first()};
  for (std::size_t k = 0; k + 1 < reg.size(); ++k) {
    if (basis.family().has_functions(line.first_interval + k))
      line.pieces.push_back({{{reg[k], 1.0}, reg[k + 1] - reg[k]}, 0.0, 0.0});
    else
      line.pieces.push_back(LocalTerm::missing(2));
  }
  const IntegralTable rints = build_integral_table(basis.family(), reg, 0, p - 1, opts.tol);
  try {
    return refine_curve(line, basis, rints, rints, opts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TaylorMismatch)
      throw Error(ErrorCode::InconsistentCoefficient, std::string("f(t) = t is not in the span of the basis: ") +
                                                          e.what());
    throw;
  }
}

}  // namespace gbs
