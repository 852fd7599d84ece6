#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gbspline/error.hpp"

namespace gbs {

/// Nondecreasing knot sequence paired with a spline degree.
///
/// Knot vectors built through `open()` have p+1 equal knots at each end.
/// `general()` only checks ordering and length; it exists for end-condition
/// changes where the target basis carries non-repeated end knots.
class KnotVector {
 public:
  static KnotVector open(std::vector<double> knots, int degree) {
    KnotVector kv = general(std::move(knots), degree);
    const std::size_t m = kv.knots_.size();
    const auto p = static_cast<std::size_t>(degree);
    for (std::size_t i = 1; i <= p; ++i) {
      if (kv.knots_[i] != kv.knots_[0] || kv.knots_[m - 1 - i] != kv.knots_[m - 1])
        throw Error(ErrorCode::NotOpen,
                    "first and last knots must have multiplicity " + std::to_string(p + 1));
    }
    return kv;
  }

  static KnotVector general(std::vector<double> knots, int degree) {
    if (degree < 0) throw Error(ErrorCode::TooShort, "negative degree");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      if (!(knots[i] <= knots[i + 1]))
        throw Error(ErrorCode::NotNondecreasing,
                    "knot " + std::to_string(i + 1) + " is smaller than its predecessor");
    }
    if (knots.size() < 2 * static_cast<std::size_t>(degree) + 2)
      throw Error(ErrorCode::TooShort, "need at least 2p+2 knots, got " + std::to_string(knots.size()));
    KnotVector kv;
    kv.knots_ = std::move(knots);
    kv.degree_ = degree;
    return kv;
  }

  std::span<const double> knots() const { return knots_; }
  double operator[](std::size_t i) const { return knots_[i]; }
  std::size_t size() const { return knots_.size(); }
  int degree() const { return degree_; }

  /// Number of basis functions, m - p - 1.
  std::size_t basis_count() const { return knots_.size() - static_cast<std::size_t>(degree_) - 1; }

  /// Knot index of the left end of the active region (t_p).
  std::size_t active_first() const { return static_cast<std::size_t>(degree_); }
  /// Knot index of the right end of the active region (t_{m-p-1}).
  std::size_t active_last() const { return basis_count(); }

  double active_begin() const { return knots_[active_first()]; }
  double active_end() const { return knots_[active_last()]; }

  bool is_open() const {
    const std::size_t m = knots_.size();
    for (std::size_t i = 1; i <= static_cast<std::size_t>(degree_); ++i)
      if (knots_[i] != knots_[0] || knots_[m - 1 - i] != knots_[m - 1]) return false;
    return true;
  }

  /// Number of knots equal to `value` (exact comparison).
  std::size_t multiplicity(double value) const {
    std::size_t count = 0;
    for (double k : knots_) count += (k == value);
    return count;
  }

 private:
  KnotVector() = default;

  std::vector<double> knots_;
  int degree_ = 0;
};

inline KnotVector validate_open_knot_vector(std::span<const double> knots, int degree) {
  return KnotVector::open(std::vector<double>(knots.begin(), knots.end()), degree);
}

/// Breakpoints t_p .. t_{m-p-1}, interior repeats retained.
inline std::vector<double> active_region(const KnotVector& kv) {
  auto all = kv.knots();
  return {all.begin() + static_cast<std::ptrdiff_t>(kv.active_first()),
          all.begin() + static_cast<std::ptrdiff_t>(kv.active_last()) + 1};
}

}  // namespace gbs
