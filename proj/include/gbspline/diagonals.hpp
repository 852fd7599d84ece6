#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gbspline/error.hpp"

namespace gbs {

/// Rows of full-width anti-diagonals: out[k] = {a[k][n-1], a[k+1][n-2], ...,
/// a[k+n-1][0]} for an r x n input with r >= n, giving r - n + 1 rows.
///
/// Applied to a basis-major table (basis function, slot within support) this
/// yields an interval-major table (interval, nonzero basis function).
template <class T>
std::vector<std::vector<T>> full_reverse_diagonals(const std::vector<std::vector<T>>& a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a.front().size() : 0;
  if (rows < cols || cols == 0)
    throw Error(ErrorCode::TooFewRows, "need at least as many rows as columns (" + std::to_string(rows) + " < " +
                                           std::to_string(cols) + ")");
  std::vector<std::vector<T>> out(rows - cols + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) out[k].push_back(a[k + c][cols - 1 - c]);
  }
  return out;
}

/// Mean of the non-NaN entries on each anti-diagonal i + j = d.
///
/// Throws AllMissingDiagonal when a diagonal has no entries and
/// InconsistentCoefficient when an entry differs from its diagonal mean by
/// more than tol * max(1, |mean|).
inline std::vector<double> reverse_diagonal_averages(const std::vector<std::vector<double>>& coefs, double tol) {
  const std::size_t rows = coefs.size();
  const std::size_t cols = rows ? coefs.front().size() : 0;
  if (rows == 0 || cols == 0) return {};
  std::vector<double> out(rows + cols - 1);
  for (std::size_t d = 0; d < out.size(); ++d) {
    const std::size_t i0 = d >= cols - 1 ? d - (cols - 1) : 0;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = i0; i < rows && i <= d; ++i) {
      const double x = coefs[i][d - i];
      if (std::isnan(x)) continue;
      sum += x;
      ++count;
    }
    if (count == 0) throw Error(ErrorCode::AllMissingDiagonal, "diagonal " + std::to_string(d) + " has no values");
    const double mean = sum / static_cast<double>(count);
    const double limit = tol * std::max(1.0, std::abs(mean));
    for (std::size_t i = i0; i < rows && i <= d; ++i) {
      const double x = coefs[i][d - i];
      if (!std::isnan(x) && std::abs(x - mean) > limit)
        throw Error(ErrorCode::InconsistentCoefficient,
                    "diagonal " + std::to_string(d) + ": value " + std::to_string(x) + " deviates from mean " +
                        std::to_string(mean));
    }
    out[d] = mean;
  }
  return out;
}

}  // namespace gbs
