#pragma once

// Uniform-knot B-spline bases over a bounded core domain.
//
// A grid with G core intervals on [lo, hi] and degree k carries G + 2k + 1
// knots: the uniform core partition plus k knots continuing the same spacing
// past each end. That yields B = G + k basis functions, which form a partition
// of unity on [lo, hi].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kanids/error.hpp"

namespace kanids {

inline constexpr int kMaxSplineDegree = 15;
inline constexpr double kDomainTolerance = 1e-9;

struct SplineGrid {
  int degree = 0;
  int intervals = 1;
  double lo = -1.0;
  double hi = 1.0;
  std::vector<double> knots;

  std::size_t basis_count() const { return static_cast<std::size_t>(intervals + degree); }
  double spacing() const { return (hi - lo) / intervals; }

  bool operator==(const SplineGrid&) const = default;
};

inline SplineGrid build_grid(int degree, int intervals, double lo, double hi) {
  if (degree < 0 || degree > kMaxSplineDegree)
    throw Error(ErrorKind::InvalidArgument, "spline degree must be in [0, " +
                                                std::to_string(kMaxSplineDegree) + "]");
  if (intervals < 1) throw Error(ErrorKind::InvalidArgument, "interval count must be positive");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw Error(ErrorKind::InvalidArgument, "spline domain must be a finite interval with lo < hi");

  SplineGrid grid{degree, intervals, lo, hi, {}};
  const double h = grid.spacing();
  const int count = intervals + 2 * degree + 1;
  grid.knots.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) grid.knots[static_cast<std::size_t>(i)] = lo + (i - degree) * h;
  // Pin the core endpoints exactly.
  grid.knots[static_cast<std::size_t>(degree)] = lo;
  grid.knots[static_cast<std::size_t>(degree + intervals)] = hi;
  return grid;
}

/// Nonzero basis values (and first derivatives) at one point: entries
/// [0, degree] belong to basis functions first .. first + degree.
struct LocalBasis {
  std::size_t first = 0;
  std::array<double, kMaxSplineDegree + 1> values{};
  std::array<double, kMaxSplineDegree + 1> derivs{};
};

/// Maps x into the grid domain, rejecting points further out than the tolerance.
inline double checked_domain_point(const SplineGrid& grid, double x) {
  if (!(x >= grid.lo - kDomainTolerance && x <= grid.hi + kDomainTolerance))
    throw Error(ErrorKind::DomainViolation, "x = " + std::to_string(x) + " outside [" +
                                                std::to_string(grid.lo) + ", " +
                                                std::to_string(grid.hi) + "]");
  return std::clamp(x, grid.lo, grid.hi);
}

inline std::size_t find_span(const SplineGrid& grid, double u) {
  const int k = grid.degree;
  const int last = k + grid.intervals - 1;
  int i = k + static_cast<int>(std::floor((u - grid.lo) / grid.spacing()));
  i = std::clamp(i, k, last);
  const auto& t = grid.knots;
  while (i > k && u < t[static_cast<std::size_t>(i)]) --i;
  while (i < last && u >= t[static_cast<std::size_t>(i + 1)]) ++i;
  return static_cast<std::size_t>(i);
}

/// Triangular Cox-de Boor evaluation of the degree + 1 nonzero bases at an
/// in-domain point u. Derivatives come from the degree - 1 table.
inline LocalBasis local_basis(const SplineGrid& grid, double u, bool with_derivs = true) {
  const int p = grid.degree;
  const std::size_t span = find_span(grid, u);
  const auto& t = grid.knots;

  LocalBasis out;
  out.first = span - static_cast<std::size_t>(p);
  auto& n = out.values;
  std::array<double, kMaxSplineDegree + 1> left{}, right{}, lower{};
  n[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    if (j == p && with_derivs) lower = n;
    left[j] = u - t[span + 1 - j];
    right[j] = t[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    n[j] = saved;
  }

  if (with_derivs && p > 0) {
    // B'_{j,p} = p/(t_{j+p} - t_j) B_{j,p-1} - p/(t_{j+p+1} - t_{j+1}) B_{j+1,p-1}
    for (int r = 0; r <= p; ++r) {
      const std::size_t j = out.first + static_cast<std::size_t>(r);
      const double a = r >= 1 ? lower[r - 1] : 0.0;
      const double b = r < p ? lower[r] : 0.0;
      out.derivs[r] = p * a / (t[j + p] - t[j]) - p * b / (t[j + p + 1] - t[j + 1]);
    }
  }
  return out;
}

inline std::vector<double> basis_values(const SplineGrid& grid, double x) {
  const double u = checked_domain_point(grid, x);
  const LocalBasis local = local_basis(grid, u, false);
  std::vector<double> out(grid.basis_count(), 0.0);
  for (int r = 0; r <= grid.degree; ++r) out[local.first + r] = local.values[r];
  return out;
}

inline std::vector<double> basis_derivatives(const SplineGrid& grid, double x) {
  const double u = checked_domain_point(grid, x);
  std::vector<double> out(grid.basis_count(), 0.0);
  if (grid.degree == 0) return out;
  const LocalBasis local = local_basis(grid, u, true);
  for (int r = 0; r <= grid.degree; ++r) out[local.first + r] = local.derivs[r];
  return out;
}

inline double spline_eval(const SplineGrid& grid, std::span<const double> coefficients, double x) {
  if (coefficients.size() != grid.basis_count())
    throw Error(ErrorKind::LengthMismatch, "expected " + std::to_string(grid.basis_count()) +
                                               " coefficients, got " +
                                               std::to_string(coefficients.size()));
  const double u = checked_domain_point(grid, x);
  const LocalBasis local = local_basis(grid, u, false);
  double sum = 0.0;
  for (int r = 0; r <= grid.degree; ++r) sum += coefficients[local.first + r] * local.values[r];
  return sum;
}

}  // namespace kanids
