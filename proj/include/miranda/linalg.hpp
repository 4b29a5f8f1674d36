#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace miranda {

// Small dense helpers used by the corrector, audit and polish steps. Matrices
// are row-major. Implemented on top of Eigen in linalg.cpp.

// Solve the square system A x = b. Returns false when A is singular to
// working precision (the caller treats that as a failed step).
bool solve_square(std::span<const double> a, std::span<const double> b,
                  std::span<double> x);

double min_singular_value(std::span<const double> a, int rows, int cols);

// Unit kernel direction of a full-rank rows x (rows+1) matrix.
std::vector<double> kernel_direction(std::span<const double> a, int rows);

// Least-norm Gauss-Newton update for an underdetermined system:
// delta = J^T (J J^T)^{-1} r with J of shape rows x cols, rows < cols.
bool least_norm_step(std::span<const double> j, int rows, int cols,
                     std::span<const double> r, std::span<double> delta);

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double frobenius_norm(std::span<const double> a) { return norm2(a); }

}  // namespace miranda
