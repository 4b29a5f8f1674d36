#include "miranda/linalg.hpp"

#include <Eigen/Dense>

namespace miranda {

namespace {

Eigen::MatrixXd to_matrix(std::span<const double> a, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = a[static_cast<std::size_t>(r) * cols + c];
  return m;
}

}  // namespace

bool solve_square(std::span<const double> a, std::span<const double> b,
                  std::span<double> x) {
  const int n = static_cast<int>(b.size());
  Eigen::MatrixXd m = to_matrix(a, n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) rhs(i) = b[i];

  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  // Rank decisions use a loose threshold; a nearly singular system is still
  // rejected by the caller's residual check if the solution is junk.
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) return false;
  Eigen::VectorXd sol = lu.solve(rhs);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(sol(i))) return false;
    x[i] = sol(i);
  }
  return true;
}

double min_singular_value(std::span<const double> a, int rows, int cols) {
  Eigen::MatrixXd m = to_matrix(a, rows, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0.0;
  return sv(sv.size() - 1);
}

std::vector<double> kernel_direction(std::span<const double> a, int rows) {
  const int cols = rows + 1;
  if (rows == 1) {
    const double nrm = std::sqrt(a[0] * a[0] + a[1] * a[1]);
    if (nrm == 0.0) return {0.0, 0.0};
    return {-a[1] / nrm, a[0] / nrm};
  }
  Eigen::MatrixXd m = to_matrix(a, rows, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  Eigen::VectorXd k = svd.matrixV().col(cols - 1);
  std::vector<double> out(static_cast<std::size_t>(cols));
  for (int i = 0; i < cols; ++i) out[static_cast<std::size_t>(i)] = k(i);
  return out;
}

bool least_norm_step(std::span<const double> j, int rows, int cols,
                     std::span<const double> r, std::span<double> delta) {
  Eigen::MatrixXd m = to_matrix(j, rows, cols);
  Eigen::VectorXd rhs(rows);
  for (int i = 0; i < rows; ++i) rhs(i) = r[i];

  Eigen::MatrixXd gram = m * m.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) return false;
  Eigen::VectorXd step = m.transpose() * lu.solve(rhs);
  for (int i = 0; i < cols; ++i) {
    if (!std::isfinite(step(i))) return false;
    delta[i] = step(i);
  }
  return true;
}

}  // namespace miranda
