#include "miranda/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "miranda/grid.hpp"

namespace miranda {

namespace {

double vec_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double vec_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Plain Gaussian elimination with partial pivoting; local on purpose so the
// oracle exercises no solver code path.
bool gauss_solve(std::vector<double> a, std::vector<double> b, std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[static_cast<std::size_t>(r) * n + col]) >
          std::abs(a[static_cast<std::size_t>(pivot) * n + col]))
        pivot = r;
    if (std::abs(a[static_cast<std::size_t>(pivot) * n + col]) < 1e-300) return false;
    if (pivot != col) {
      for (int c = 0; c < n; ++c)
        std::swap(a[static_cast<std::size_t>(col) * n + c],
                  a[static_cast<std::size_t>(pivot) * n + c]);
      std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(pivot)]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double factor =
          a[static_cast<std::size_t>(r) * n + col] / a[static_cast<std::size_t>(col) * n + col];
      for (int c = col; c < n; ++c)
        a[static_cast<std::size_t>(r) * n + c] -= factor * a[static_cast<std::size_t>(col) * n + c];
      b[static_cast<std::size_t>(r)] -= factor * b[static_cast<std::size_t>(col)];
    }
  }
  x.assign(static_cast<std::size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < n; ++c)
      s -= a[static_cast<std::size_t>(r) * n + c] * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r) * n + r];
    if (!std::isfinite(x[static_cast<std::size_t>(r)])) return false;
  }
  return true;
}

bool oracle_newton(const MapModel& map, std::span<const double> q, std::vector<double>& x,
                   double tol, int max_iters) {
  const int n = map.n_in();
  std::vector<double> r(static_cast<std::size_t>(n));
  std::vector<double> delta;
  std::vector<double> trial(static_cast<std::size_t>(n));

  auto residual_at = [&](const std::vector<double>& p, std::vector<double>& out) {
    map.eval_into(p, out);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] -= q[static_cast<std::size_t>(i)];
    return vec_norm(out);
  };

  double rn;
  try {
    rn = residual_at(x, r);
  } catch (const EvalError&) {
    return false;
  }
  for (int iter = 0; iter < max_iters; ++iter) {
    if (rn <= tol) return true;
    std::vector<double> jac;
    try {
      jac = map.jacobian(x);
    } catch (const EvalError&) {
      return false;
    }
    if (!gauss_solve(jac, r, delta)) return false;
    double scale = 1.0;
    bool accepted = false;
    std::vector<double> r_trial(static_cast<std::size_t>(n));
    for (int halving = 0; halving < 10; ++halving) {
      for (int i = 0; i < n; ++i)
        trial[static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i)] - scale * delta[static_cast<std::size_t>(i)];
      double rt;
      try {
        rt = residual_at(trial, r_trial);
      } catch (const EvalError&) {
        scale *= 0.5;
        continue;
      }
      if (rt < rn || rt <= tol) {
        x = trial;
        r = r_trial;
        rn = rt;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) return false;
  }
  return rn <= tol;
}

}  // namespace

OracleResult count_zeros_grid(const MapModel& map, const Cuboid& box,
                              std::span<const double> q, int grid_per_axis) {
  const int n = box.n();
  if (n > 4) throw std::invalid_argument("count_zeros_grid: guarded to n <= 4");
  // Grids below 8 per axis are accepted for degraded-oracle experiments, but
  // counts are only trusted at 8 and above.
  if (grid_per_axis < 2)
    throw std::invalid_argument("count_zeros_grid: grid_per_axis must be >= 2");
  if (map.n_in() != n || map.n_out() != n)
    throw std::invalid_argument("count_zeros_grid: dimension mismatch");

  // Same scale convention as the solver so counts are comparable.
  double scale = 0.0;
  {
    std::vector<double> out(static_cast<std::size_t>(n));
    map.eval_into(box.lower, out);
    scale = std::max(scale, vec_norm(out));
    map.eval_into(box.upper, out);
    scale = std::max(scale, vec_norm(out));
  }
  const double zero_tol = 1e-9 * (1.0 + scale);

  OracleResult result;
  result.grid_per_axis = grid_per_axis;
  result.dedup_radius = 1e-6 * box.diameter();

  std::vector<int> counts(static_cast<std::size_t>(n), grid_per_axis);
  std::vector<double> node(static_cast<std::size_t>(n));
  for_each_multi_index(counts, [&](const std::vector<int>& idx) {
    for (int i = 0; i < n; ++i)
      node[static_cast<std::size_t>(i)] =
          grid_node(box.lower[static_cast<std::size_t>(i)], box.upper[static_cast<std::size_t>(i)],
                    grid_per_axis, idx[static_cast<std::size_t>(i)]);
    ++result.basins_explored;
    std::vector<double> x = node;
    if (!oracle_newton(map, q, x, zero_tol, 60)) return;
    if (!box.contains(x, 0.0)) return;
    for (const auto& z : result.zeros)
      if (vec_dist(z, x) <= result.dedup_radius) return;
    result.zeros.push_back(std::move(x));
  });

  std::sort(result.zeros.begin(), result.zeros.end(),
            [](const std::vector<double>& a, const std::vector<double>& b) {
              return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
            });
  return result;
}

std::vector<std::pair<double, double>> scan_1d(const MapModel& map, const Cuboid& interval,
                                               double q, int cells) {
  if (cells < 2) throw std::invalid_argument("scan_1d: need at least 2 cells");
  if (map.n_in() != 1 || map.n_out() != 1 || interval.n() != 1)
    throw std::invalid_argument("scan_1d: one-dimensional inputs required");

  const double a = interval.lower[0];
  const double b = interval.upper[0];

  auto value_at = [&](double x) {
    std::vector<double> out(1);
    map.eval_into(std::vector<double>{x}, out);
    return out[0] - q;
  };

  // Deterministic jitter retry when a node hits the target exactly.
  auto scan = [&](double offset, std::vector<std::pair<double, double>>& brackets) {
    brackets.clear();
    double prev_x = a;
    double prev_v = value_at(a);
    if (prev_v == 0.0) return false;
    for (int k = 1; k <= cells; ++k) {
      double x = a + (b - a) * ((static_cast<double>(k) + (k == cells ? 0.0 : offset)) /
                                static_cast<double>(cells));
      const double v = value_at(x);
      if (v == 0.0 && k != cells) return false;
      if ((prev_v > 0.0) != (v > 0.0)) brackets.emplace_back(prev_x, x);
      prev_x = x;
      prev_v = v;
    }
    return true;
  };

  std::vector<std::pair<double, double>> brackets;
  if (!scan(0.0, brackets) && !scan(0.3819660112501051, brackets))
    throw EvalError("scan_1d: grid node evaluates exactly to the target after jitter");
  return brackets;
}

}  // namespace miranda
