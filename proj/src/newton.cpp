#include "miranda/newton.hpp"

#include <cmath>

#include "miranda/linalg.hpp"

namespace miranda {

NewtonResult newton_solve(const MapModel& map, std::span<const double> target,
                          std::vector<double>& x, double tol, int max_iters) {
  const int n = map.n_in();
  NewtonResult result;
  std::vector<double> r(static_cast<std::size_t>(n));
  std::vector<double> delta(static_cast<std::size_t>(n));
  std::vector<double> trial(static_cast<std::size_t>(n));

  auto residual_at = [&](const std::vector<double>& p, std::vector<double>& out) {
    map.eval_into(p, out);
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] -= target[static_cast<std::size_t>(i)];
    return norm2(out);
  };

  double rn;
  try {
    rn = residual_at(x, r);
  } catch (const EvalError&) {
    return result;
  }

  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter;
    result.residual = rn;
    if (rn <= tol) {
      result.converged = true;
      return result;
    }
    ++work_counters().newton_iterations;

    std::vector<double> jac;
    try {
      jac = map.jacobian(x);
    } catch (const EvalError&) {
      return result;
    }
    if (!solve_square(jac, r, delta)) return result;

    double scale = 1.0;
    bool accepted = false;
    std::vector<double> r_trial(static_cast<std::size_t>(n));
    for (int halving = 0; halving < 10; ++halving) {
      for (int i = 0; i < n; ++i)
        trial[static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i)] - scale * delta[static_cast<std::size_t>(i)];
      double rn_trial;
      try {
        rn_trial = residual_at(trial, r_trial);
      } catch (const EvalError&) {
        scale *= 0.5;
        continue;
      }
      if (rn_trial < rn || rn_trial <= tol) {
        x = trial;
        r = r_trial;
        rn = rn_trial;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      result.residual = rn;
      return result;
    }
  }
  result.residual = rn;
  result.converged = rn <= tol;
  return result;
}

}  // namespace miranda
