#pragma once

#include <span>
#include <vector>

#include "miranda/map_model.hpp"

namespace miranda {

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

// Damped Newton for a square system f(x) = target: full steps, halved on
// residual increase. Stops at ||f(x) - target|| <= tol. Evaluation errors and
// singular Jacobians end the iteration without converging.
NewtonResult newton_solve(const MapModel& map, std::span<const double> target,
                          std::vector<double>& x, double tol, int max_iters = 50);

}  // namespace miranda
