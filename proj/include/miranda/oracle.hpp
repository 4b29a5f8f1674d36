#pragma once

#include <span>
#include <utility>
#include <vector>

#include "miranda/geometry.hpp"
#include "miranda/map_model.hpp"

namespace miranda {

// Brute-force zero counter used to validate solver output at desk scale.
// Deliberately shares nothing with the solver beyond map evaluation: it runs
// its own Newton iteration on its own Gaussian elimination.

struct OracleResult {
  std::vector<std::vector<double>> zeros;
  int grid_per_axis = 0;
  std::size_t basins_explored = 0;
  double dedup_radius = 0.0;
};

// Damped Newton from every node of a grid_per_axis^n lattice; converged
// interior points with residual <= zero_tol are collected and deduplicated.
// Guarded to n <= 4.
OracleResult count_zeros_grid(const MapModel& map, const Cuboid& box,
                              std::span<const double> q, int grid_per_axis);

// All sign-change cells of f - q on a uniform partition of the interval.
std::vector<std::pair<double, double>> scan_1d(const MapModel& map, const Cuboid& interval,
                                               double q, int cells);

}  // namespace miranda
