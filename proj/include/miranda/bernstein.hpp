#pragma once

#include <vector>

#include "miranda/geometry.hpp"
#include "miranda/map_model.hpp"

namespace miranda {

// Tensor-product Bernstein approximation: the smooth-approximant step of the
// continuous-map pipeline. Coefficients are the source values on the regular
// Bernstein grid of the cuboid, so the operator reproduces affine maps exactly
// and interpolates the source at cuboid vertices.

struct BernsteinBuild {
  MapModel approximant;
  double measured_sup_error = 0.0;  // max over the dense sample grid
  int error_samples_per_axis = 0;
};

// Builds the degree-`degree` (per axis) approximant and measures the sup error
// against the source on a dense grid (default 101 nodes per axis for n <= 2,
// 21 for n >= 3).
BernsteinBuild bernstein_approximate(const MapModel& source, const Cuboid& box, int degree,
                                     int error_samples_per_axis = 0);

struct SmoothingRequest {
  MapModel source;
  int degree = 16;    // per axis
  double eta = 0.0;   // sup-norm budget; measured error must stay below eta / 2
};

// Enforces the budget and requires the approximant to keep the boundary
// condition whenever the source passes it. Throws SolveError on violation.
MapModel bernstein_smooth(const SmoothingRequest& request, const Cuboid& box,
                          double* measured_error = nullptr);

}  // namespace miranda
