#pragma once

#include <string>
#include <vector>

#include "miranda/map_model.hpp"

namespace miranda {

// Named test corpus. Dimension n is honored where a map generalizes
// (identity, scaled_identity, separable_cubic); fixed-dimension entries throw
// on a mismatch:
//   identity         x -> x                                       (any n)
//   scaled_identity  x -> 2x                                      (any n)
//   cubic2d          (x1^3 - 0.25 x1 + 0.1 x2, x2)                (n = 2)
//   separable_cubic  f_i = x_i (x_i^2 - 0.25), 3^n zeros          (any n)
//   nonsmooth_abs    (x1 + 0.3 |x2| - 0.15, x2), continuous only  (n = 2)
//   loop2d           (x1 ((x1-0.3)^2 + x2^2 - 0.04), x2); the f1 level set
//                    near 0 is a segment plus a loop              (n = 2)
//   tanh_steep       (tanh(10 x1), x2)                            (n = 2)
MapModel builtin(const std::string& name, int n = 0);

std::vector<std::string> builtin_names();

}  // namespace miranda
