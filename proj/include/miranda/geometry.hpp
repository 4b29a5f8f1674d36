#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "miranda/map_model.hpp"

namespace miranda {

// Axis-aligned box \prod [lower_i, upper_i] with strictly positive extents.
struct Cuboid {
  std::vector<double> lower;
  std::vector<double> upper;

  Cuboid() = default;
  Cuboid(std::vector<double> lo, std::vector<double> hi);

  static Cuboid symmetric(int n, double half_width = 1.0);

  int n() const { return static_cast<int>(lower.size()); }
  double extent(int axis) const { return upper[axis] - lower[axis]; }
  double diameter() const;  // Euclidean length of the main diagonal
  bool contains(std::span<const double> x, double tol = 0.0) const;
  // Smallest distance from x to any face plane (negative when outside).
  double face_distance(std::span<const double> x) const;
  Cuboid without_axis(int axis) const;
};

enum class FaceSide { Lower, Upper };

// One of the 2n faces; the slice bounds drop the fixed axis.
struct Face {
  int axis = 0;
  FaceSide side = FaceSide::Lower;
  double value = 0.0;
  Cuboid slice;  // (n-1)-dimensional; empty bounds when n == 1

  // Insert the fixed coordinate into an (n-1)-dimensional slice point.
  std::vector<double> embed(std::span<const double> y) const;
};

std::vector<Face> faces(const Cuboid& box);
Face face_of(const Cuboid& box, int axis, FaceSide side);

// Sign of f_i on the lower face of axis i under a Pass verdict.
enum class AxisOrientation { NegativeLower, PositiveLower };

struct AxisVerdict {
  bool pass = false;
  AxisOrientation orientation = AxisOrientation::NegativeLower;
  double min_abs_lower = 0.0;  // min |f_i| over the sampled lower face
  double min_abs_upper = 0.0;
  // Witness pair with f_i(lower point) * f_i(upper point) >= 0, set on failure.
  std::vector<double> witness_lower;
  std::vector<double> witness_upper;
  double witness_value_lower = 0.0;
  double witness_value_upper = 0.0;
};

struct BoundaryReport {
  int samples_per_axis = 0;
  std::vector<AxisVerdict> axes;
  double map_scale = 0.0;  // max |f_i| seen over all face samples

  bool pass() const;
  std::string summary() const;
};

// Samples a uniform grid on every face and demands a strict uniform sign of
// f_i on each face of axis i, with opposite signs across the pair. Either
// orientation is accepted per axis.
BoundaryReport check_miranda(const MapModel& map, const Cuboid& box,
                             int samples_per_axis = 33);

// Raw sampled minima of |f_i| per face pair, on the same grid as check_miranda.
// The 0.9 safety shrink is applied later, by the regular-value proposal.
struct FaceMargins {
  std::vector<std::pair<double, double>> per_axis;  // (lower face, upper face)

  double min_for_axis(int axis) const {
    return std::min(per_axis[static_cast<std::size_t>(axis)].first,
                    per_axis[static_cast<std::size_t>(axis)].second);
  }
};

// Pre: check_miranda passed. Throws SolveError(MarginFloor) when a face
// contains an approximate zero of its component.
FaceMargins face_margins(const MapModel& map, const Cuboid& box,
                         int samples_per_axis = 33);

// Shared by check/margins/outwardness: visits every node of the face grid.
void for_each_face_sample(const Face& face, int samples_per_axis,
                          const std::function<void(std::span<const double>)>& fn);

}  // namespace miranda
