#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "miranda/geometry.hpp"
#include "miranda/map_model.hpp"

namespace miranda {

// A connected component of the level set {x : fbar(x) = qbar}, where fbar drops
// the last coordinate map. A compact 1-manifold component is either a closed
// segment with both endpoints on the two faces of the last axis, or a loop.
enum class ComponentKind { SegmentConnecting, SegmentSameFace, Loop };

struct CurveComponent {
  std::vector<std::vector<double>> polyline;  // corrected points on the curve
  std::vector<std::vector<double>> tangents;  // unit tangent per vertex
  ComponentKind kind = ComponentKind::SegmentConnecting;
  std::optional<FaceSide> start_side;  // face of the last axis, for segments
  std::optional<FaceSide> end_side;
  double arc_length = 0.0;
  bool from_grid_supplement = false;

  const std::vector<double>& front() const { return polyline.front(); }
  const std::vector<double>& back() const { return polyline.back(); }
  // Lexicographically smallest vertex; canonical sort key for deterministic reports.
  std::vector<double> canonical_key() const;
};

struct TraceControls {
  double initial_step_frac = 1e-2;  // x box diameter
  double step_floor = 1e-8;
  int growth_streak = 4;  // consecutive successes before the step doubles
  std::size_t max_steps = 1000000;
  int max_corrector_iters = 12;
  double curve_tol_factor = 1e-9;     // x (1 + ||qbar||)
  double boundary_tol_frac = 1e-8;    // x diameter
  double dedup_tol_frac = 1e-6;       // x diameter
  double root_tol_frac = 1e-10;       // x diameter
  double closure_tol_frac = 1e-6;     // x diameter
  double min_loop_arc_factor = 10.0;  // x initial step
};

// Absolute tolerances derived from the controls for one tracing problem.
struct TraceTols {
  double initial_step = 0.0;
  double step_floor = 0.0;
  double curve_tol = 0.0;
  double boundary_tol = 0.0;
  double dedup_tol = 0.0;
  double root_tol = 0.0;
  double closure_tol = 0.0;
  double min_loop_arc = 0.0;
};

TraceTols derive_tols(const TraceControls& ctl, const Cuboid& box,
                      std::span<const double> qbar);

// Newton projection onto the level set (least-norm Gauss-Newton update).
// Returns true when the residual reaches curve_tol.
bool project_to_curve(const MapModel& reduced, std::span<const double> qbar,
                      std::vector<double>& x, const TraceTols& tols);

struct BoundaryStart {
  std::vector<double> point;
  FaceSide side = FaceSide::Lower;
};

struct StartSet {
  std::vector<BoundaryStart> starts;
  int count_lower = 0;
  int count_upper = 0;
};

// Solves the face-restricted reduced map on an (n-1)-dimensional face box.
// The recursive solver plugs itself in here; tests may use any root finder.
using FaceSolver = std::function<std::vector<std::vector<double>>(
    const MapModel& face_map, const Cuboid& face_box, std::span<const double> target)>;

// All solutions of fbar = qbar on the two faces of the last axis: the face
// solver's roots supplemented by multi-start Newton from a face grid, then
// deduplicated. Throws when a face yields no start (the induction guarantees
// an odd count on each face).
StartSet find_boundary_starts(const MapModel& reduced, std::span<const double> qbar,
                              const Cuboid& box, const FaceSolver& face_solver,
                              const TraceControls& ctl, int face_grid_per_axis = 9);

// Pseudo-arclength predictor-corrector from a boundary start. Terminates on a
// face of the last axis or (for interior starts) on closing a loop.
CurveComponent trace(std::span<const double> start, FaceSide start_side,
                     const MapModel& reduced, std::span<const double> qbar,
                     const Cuboid& box, const TraceControls& ctl);

// Traces every start once (a segment consumes the start at its far end),
// drops duplicate components, and optionally adds grid-discovered interior
// loops. Components come back in tracing order; callers sort canonically.
std::vector<CurveComponent> trace_all_components(const MapModel& reduced,
                                                 std::span<const double> qbar,
                                                 const Cuboid& box, const StartSet& starts,
                                                 const TraceControls& ctl, bool supplement,
                                                 int supplement_grid_per_axis);

// Trace from an interior seed: detects loops, or stitches the two half-traces
// of a segment hit from the middle.
CurveComponent trace_interior(std::span<const double> seed, const MapModel& reduced,
                              std::span<const double> qbar, const Cuboid& box,
                              const TraceControls& ctl);

// Projects interior grid nodes onto the level set and traces any component not
// already represented in `existing`. Best-effort discovery of loops that do not
// touch the boundary; appends to and returns the new components.
std::vector<CurveComponent> discover_interior_components(
    const MapModel& reduced, std::span<const double> qbar, const Cuboid& box,
    const TraceControls& ctl, std::span<const CurveComponent> existing,
    int grid_per_axis);

double point_polyline_distance(std::span<const double> p,
                               const std::vector<std::vector<double>>& polyline);

struct SignChangeLedger {
  std::vector<std::vector<double>> roots;  // points on the polyline where f_last = q_last
  bool odd = false;
};

// Sign-scan over consecutive polyline vertices with bisection refinement along
// each bracketing chord; when the curve context (reduced, qbar) is supplied the
// refinement points are projected back onto the level set, so the returned
// roots sit on the curve to curve_tol. Checks the parity against the component
// class (connecting segments are odd, everything else even) and throws
// SolveError(ParityViolation) on mismatch so the caller can re-trace finer.
SignChangeLedger sign_changes(const CurveComponent& component, const MapModel& scalar,
                              double q_last, const TraceTols& tols,
                              const MapModel* reduced = nullptr,
                              std::span<const double> qbar = {});

}  // namespace miranda
