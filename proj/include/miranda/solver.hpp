#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "miranda/geometry.hpp"
#include "miranda/map_model.hpp"
#include "miranda/regval.hpp"
#include "miranda/tracer.hpp"

namespace miranda {

enum class Parity { Odd, Even };

struct SolveOptions {
  double epsilon = 0.05;
  std::uint64_t seed = 1;
  int max_attempts = 16;   // retry cap for Suspect audits / parity failures
  double sigma_min = 1e-8; // audit threshold, scaled by the Jacobian Frobenius norm
  int boundary_samples = 33;
  int scan_cells_1d = 1024;
  // Grid-seeded discovery of interior loops. Auto: on for n <= 3, off above.
  std::optional<bool> grid_supplement;
  int supplement_grid_2d = 9;
  int supplement_grid_nd = 7;
  int face_grid_per_axis = 9;
  std::vector<int> axis_permutation;  // applied to the map before solving
  TraceControls trace;

  bool supplement_enabled(int n) const {
    return grid_supplement.value_or(n <= 3);
  }
};

// The numeric thresholds a certificate was produced under.
struct ToleranceSnapshot {
  double epsilon = 0.0;
  double sigma_min = 0.0;
  double zero_tol = 0.0;
  double curve_tol_factor = 0.0;
  double boundary_tol = 0.0;
  double dedup_tol = 0.0;
  double root_tol = 0.0;
  int boundary_samples = 0;
  int scan_cells_1d = 0;
};

struct ComponentRecord {
  ComponentKind kind = ComponentKind::SegmentConnecting;
  double arc_length = 0.0;
  std::size_t vertex_count = 0;
  std::size_t root_count = 0;
  bool odd = false;
  bool from_grid_supplement = false;
  int depth = 0;  // recursion depth: 0 = top-level curve in the full cuboid
  std::vector<double> endpoint_first;
  std::vector<double> endpoint_last;
  std::vector<double> min_vertex;  // canonical ordering key
};

// Machine-checkable outcome of one solve: the zeros located for f = q, the
// per-component sign-change ledger, and the parity verdict, valid relative to
// the audited regularity threshold.
struct ParityCertificate {
  std::vector<double> q;
  std::vector<std::vector<double>> zeros;
  std::vector<double> residuals;  // ||f(x) - q|| per zero
  std::vector<ComponentRecord> components;
  Parity parity = Parity::Even;
  RegularityAudit audit;
  ToleranceSnapshot tolerances;
  bool grid_supplemented = false;  // completeness flag
  int attempts_used = 0;
  BoundaryReport boundary;
};

struct Solve1dResult {
  std::vector<double> roots;
  Parity parity = Parity::Even;
  bool endpoint_product_negative = false;
};

// Lemma-1 root isolation: uniform sign scan, bisection, Newton polish. The
// root-count parity must match the endpoint signs of f - q or it throws.
Solve1dResult solve_1d(const MapModel& map, const Cuboid& interval, double q,
                       int scan_cells = 1024);

// Theorem-1 recursion. Requires a smooth map passing the boundary condition;
// proposes a regular value, solves, audits, and retries with a fresh attempt
// on Suspect audits up to the cap.
ParityCertificate solve(const MapModel& map, const Cuboid& box, const SolveOptions& opt);

struct FieldReport {
  bool outward = false;
  // First sampled point violating outwardness, with its component value.
  std::vector<double> inward_witness;
  double inward_value = 0.0;
  int inward_axis = -1;
  FaceSide inward_side = FaceSide::Lower;
  BoundaryReport derived_boundary;
  std::optional<ParityCertificate> certificate;
};

// Theorem-2 adapter: an outward-pointing field on an axis-aligned box has
// v_i < 0 on the lower face and v_i > 0 on the upper face of every axis, which
// is the boundary condition with a fixed orientation; then delegates to solve.
FieldReport solve_field(const MapModel& field, const Cuboid& box, const SolveOptions& opt);

struct ContinuousSolveResult {
  double eta_estimate = 0.0;  // min ||f|| over the dense sample grid
  int degree_used = 0;
  double measured_sup_error = 0.0;  // ||f - g||_sup on the sample grid
  std::vector<double> x_star;
  double residual_norm = 0.0;   // ||f(x_star)||
  double term_smoothing = 0.0;  // ||f(x_star) - g(x_star)||
  double term_solve = 0.0;      // ||g(x_star) - c||
  double term_c = 0.0;          // ||c||
  ParityCertificate smooth_certificate;
};

// Continuous-map pipeline: Bernstein-smooth at increasing degrees until the
// approximant passes the boundary condition, solve the smooth problem, then
// polish the best candidate against the source map directly.
ContinuousSolveResult solve_continuous(const MapModel& map, const Cuboid& box,
                                       std::span<const int> degree_schedule,
                                       const SolveOptions& opt);

const char* parity_name(Parity p);
const char* component_kind_name(ComponentKind k);

}  // namespace miranda
