#include "miranda/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "miranda/grid.hpp"
#include "miranda/linalg.hpp"
#include "miranda/newton.hpp"

namespace miranda {

namespace {

bool lex_less(std::span<const double> a, std::span<const double> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// Chord length with the first-order curvature correction from the tangent turn
// angle; exact for straight runs, O(theta^4) accurate on arcs.
double chord_arc(std::span<const double> a, std::span<const double> b,
                 std::span<const double> ta, std::span<const double> tb) {
  const double c = dist2(a, b);
  double dt = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const double d = tb[i] - ta[i];
    dt += d * d;
  }
  const double half = std::min(1.0, 0.5 * std::sqrt(dt));
  const double theta = 2.0 * std::asin(half);
  return c * (1.0 + theta * theta / 24.0);
}

struct CurveSystem {
  const MapModel& reduced;
  std::span<const double> qbar;
  int n;  // ambient dimension = reduced.n_in(); reduced.n_out() == n - 1

  double residual(const std::vector<double>& x, std::vector<double>& r) const {
    r.resize(static_cast<std::size_t>(n - 1));
    reduced.eval_into(x, r);
    for (int i = 0; i < n - 1; ++i) r[static_cast<std::size_t>(i)] -= qbar[static_cast<std::size_t>(i)];
    return norm2(r);
  }

  // Unit kernel of the (n-1) x n Jacobian, oriented along `orient` when given.
  std::vector<double> tangent(const std::vector<double>& x,
                              std::span<const double> orient = {}) const {
    const std::vector<double> jac = reduced.jacobian(x);
    std::vector<double> t = kernel_direction(jac, n - 1);
    const double nrm = norm2(t);
    if (!(nrm > 0.0))
      throw SolveError(SolveFailure::TraceFailure, "degenerate tangent on the curve");
    for (double& v : t) v /= nrm;
    if (!orient.empty() && dot(t, orient) < 0.0)
      for (double& v : t) v = -v;
    return t;
  }

  // Newton on the augmented system (fbar - qbar, t . (x - x_pred)) = 0.
  bool correct(std::vector<double>& x, std::span<const double> tangent_dir,
               std::span<const double> x_pred, double tol, int max_iters) const {
    std::vector<double> r;
    std::vector<double> rhs(static_cast<std::size_t>(n));
    std::vector<double> delta(static_cast<std::size_t>(n));
    std::vector<double> sys(static_cast<std::size_t>(n) * n);
    for (int iter = 0; iter < max_iters; ++iter) {
      double rn;
      try {
        rn = residual(x, r);
      } catch (const EvalError&) {
        return false;
      }
      double plane = 0.0;
      for (int i = 0; i < n; ++i)
        plane += tangent_dir[static_cast<std::size_t>(i)] *
                 (x[static_cast<std::size_t>(i)] - x_pred[static_cast<std::size_t>(i)]);
      if (rn <= tol && std::abs(plane) <= tol) return true;
      ++work_counters().newton_iterations;
      std::vector<double> jac;
      try {
        jac = reduced.jacobian(x);
      } catch (const EvalError&) {
        return false;
      }
      std::copy(jac.begin(), jac.end(), sys.begin());
      for (int i = 0; i < n; ++i)
        sys[static_cast<std::size_t>(n - 1) * n + i] = tangent_dir[static_cast<std::size_t>(i)];
      std::copy(r.begin(), r.end(), rhs.begin());
      rhs[static_cast<std::size_t>(n - 1)] = plane;
      if (!solve_square(sys, rhs, delta)) return false;
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] -= delta[static_cast<std::size_t>(i)];
    }
    return false;
  }

  // Newton on (fbar - qbar, x_last - face_value) = 0: exact landing on a face.
  bool land(std::vector<double>& x, double face_value, double tol, int max_iters) const {
    std::vector<double> r;
    std::vector<double> rhs(static_cast<std::size_t>(n));
    std::vector<double> delta(static_cast<std::size_t>(n));
    std::vector<double> sys(static_cast<std::size_t>(n) * n, 0.0);
    for (int iter = 0; iter < max_iters; ++iter) {
      double rn;
      try {
        rn = residual(x, r);
      } catch (const EvalError&) {
        return false;
      }
      const double gap = x[static_cast<std::size_t>(n - 1)] - face_value;
      if (rn <= tol && std::abs(gap) <= tol) {
        x[static_cast<std::size_t>(n - 1)] = face_value;
        return true;
      }
      ++work_counters().newton_iterations;
      std::vector<double> jac;
      try {
        jac = reduced.jacobian(x);
      } catch (const EvalError&) {
        return false;
      }
      std::copy(jac.begin(), jac.end(), sys.begin());
      for (int i = 0; i < n; ++i) sys[static_cast<std::size_t>(n - 1) * n + i] = 0.0;
      sys[static_cast<std::size_t>(n - 1) * n + (n - 1)] = 1.0;
      std::copy(r.begin(), r.end(), rhs.begin());
      rhs[static_cast<std::size_t>(n - 1)] = gap;
      if (!solve_square(sys, rhs, delta)) return false;
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] -= delta[static_cast<std::size_t>(i)];
    }
    return false;
  }
};

CurveComponent trace_impl(std::span<const double> start_in,
                          std::optional<FaceSide> start_side,
                          std::span<const double> dir0, const MapModel& reduced,
                          std::span<const double> qbar, const Cuboid& box,
                          const TraceControls& ctl, const TraceTols& tols) {
  const int n = box.n();
  const int last = n - 1;
  CurveSystem sys{reduced, qbar, n};

  std::vector<double> start(start_in.begin(), start_in.end());
  {
    std::vector<double> r;
    if (sys.residual(start, r) > tols.curve_tol) {
      // Face starts are pinned to their face plane while being pulled onto the
      // curve; interior seeds get the least-norm projection.
      bool fixed = start_side.has_value()
                       ? sys.land(start, start[static_cast<std::size_t>(last)],
                                  tols.curve_tol, 4 * ctl.max_corrector_iters)
                       : project_to_curve(reduced, qbar, start, tols);
      if (!fixed)
        throw SolveError(SolveFailure::TraceFailure, "trace start is not on the curve");
    }
  }

  CurveComponent comp;
  comp.start_side = start_side;
  std::vector<double> x = start;
  std::vector<double> t(dir0.begin(), dir0.end());
  comp.polyline.push_back(x);
  comp.tangents.push_back(t);
  const std::vector<double> t0 = t;

  double step = tols.initial_step;
  int streak = 0;
  const bool interior_start = !start_side.has_value();

  for (std::size_t steps = 0; steps < ctl.max_steps; ++steps) {
    ++work_counters().trace_steps;

    if (interior_start && comp.arc_length >= tols.min_loop_arc) {
      const double d = dist2(x, start);
      if (d < 2.0 * step && dot(t, t0) > 0.0) {
        if (d < tols.closure_tol) {
          comp.arc_length += chord_arc(x, start, t, t0);
          comp.polyline.push_back(start);
          comp.tangents.push_back(t0);
          comp.kind = ComponentKind::Loop;
          return comp;
        }
        step = std::max(std::min(step, 0.6 * d), tols.step_floor);
      }
    }

    std::vector<double> x_pred(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      x_pred[static_cast<std::size_t>(i)] =
          x[static_cast<std::size_t>(i)] + step * t[static_cast<std::size_t>(i)];

    std::vector<double> x_new = x_pred;
    bool ok = sys.correct(x_new, t, x_pred, tols.curve_tol, ctl.max_corrector_iters);
    std::vector<double> t_new;
    if (ok) {
      try {
        t_new = sys.tangent(x_new, t);
      } catch (const SolveError&) {
        ok = false;
      } catch (const EvalError&) {
        ok = false;
      }
    }
    if (ok && dot(t_new, t) <= 0.0) ok = false;                       // direction reversed
    if (ok && dist2(x_new, x_pred) > 0.5 * step) ok = false;          // curvature too high
    if (!ok) {
      streak = 0;
      step *= 0.5;
      if (step < tols.step_floor)
        throw SolveError(SolveFailure::TraceFailure,
                         "corrector failed at the minimum step size");
      continue;
    }

    // The margins confine the curve away from every face except the two of the
    // reduction axis; an exit elsewhere means they were violated.
    for (int j = 0; j < last; ++j) {
      if (x_new[static_cast<std::size_t>(j)] < box.lower[static_cast<std::size_t>(j)] - tols.boundary_tol ||
          x_new[static_cast<std::size_t>(j)] > box.upper[static_cast<std::size_t>(j)] + tols.boundary_tol)
        throw SolveError(SolveFailure::TraceFailure,
                         "curve exited through a face of axis " + std::to_string(j + 1));
    }

    const double lo = box.lower[static_cast<std::size_t>(last)];
    const double hi = box.upper[static_cast<std::size_t>(last)];
    if (x_new[static_cast<std::size_t>(last)] <= lo + tols.boundary_tol ||
        x_new[static_cast<std::size_t>(last)] >= hi - tols.boundary_tol) {
      const double face_value =
          (x_new[static_cast<std::size_t>(last)] - lo <= hi - x_new[static_cast<std::size_t>(last)]) ? lo : hi;
      std::vector<double> landing = x_new;
      if (!sys.land(landing, face_value, tols.curve_tol, 4 * ctl.max_corrector_iters) ||
          dist2(landing, x_new) > 2.0 * step + tols.boundary_tol) {
        streak = 0;
        step *= 0.5;
        if (step < tols.step_floor)
          throw SolveError(SolveFailure::TraceFailure, "face landing failed");
        continue;
      }
      std::vector<double> t_land = sys.tangent(landing, t);
      comp.arc_length += chord_arc(x, landing, t, t_land);
      comp.polyline.push_back(landing);
      comp.tangents.push_back(t_land);
      comp.end_side = face_value == lo ? FaceSide::Lower : FaceSide::Upper;
      if (start_side.has_value())
        comp.kind = *start_side != *comp.end_side ? ComponentKind::SegmentConnecting
                                                  : ComponentKind::SegmentSameFace;
      else
        comp.kind = ComponentKind::SegmentConnecting;  // provisional; fixed when stitched
      return comp;
    }

    comp.arc_length += chord_arc(x, x_new, t, t_new);
    comp.polyline.push_back(x_new);
    comp.tangents.push_back(t_new);
    x = x_new;
    t = t_new;
    if (++streak >= ctl.growth_streak) {
      step = std::min(step * 2.0, tols.initial_step);
      streak = 0;
    }
  }
  throw SolveError(SolveFailure::TraceFailure, "step-count cap exceeded while tracing");
}

std::vector<double> canonical_tangent(const CurveSystem& sys, const std::vector<double>& x) {
  std::vector<double> t = sys.tangent(x);
  std::size_t biggest = 0;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i]) > std::abs(t[biggest])) biggest = i;
  if (t[biggest] < 0.0)
    for (double& v : t) v = -v;
  return t;
}

}  // namespace

std::vector<double> CurveComponent::canonical_key() const {
  std::vector<double> best = polyline.front();
  for (const auto& p : polyline)
    if (lex_less(p, best)) best = p;
  return best;
}

TraceTols derive_tols(const TraceControls& ctl, const Cuboid& box,
                      std::span<const double> qbar) {
  const double diam = box.diameter();
  TraceTols t;
  t.initial_step = ctl.initial_step_frac * diam;
  t.step_floor = ctl.step_floor;
  t.curve_tol = ctl.curve_tol_factor * (1.0 + norm2(qbar));
  t.boundary_tol = ctl.boundary_tol_frac * diam;
  t.dedup_tol = ctl.dedup_tol_frac * diam;
  t.root_tol = ctl.root_tol_frac * diam;
  t.closure_tol = ctl.closure_tol_frac * diam;
  t.min_loop_arc = ctl.min_loop_arc_factor * t.initial_step;
  return t;
}

bool project_to_curve(const MapModel& reduced, std::span<const double> qbar,
                      std::vector<double>& x, const TraceTols& tols) {
  const int rows = reduced.n_out();
  const int cols = reduced.n_in();
  std::vector<double> r(static_cast<std::size_t>(rows));
  std::vector<double> delta(static_cast<std::size_t>(cols));
  std::vector<double> trial(static_cast<std::size_t>(cols));

  auto residual_at = [&](const std::vector<double>& p, std::vector<double>& out) {
    reduced.eval_into(p, out);
    for (int i = 0; i < rows; ++i) out[static_cast<std::size_t>(i)] -= qbar[static_cast<std::size_t>(i)];
    return norm2(out);
  };

  double rn;
  try {
    rn = residual_at(x, r);
  } catch (const EvalError&) {
    return false;
  }
  for (int iter = 0; iter < 50; ++iter) {
    if (rn <= tols.curve_tol) return true;
    ++work_counters().newton_iterations;
    std::vector<double> jac;
    try {
      jac = reduced.jacobian(x);
    } catch (const EvalError&) {
      return false;
    }
    if (!least_norm_step(jac, rows, cols, r, delta)) return false;
    double scale = 1.0;
    bool accepted = false;
    std::vector<double> r_trial(static_cast<std::size_t>(rows));
    for (int halving = 0; halving < 8; ++halving) {
      for (int i = 0; i < cols; ++i)
        trial[static_cast<std::size_t>(i)] =
            x[static_cast<std::size_t>(i)] - scale * delta[static_cast<std::size_t>(i)];
      double rn_trial;
      try {
        rn_trial = residual_at(trial, r_trial);
      } catch (const EvalError&) {
        scale *= 0.5;
        continue;
      }
      if (rn_trial < rn || rn_trial <= tols.curve_tol) {
        x = trial;
        r = r_trial;
        rn = rn_trial;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) return false;
  }
  return rn <= tols.curve_tol;
}

StartSet find_boundary_starts(const MapModel& reduced, std::span<const double> qbar,
                              const Cuboid& box, const FaceSolver& face_solver,
                              const TraceControls& ctl, int face_grid_per_axis) {
  const int n = box.n();
  const int last = n - 1;
  const TraceTols tols = derive_tols(ctl, box, qbar);
  StartSet out;

  for (FaceSide side : {FaceSide::Lower, FaceSide::Upper}) {
    const Face face = face_of(box, last, side);
    const MapModel face_map = restrict_map(reduced, last, face.value);

    std::vector<std::vector<double>> sols;
    if (face_solver) sols = face_solver(face_map, face.slice, qbar);

    // Multi-start correction from a face grid catches roots the recursive
    // solver may have missed (e.g. on interior loops of the face slice).
    const int m = face.slice.n();
    std::vector<int> counts(static_cast<std::size_t>(m), face_grid_per_axis);
    std::vector<double> y(static_cast<std::size_t>(m));
    for_each_multi_index(counts, [&](const std::vector<int>& idx) {
      for (int i = 0; i < m; ++i)
        y[static_cast<std::size_t>(i)] =
            grid_node(face.slice.lower[static_cast<std::size_t>(i)],
                      face.slice.upper[static_cast<std::size_t>(i)], face_grid_per_axis,
                      idx[static_cast<std::size_t>(i)]);
      std::vector<double> root = y;
      const NewtonResult res = newton_solve(face_map, qbar, root, tols.curve_tol, 50);
      if (!res.converged || !face.slice.contains(root, tols.boundary_tol)) return;
      for (const auto& existing : sols)
        if (dist2(existing, root) <= tols.dedup_tol) return;
      sols.push_back(std::move(root));
    });

    std::sort(sols.begin(), sols.end(),
              [](const std::vector<double>& a, const std::vector<double>& b) {
                return lex_less(a, b);
              });

    for (const auto& y_sol : sols) {
      out.starts.push_back({face.embed(y_sol), side});
      if (side == FaceSide::Lower)
        ++out.count_lower;
      else
        ++out.count_upper;
    }
  }

  if (out.count_lower == 0 || out.count_upper == 0)
    throw SolveError(SolveFailure::TraceFailure,
                     "no boundary start found on a face where the induction guarantees "
                     "an odd count");
  return out;
}

CurveComponent trace(std::span<const double> start, FaceSide start_side,
                     const MapModel& reduced, std::span<const double> qbar,
                     const Cuboid& box, const TraceControls& ctl) {
  const int n = box.n();
  const int last = n - 1;
  const TraceTols tols = derive_tols(ctl, box, qbar);
  CurveSystem sys{reduced, qbar, n};

  std::vector<double> x(start.begin(), start.end());
  std::vector<double> t = sys.tangent(x);
  // Orient inward along the reduction axis.
  const double want = start_side == FaceSide::Lower ? 1.0 : -1.0;
  if (std::abs(t[static_cast<std::size_t>(last)]) < 1e-12)
    throw SolveError(SolveFailure::TraceFailure,
                     "curve is tangent to the boundary face at a start point");
  if (t[static_cast<std::size_t>(last)] * want < 0.0)
    for (double& v : t) v = -v;

  return trace_impl(x, start_side, t, reduced, qbar, box, ctl, tols);
}

CurveComponent trace_interior(std::span<const double> seed, const MapModel& reduced,
                              std::span<const double> qbar, const Cuboid& box,
                              const TraceControls& ctl) {
  const TraceTols tols = derive_tols(ctl, box, qbar);
  CurveSystem sys{reduced, qbar, box.n()};

  std::vector<double> x(seed.begin(), seed.end());
  if (!project_to_curve(reduced, qbar, x, tols))
    throw SolveError(SolveFailure::TraceFailure, "interior seed does not project onto the curve");

  const std::vector<double> t0 = canonical_tangent(sys, x);
  CurveComponent forward = trace_impl(x, std::nullopt, t0, reduced, qbar, box, ctl, tols);
  forward.from_grid_supplement = true;
  if (forward.kind == ComponentKind::Loop) return forward;

  std::vector<double> t0_neg = t0;
  for (double& v : t0_neg) v = -v;
  CurveComponent backward = trace_impl(x, std::nullopt, t0_neg, reduced, qbar, box, ctl, tols);

  // Stitch: reversed backward half, then the forward half.
  CurveComponent comp;
  comp.from_grid_supplement = true;
  comp.polyline.assign(backward.polyline.rbegin(), backward.polyline.rend());
  comp.tangents.assign(backward.tangents.rbegin(), backward.tangents.rend());
  for (auto& tv : comp.tangents)
    for (double& v : tv) v = -v;
  comp.polyline.insert(comp.polyline.end(), forward.polyline.begin() + 1,
                       forward.polyline.end());
  comp.tangents.insert(comp.tangents.end(), forward.tangents.begin() + 1,
                       forward.tangents.end());
  comp.arc_length = backward.arc_length + forward.arc_length;
  comp.start_side = backward.end_side;
  comp.end_side = forward.end_side;
  comp.kind = comp.start_side == comp.end_side ? ComponentKind::SegmentSameFace
                                               : ComponentKind::SegmentConnecting;
  return comp;
}

std::vector<CurveComponent> trace_all_components(const MapModel& reduced,
                                                 std::span<const double> qbar,
                                                 const Cuboid& box, const StartSet& starts,
                                                 const TraceControls& ctl, bool supplement,
                                                 int supplement_grid_per_axis) {
  const TraceTols tols = derive_tols(ctl, box, qbar);
  std::vector<CurveComponent> comps;
  std::vector<bool> consumed(starts.starts.size(), false);

  for (std::size_t i = 0; i < starts.starts.size(); ++i) {
    if (consumed[i]) continue;
    consumed[i] = true;
    CurveComponent comp =
        trace(starts.starts[i].point, starts.starts[i].side, reduced, qbar, box, ctl);

    bool duplicate = false;
    const std::vector<double>& probe = comp.polyline[comp.polyline.size() / 2];
    for (const CurveComponent& existing : comps) {
      if (point_polyline_distance(probe, existing.polyline) < tols.dedup_tol) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = starts.starts.size();
    for (std::size_t j = 0; j < starts.starts.size(); ++j) {
      if (consumed[j]) continue;
      const double d = dist2(starts.starts[j].point, comp.back());
      if (d < best) {
        best = d;
        best_idx = j;
      }
    }
    if (best_idx < starts.starts.size() && best <= tols.dedup_tol) consumed[best_idx] = true;
    comps.push_back(std::move(comp));
  }

  if (supplement) {
    std::vector<CurveComponent> extra = discover_interior_components(
        reduced, qbar, box, ctl, comps, supplement_grid_per_axis);
    for (CurveComponent& c : extra) comps.push_back(std::move(c));
  }
  return comps;
}

double point_polyline_distance(std::span<const double> p,
                               const std::vector<std::vector<double>>& polyline) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const auto& a = polyline[i];
    const auto& b = polyline[i + 1];
    double ab2 = 0.0, ap_ab = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double e = b[k] - a[k];
      ab2 += e * e;
      ap_ab += (p[k] - a[k]) * e;
    }
    const double s = ab2 > 0.0 ? std::clamp(ap_ab / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double diff = p[k] - (a[k] + s * (b[k] - a[k]));
      d2 += diff * diff;
    }
    best = std::min(best, std::sqrt(d2));
  }
  if (polyline.size() == 1) best = dist2(p, polyline.front());
  return best;
}

std::vector<CurveComponent> discover_interior_components(
    const MapModel& reduced, std::span<const double> qbar, const Cuboid& box,
    const TraceControls& ctl, std::span<const CurveComponent> existing,
    int grid_per_axis) {
  const int n = box.n();
  const TraceTols tols = derive_tols(ctl, box, qbar);
  const double near_threshold = std::max(4.0 * tols.dedup_tol, 0.25 * tols.initial_step);

  std::vector<CurveComponent> found;
  auto near_known = [&](const std::vector<double>& p) {
    for (const CurveComponent& c : existing)
      if (point_polyline_distance(p, c.polyline) < near_threshold) return true;
    for (const CurveComponent& c : found)
      if (point_polyline_distance(p, c.polyline) < near_threshold) return true;
    return false;
  };

  std::vector<int> counts(static_cast<std::size_t>(n), grid_per_axis);
  std::vector<double> node(static_cast<std::size_t>(n));
  for_each_multi_index(counts, [&](const std::vector<int>& idx) {
    // Interior nodes of a (grid+2)-node lattice: stay off the faces.
    for (int i = 0; i < n; ++i)
      node[static_cast<std::size_t>(i)] =
          grid_node(box.lower[static_cast<std::size_t>(i)], box.upper[static_cast<std::size_t>(i)],
                    grid_per_axis + 2, idx[static_cast<std::size_t>(i)] + 1);
    std::vector<double> x = node;
    if (!project_to_curve(reduced, qbar, x, tols)) return;
    if (!box.contains(x, 0.0) || box.face_distance(x) <= 2.0 * tols.boundary_tol) return;
    if (near_known(x)) return;
    try {
      found.push_back(trace_interior(x, reduced, qbar, box, ctl));
    } catch (const SolveError&) {
      // Discovery is best-effort; parity is carried by the boundary components.
    }
  });
  return found;
}

SignChangeLedger sign_changes(const CurveComponent& component, const MapModel& scalar,
                              double q_last, const TraceTols& tols,
                              const MapModel* reduced, std::span<const double> qbar) {
  const auto& poly = component.polyline;
  SignChangeLedger ledger;

  std::vector<double> vals(poly.size());
  std::vector<double> out(1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    scalar.eval_into(poly[i], out);
    vals[i] = out[0] - q_last;
  }

  // With curve context, chord points are pulled back onto the level set so the
  // bisection resolves the crossing of the curve itself, not of the chord.
  auto place = [&](const std::vector<double>& pa, const std::vector<double>& pb, double t) {
    std::vector<double> p(pa.size());
    for (std::size_t k = 0; k < pa.size(); ++k) p[k] = pa[k] + t * (pb[k] - pa[k]);
    if (reduced != nullptr) project_to_curve(*reduced, qbar, p, tols);
    return p;
  };

  auto refine = [&](std::size_t a, std::size_t b) {
    const auto& pa = poly[a];
    const auto& pb = poly[b];
    const double chord = dist2(pa, pb);
    double lo = 0.0, hi = 1.0;
    double va = vals[a];
    std::vector<double> pm;
    for (int iter = 0; iter < 80 && chord * (hi - lo) > tols.root_tol; ++iter) {
      const double mid = 0.5 * (lo + hi);
      pm = place(pa, pb, mid);
      scalar.eval_into(pm, out);
      const double vm = out[0] - q_last;
      if (vm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((vm > 0.0) == (va > 0.0))
        lo = mid;
      else
        hi = mid;
    }
    return place(pa, pb, 0.5 * (lo + hi));
  };

  // Exact zeros at vertices count once; brackets are only refined between
  // adjacent vertices of opposite strict sign. A loop polyline repeats its
  // first vertex at the end, which closes the cyclic scan: the duplicate is
  // excluded from zero counting but still terminates the final bracket.
  int last_sign = 0;
  std::size_t last_idx = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const double v = vals[i];
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) {
      if (!(component.kind == ComponentKind::Loop && i + 1 == poly.size()))
        ledger.roots.push_back(poly[i]);
      continue;
    }
    if (last_sign != 0 && s != last_sign && i == last_idx + 1)
      ledger.roots.push_back(refine(last_idx, i));
    last_sign = s;
    last_idx = i;
  }

  ledger.odd = ledger.roots.size() % 2 == 1;
  const bool expect_odd = component.kind == ComponentKind::SegmentConnecting;
  if (ledger.odd != expect_odd)
    throw SolveError(SolveFailure::ParityViolation,
                     "sign-change parity contradicts the component classification");
  return ledger;
}

}  // namespace miranda
