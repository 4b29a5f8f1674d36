#include "miranda/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "miranda/bernstein.hpp"
#include "miranda/grid.hpp"
#include "miranda/linalg.hpp"
#include "miranda/newton.hpp"

namespace miranda {

namespace {

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

FaceMargins margins_from_report(const BoundaryReport& report) {
  const double floor = 1e-12 * (1.0 + report.map_scale);
  FaceMargins margins;
  for (std::size_t axis = 0; axis < report.axes.size(); ++axis) {
    const AxisVerdict& v = report.axes[axis];
    if (!v.pass)
      throw SolveError(SolveFailure::MirandaFailed,
                       "boundary condition fails on axis " + std::to_string(axis + 1));
    if (v.min_abs_lower <= floor || v.min_abs_upper <= floor)
      throw SolveError(SolveFailure::MarginFloor,
                       "face margin of axis " + std::to_string(axis + 1) +
                           " is at the numeric floor");
    margins.per_axis.emplace_back(v.min_abs_lower, v.min_abs_upper);
  }
  return margins;
}

struct RecursionContext {
  const SolveOptions& opt;
  double zero_tol;
  std::vector<AuditTarget> audit_targets;
  std::vector<ComponentRecord> components;
};

std::string path_label(const std::string& path) {
  return path.empty() ? "full cuboid" : path;
}

std::vector<std::vector<double>> solve_fixed(const MapModel& map, const Cuboid& box,
                                             std::span<const double> target,
                                             RecursionContext& ctx, int depth,
                                             const std::string& path);

Solve1dResult solve_1d_impl(const MapModel& map, const Cuboid& interval, double q,
                            int scan_cells, double zero_tol) {
  const double a = interval.lower[0];
  const double b = interval.upper[0];
  const double len = b - a;
  const double root_tol = 1e-10 * len;
  const double dedup_tol = 1e-6 * len;

  auto value_at = [&](double x) {
    const std::vector<double> p{x};
    std::vector<double> out(1);
    map.eval_into(p, out);
    return out[0] - q;
  };

  const double va = value_at(a);
  const double vb = value_at(b);
  if (va == 0.0 || vb == 0.0)
    throw SolveError(SolveFailure::MarginFloor,
                     "solve_1d: interval endpoint evaluates exactly to the target");

  Solve1dResult result;
  result.endpoint_product_negative = (va > 0.0) != (vb > 0.0);

  // Sign scan; one deterministic re-grid when a node hits the target exactly.
  std::vector<double> nodes;
  std::vector<double> values;
  bool exact_node = false;
  auto scan = [&](int cells) {
    nodes.clear();
    values.clear();
    exact_node = false;
    nodes.reserve(static_cast<std::size_t>(cells) + 1);
    for (int k = 0; k <= cells; ++k) {
      const double x = grid_node(a, b, cells + 1, k);
      const double v = (k == 0) ? va : (k == cells ? vb : value_at(x));
      if (v == 0.0 && k != 0 && k != cells) exact_node = true;
      nodes.push_back(x);
      values.push_back(v);
    }
  };
  scan(scan_cells);
  if (exact_node) scan(scan_cells + 7);

  std::vector<double> roots;
  const std::vector<double> target_vec{q};
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double v0 = values[k];
    const double v1 = values[k + 1];
    double candidate;
    if (v0 == 0.0) {
      if (k == 0) continue;  // endpoint handled above; defensive
      candidate = nodes[k];
    } else if (v1 == 0.0) {
      // Picked up at the next iteration as v0 == 0 (or it is the endpoint).
      continue;
    } else if ((v0 > 0.0) != (v1 > 0.0)) {
      double lo = nodes[k], hi = nodes[k + 1];
      double flo = v0;
      for (int iter = 0; iter < 200 && hi - lo > root_tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = value_at(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      candidate = 0.5 * (lo + hi);
    } else {
      continue;
    }

    std::vector<double> x{candidate};
    const NewtonResult polish = newton_solve(map, target_vec, x, zero_tol, 50);
    if (!polish.converged || x[0] < a || x[0] > b) x[0] = candidate;
    bool duplicate = false;
    for (double r : roots)
      if (std::abs(r - x[0]) <= dedup_tol) duplicate = true;
    if (!duplicate) roots.push_back(x[0]);
  }
  std::sort(roots.begin(), roots.end());

  const bool odd = roots.size() % 2 == 1;
  if (odd != result.endpoint_product_negative)
    throw SolveError(SolveFailure::ParityViolation,
                     "solve_1d: root-count parity contradicts the endpoint signs");
  result.roots = std::move(roots);
  result.parity = odd ? Parity::Odd : Parity::Even;
  return result;
}

// One complete level of the induction: find boundary starts by recursion on the
// two faces of the last axis, trace the level-set components, count the
// sign-change roots of the last component map, and polish them into zeros.
std::vector<std::vector<double>> solve_fixed(const MapModel& map, const Cuboid& box,
                                             std::span<const double> target,
                                             RecursionContext& ctx, int depth,
                                             const std::string& path) {
  const int n = box.n();
  if (n == 1) {
    Solve1dResult res =
        solve_1d_impl(map, box, target[0], ctx.opt.scan_cells_1d, ctx.zero_tol);
    AuditTarget at;
    at.map = map;
    at.label = "interval roots on " + path_label(path);
    for (double r : res.roots) at.points.push_back({r});
    ctx.audit_targets.push_back(std::move(at));
    std::vector<std::vector<double>> out;
    out.reserve(res.roots.size());
    for (double r : res.roots) out.push_back({r});
    return out;
  }

  const int last = n - 1;
  const MapModel reduced = reduce_map(map, last);
  const std::span<const double> qbar = target.subspan(0, static_cast<std::size_t>(last));
  const TraceTols tols = derive_tols(ctx.opt.trace, box, qbar);

  // Boundary starts: the recursive solve on each face of the reduction axis,
  // supplemented by multi-start Newton from a face grid.
  StartSet starts;
  {
    std::vector<BoundaryStart> all;
    int count_lower = 0, count_upper = 0;
    for (FaceSide side : {FaceSide::Lower, FaceSide::Upper}) {
      const Face face = face_of(box, last, side);
      const std::string face_coord =
          "x" + std::to_string(last + 1) + "=" + std::to_string(face.value);
      const std::string sub_path = path.empty() ? face_coord : path + ", " + face_coord;
      const MapModel face_map = restrict_map(reduced, last, face.value);
      std::vector<std::vector<double>> sols =
          solve_fixed(face_map, face.slice, qbar, ctx, depth + 1, sub_path);

      const int m = face.slice.n();
      std::vector<int> counts(static_cast<std::size_t>(m), ctx.opt.face_grid_per_axis);
      std::vector<double> y(static_cast<std::size_t>(m));
      for_each_multi_index(counts, [&](const std::vector<int>& idx) {
        for (int i = 0; i < m; ++i)
          y[static_cast<std::size_t>(i)] =
              grid_node(face.slice.lower[static_cast<std::size_t>(i)],
                        face.slice.upper[static_cast<std::size_t>(i)],
                        ctx.opt.face_grid_per_axis, idx[static_cast<std::size_t>(i)]);
        std::vector<double> root = y;
        const NewtonResult res = newton_solve(face_map, qbar, root, tols.curve_tol, 50);
        if (!res.converged || !face.slice.contains(root, tols.boundary_tol)) return;
        for (const auto& existing : sols)
          if (dist2(existing, root) <= tols.dedup_tol) return;
        sols.push_back(std::move(root));
      });
      std::sort(sols.begin(), sols.end(), lex_less);
      for (const auto& y_sol : sols) {
        all.push_back({face.embed(y_sol), side});
        if (side == FaceSide::Lower)
          ++count_lower;
        else
          ++count_upper;
      }
    }
    if (count_lower == 0 || count_upper == 0)
      throw SolveError(SolveFailure::TraceFailure,
                       "no boundary start on a face where the induction guarantees an "
                       "odd count (" + path_label(path) + ")");
    starts.starts = std::move(all);
    starts.count_lower = count_lower;
    starts.count_upper = count_upper;
  }

  const bool supplement = ctx.opt.supplement_enabled(n);
  const int grid = n == 2 ? ctx.opt.supplement_grid_2d : ctx.opt.supplement_grid_nd;
  std::vector<CurveComponent> comps = trace_all_components(
      reduced, qbar, box, starts, ctx.opt.trace, supplement, grid);
  std::sort(comps.begin(), comps.end(), [](const CurveComponent& a, const CurveComponent& b) {
    return lex_less(a.canonical_key(), b.canonical_key());
  });

  // Sign-change roots of the last component along every traced component.
  const MapModel scalar = component_map(map, last);
  const double q_last = target[static_cast<std::size_t>(last)];
  std::vector<std::vector<double>> zeros;
  for (CurveComponent& comp : comps) {
    SignChangeLedger ledger;
    try {
      ledger = sign_changes(comp, scalar, q_last, tols, &reduced, qbar);
    } catch (const SolveError& e) {
      if (e.kind() != SolveFailure::ParityViolation) throw;
      // Under-resolved polyline: re-trace once with a halved step.
      TraceControls finer = ctx.opt.trace;
      finer.initial_step_frac *= 0.5;
      if (comp.from_grid_supplement) {
        comp = trace_interior(comp.polyline[comp.polyline.size() / 2], reduced, qbar, box,
                              finer);
        comp.from_grid_supplement = true;
      } else {
        comp = trace(comp.front(), *comp.start_side, reduced, qbar, box, finer);
      }
      ledger = sign_changes(comp, scalar, q_last, tols, &reduced, qbar);
    }

    ComponentRecord record;
    record.kind = comp.kind;
    record.arc_length = comp.arc_length;
    record.vertex_count = comp.polyline.size();
    record.root_count = ledger.roots.size();
    record.odd = ledger.odd;
    record.from_grid_supplement = comp.from_grid_supplement;
    record.depth = depth;
    record.endpoint_first = comp.front();
    record.endpoint_last = comp.back();
    record.min_vertex = comp.canonical_key();
    ctx.components.push_back(std::move(record));

    for (std::vector<double>& root : ledger.roots) {
      const NewtonResult polish = newton_solve(map, target, root, ctx.zero_tol, 50);
      if (!polish.converged)
        throw SolveError(SolveFailure::TraceFailure,
                         "Newton polish of a curve root failed (" + path_label(path) + ")");
      if (!box.contains(root, 0.0) || box.face_distance(root) <= tols.boundary_tol)
        throw SolveError(SolveFailure::TraceFailure,
                         "polished zero is not strictly interior (" + path_label(path) + ")");
      zeros.push_back(std::move(root));
    }
  }

  // Deduplicate and order canonically.
  std::sort(zeros.begin(), zeros.end(), lex_less);
  std::vector<std::vector<double>> unique_zeros;
  for (std::vector<double>& z : zeros) {
    bool dup = false;
    for (const auto& u : unique_zeros)
      if (dist2(u, z) <= tols.dedup_tol) dup = true;
    if (!dup) unique_zeros.push_back(std::move(z));
  }

  AuditTarget at;
  at.map = map;
  at.points = unique_zeros;
  at.label = "zeros of the " + std::to_string(n) + "-dimensional system on " +
             path_label(path);
  ctx.audit_targets.push_back(std::move(at));

  return unique_zeros;
}

ToleranceSnapshot snapshot(const SolveOptions& opt, double zero_tol, const Cuboid& box) {
  ToleranceSnapshot t;
  t.epsilon = opt.epsilon;
  t.sigma_min = opt.sigma_min;
  t.zero_tol = zero_tol;
  t.curve_tol_factor = opt.trace.curve_tol_factor;
  t.boundary_tol = opt.trace.boundary_tol_frac * box.diameter();
  t.dedup_tol = opt.trace.dedup_tol_frac * box.diameter();
  t.root_tol = opt.trace.root_tol_frac * box.diameter();
  t.boundary_samples = opt.boundary_samples;
  t.scan_cells_1d = opt.scan_cells_1d;
  return t;
}

Cuboid permute_box(const Cuboid& box, const std::vector<int>& perm) {
  std::vector<double> lo(perm.size()), hi(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    lo[j] = box.lower[static_cast<std::size_t>(perm[j])];
    hi[j] = box.upper[static_cast<std::size_t>(perm[j])];
  }
  return Cuboid(std::move(lo), std::move(hi));
}

void unpermute_certificate(ParityCertificate& cert, const std::vector<int>& perm) {
  const std::span<const int> p(perm);
  cert.q = unpermute_point(cert.q, p);
  for (auto& z : cert.zeros) z = unpermute_point(z, p);
  for (auto& c : cert.components) {
    c.endpoint_first = unpermute_point(c.endpoint_first, p);
    c.endpoint_last = unpermute_point(c.endpoint_last, p);
    c.min_vertex = unpermute_point(c.min_vertex, p);
  }
  for (auto& e : cert.audit.entries)
    if (e.point.size() == perm.size()) e.point = unpermute_point(e.point, p);

  BoundaryReport fixed = cert.boundary;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    AxisVerdict v = cert.boundary.axes[j];
    if (!v.witness_lower.empty()) v.witness_lower = unpermute_point(v.witness_lower, p);
    if (!v.witness_upper.empty()) v.witness_upper = unpermute_point(v.witness_upper, p);
    fixed.axes[static_cast<std::size_t>(perm[j])] = std::move(v);
  }
  cert.boundary = std::move(fixed);

  std::sort(cert.zeros.begin(), cert.zeros.end(), lex_less);
}

}  // namespace

Solve1dResult solve_1d(const MapModel& map, const Cuboid& interval, double q,
                       int scan_cells) {
  if (map.n_in() != 1 || map.n_out() != 1 || interval.n() != 1)
    throw std::invalid_argument("solve_1d: map and interval must be one-dimensional");
  if (scan_cells < 2) throw std::invalid_argument("solve_1d: need at least 2 scan cells");
  // Standalone scale estimate from the endpoint values.
  std::vector<double> out(1);
  map.eval_into(std::vector<double>{interval.lower[0]}, out);
  const double fa = out[0];
  map.eval_into(std::vector<double>{interval.upper[0]}, out);
  const double fb = out[0];
  const double zero_tol = 1e-9 * (1.0 + std::max(std::abs(fa), std::abs(fb)));
  return solve_1d_impl(map, interval, q, scan_cells, zero_tol);
}

ParityCertificate solve(const MapModel& map, const Cuboid& box, const SolveOptions& opt) {
  if (map.n_in() != map.n_out())
    throw std::invalid_argument("solve: map must have equal input and output dimension");
  if (map.n_in() != box.n())
    throw std::invalid_argument("solve: map and cuboid dimensions differ");
  if (!map.smooth())
    throw SolveError(SolveFailure::Unsupported,
                     "solve: map contains abs; route it through solve_continuous");

  const bool permuted = !opt.axis_permutation.empty();
  MapModel work_map = map;
  Cuboid work_box = box;
  if (permuted) {
    work_map = permute_map(map, opt.axis_permutation);
    work_box = permute_box(box, opt.axis_permutation);
  }

  const BoundaryReport boundary = check_miranda(work_map, work_box, opt.boundary_samples);
  if (!boundary.pass())
    throw SolveError(SolveFailure::MirandaFailed,
                     "solve: boundary condition fails\n" + boundary.summary());
  const FaceMargins margins = margins_from_report(boundary);
  const double zero_tol = 1e-9 * (1.0 + boundary.map_scale);

  std::optional<SolveError> last_error;
  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    const RegularValueProposal prop = propose(margins, opt.epsilon, opt.seed, attempt);
    RecursionContext ctx{opt, zero_tol, {}, {}};
    std::vector<std::vector<double>> zeros;
    try {
      zeros = solve_fixed(work_map, work_box, prop.q, ctx, 0, "");
    } catch (const SolveError& e) {
      if (e.kind() == SolveFailure::TraceFailure ||
          e.kind() == SolveFailure::ParityViolation) {
        last_error = e;
        continue;  // fresh attempt, fresh q
      }
      throw;
    }

    const RegularityAudit verdict =
        audit(std::span<const AuditTarget>(ctx.audit_targets), opt.sigma_min);
    if (!verdict.regular) {
      last_error = SolveError(SolveFailure::RetryCapExhausted,
                              "audit flagged a suspect Jacobian");
      continue;
    }

    if (zeros.size() % 2 != 1) {
      last_error = SolveError(SolveFailure::ParityViolation,
                              "even zero count under a passing boundary condition and a "
                              "regular audit");
      continue;
    }

    ParityCertificate cert;
    cert.q = prop.q;
    cert.zeros = std::move(zeros);
    cert.residuals.reserve(cert.zeros.size());
    for (const auto& z : cert.zeros) {
      std::vector<double> val = work_map(z);
      for (int i = 0; i < work_box.n(); ++i) val[static_cast<std::size_t>(i)] -= prop.q[static_cast<std::size_t>(i)];
      cert.residuals.push_back(norm2(val));
    }
    cert.components = std::move(ctx.components);
    std::sort(cert.components.begin(), cert.components.end(),
              [](const ComponentRecord& a, const ComponentRecord& b) {
                if (a.depth != b.depth) return a.depth < b.depth;
                return lex_less(a.min_vertex, b.min_vertex);
              });
    cert.parity = Parity::Odd;
    cert.audit = verdict;
    cert.tolerances = snapshot(opt, zero_tol, work_box);
    cert.grid_supplemented = opt.supplement_enabled(work_box.n());
    cert.attempts_used = attempt + 1;
    cert.boundary = boundary;
    if (permuted) unpermute_certificate(cert, opt.axis_permutation);
    return cert;
  }

  if (last_error && last_error->kind() == SolveFailure::ParityViolation)
    throw SolveError(SolveFailure::ParityViolation,
                     std::string("parity violation persisted across attempts: ") +
                         last_error->what());
  throw SolveError(SolveFailure::RetryCapExhausted,
                   std::string("no regular value accepted within the attempt budget") +
                       (last_error ? std::string(": ") + last_error->what() : ""));
}

FieldReport solve_field(const MapModel& field, const Cuboid& box, const SolveOptions& opt) {
  if (field.n_in() != box.n() || field.n_out() != box.n())
    throw std::invalid_argument("solve_field: field and cuboid dimensions differ");

  FieldReport report;
  report.outward = true;
  std::vector<double> out(static_cast<std::size_t>(field.n_out()));
  for (int axis = 0; axis < box.n() && report.outward; ++axis) {
    for (FaceSide side : {FaceSide::Lower, FaceSide::Upper}) {
      if (!report.outward) break;
      const Face face = face_of(box, axis, side);
      for_each_face_sample(face, opt.boundary_samples, [&](std::span<const double> x) {
        if (!report.outward) return;
        field.eval_into(x, out);
        const double v = out[static_cast<std::size_t>(axis)];
        const bool ok = side == FaceSide::Lower ? v < 0.0 : v > 0.0;
        if (!ok) {
          report.outward = false;
          report.inward_witness.assign(x.begin(), x.end());
          report.inward_value = v;
          report.inward_axis = axis;
          report.inward_side = side;
        }
      });
    }
  }

  report.derived_boundary = check_miranda(field, box, opt.boundary_samples);
  if (!report.outward) return report;
  report.certificate = solve(field, box, opt);
  return report;
}

ContinuousSolveResult solve_continuous(const MapModel& map, const Cuboid& box,
                                       std::span<const int> degree_schedule,
                                       const SolveOptions& opt) {
  if (map.n_in() != box.n() || map.n_out() != box.n())
    throw std::invalid_argument("solve_continuous: dimension mismatch");

  const BoundaryReport source_report = check_miranda(map, box, opt.boundary_samples);
  if (!source_report.pass())
    throw SolveError(SolveFailure::MirandaFailed,
                     "solve_continuous: source map fails the boundary condition");
  const double zero_tol_src = 1e-9 * (1.0 + source_report.map_scale);

  // Escalate the degree until the approximant passes the boundary check and
  // the measured smoothing error undercuts epsilon/2 (the executable stand-in
  // for the eta/2 budget); otherwise settle for the finest passing degree.
  BernsteinBuild build;
  int degree_used = 0;
  for (int degree : degree_schedule) {
    BernsteinBuild candidate = bernstein_approximate(map, box, degree);
    const BoundaryReport approx_report =
        check_miranda(candidate.approximant, box, opt.boundary_samples);
    if (!approx_report.pass()) continue;
    build = std::move(candidate);
    degree_used = degree;
    if (build.measured_sup_error <= 0.5 * opt.epsilon) break;
  }
  if (degree_used == 0)
    throw SolveError(SolveFailure::Unsupported,
                     "solve_continuous: degree schedule exhausted without recovering the "
                     "boundary condition");

  {
    ParityCertificate cert = solve(build.approximant, box, opt);

    // Best candidate by direct source residual, each polished on the source.
    ContinuousSolveResult result;
    result.degree_used = degree_used;
    result.measured_sup_error = build.measured_sup_error;
    result.residual_norm = std::numeric_limits<double>::infinity();
    const std::vector<double> origin(static_cast<std::size_t>(box.n()), 0.0);
    for (const std::vector<double>& zero : cert.zeros) {
      std::vector<double> candidate = zero;
      const NewtonResult polish = newton_solve(map, origin, candidate, zero_tol_src, 50);
      if (!polish.converged || !box.contains(candidate, 0.0)) candidate = zero;
      const double rn = norm2(map(candidate));
      if (rn < result.residual_norm) {
        result.residual_norm = rn;
        result.x_star = candidate;
      }
    }

    std::vector<double> f_star = map(result.x_star);
    std::vector<double> g_star = build.approximant(result.x_star);
    std::vector<double> diff(f_star.size());
    for (std::size_t i = 0; i < f_star.size(); ++i) diff[i] = f_star[i] - g_star[i];
    result.term_smoothing = norm2(diff);
    for (std::size_t i = 0; i < g_star.size(); ++i) diff[i] = g_star[i] - cert.q[i];
    result.term_solve = norm2(diff);
    result.term_c = norm2(cert.q);

    // Constructive eta proxy: the smallest source norm seen on the dense grid.
    double eta = std::numeric_limits<double>::infinity();
    std::vector<int> counts(static_cast<std::size_t>(box.n()),
                            build.error_samples_per_axis);
    std::vector<double> node(static_cast<std::size_t>(box.n()));
    std::vector<double> val(static_cast<std::size_t>(box.n()));
    for_each_multi_index(counts, [&](const std::vector<int>& idx) {
      for (int i = 0; i < box.n(); ++i)
        node[static_cast<std::size_t>(i)] = grid_node(
            box.lower[static_cast<std::size_t>(i)], box.upper[static_cast<std::size_t>(i)],
            build.error_samples_per_axis, idx[static_cast<std::size_t>(i)]);
      map.eval_into(node, val);
      eta = std::min(eta, norm2(val));
    });
    result.eta_estimate = eta;
    result.smooth_certificate = std::move(cert);
    return result;
  }
}

const char* parity_name(Parity p) { return p == Parity::Odd ? "odd" : "even"; }

const char* component_kind_name(ComponentKind k) {
  switch (k) {
    case ComponentKind::SegmentConnecting:
      return "segment_connecting";
    case ComponentKind::SegmentSameFace:
      return "segment_same_face";
    case ComponentKind::Loop:
      return "loop";
  }
  return "?";
}

}  // namespace miranda
