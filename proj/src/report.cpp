#include "miranda/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "miranda/builtins.hpp"
#include "miranda/linalg.hpp"
#include "miranda/oracle.hpp"

namespace miranda {

namespace {

using nlohmann::json;

json vec_json(std::span<const double> v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

json points_json(const std::vector<std::vector<double>>& points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back(vec_json(p));
  return arr;
}

json counters_json() {
  const WorkCounters& c = work_counters();
  return json{{"map_evaluations", c.map_evaluations},
              {"newton_iterations", c.newton_iterations},
              {"trace_steps", c.trace_steps}};
}

json audit_json(const RegularityAudit& audit) {
  json entries = json::array();
  for (const AuditEntry& e : audit.entries) {
    entries.push_back(json{{"point", vec_json(e.point)},
                           {"sigma_min", e.sigma_min},
                           {"frobenius", e.frobenius},
                           {"map", e.label}});
  }
  return json{{"verdict", audit.regular ? "regular" : "suspect"},
              {"sigma_min_threshold", audit.sigma_min},
              {"entries", entries}};
}

json tolerances_json(const ToleranceSnapshot& t) {
  return json{{"epsilon", t.epsilon},
              {"sigma_min", t.sigma_min},
              {"zero_tol", t.zero_tol},
              {"curve_tol_factor", t.curve_tol_factor},
              {"boundary_tol", t.boundary_tol},
              {"dedup_tol", t.dedup_tol},
              {"root_tol", t.root_tol},
              {"boundary_samples", t.boundary_samples},
              {"scan_cells_1d", t.scan_cells_1d}};
}

int exit_for(const SolveError& e) {
  switch (e.kind()) {
    case SolveFailure::MirandaFailed:
    case SolveFailure::MarginFloor:
      return 2;
    case SolveFailure::ParityViolation:
      return 3;
    case SolveFailure::RetryCapExhausted:
      return 4;
    case SolveFailure::TraceFailure:
    case SolveFailure::Unsupported:
      return 1;
  }
  return 1;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json base_report(const RunConfig& config) {
  return json{{"version", kToolVersion}, {"config", config_json(config)}};
}

std::string finish(json& report) {
  report["timings"] = counters_json();
  return report.dump(2) + "\n";
}

CommandOutcome run_check(const RunConfig& config) {
  MapModel map = load_map(config);
  const Cuboid box = resolve_box(config, map.n_in());
  const BoundaryReport boundary = check_miranda(map, box, config.boundary_samples);
  json report = base_report(config);
  report["boundary"] = boundary_json(boundary);
  CommandOutcome out;
  out.report_text = finish(report);
  out.exit_code = boundary.pass() ? 0 : 2;
  if (!boundary.pass()) out.error_text = "boundary condition FAILED\n" + boundary.summary();
  return out;
}

CommandOutcome run_solve(const RunConfig& config) {
  MapModel map = load_map(config);
  const Cuboid box = resolve_box(config, map.n_in());
  const SolveOptions opt = solve_options(config);
  json report = base_report(config);
  CommandOutcome out;

  if (config.continuous || !map.smooth()) {
    const std::vector<int>& schedule = config.degree_schedule;
    ContinuousSolveResult res = solve_continuous(map, box, schedule, opt);
    report["continuous"] = json{{"eta_estimate", res.eta_estimate},
                                {"degree_used", res.degree_used},
                                {"measured_sup_error", res.measured_sup_error},
                                {"x_star", vec_json(res.x_star)},
                                {"residual_norm", res.residual_norm},
                                {"term_smoothing", res.term_smoothing},
                                {"term_solve", res.term_solve},
                                {"term_c", res.term_c}};
    const json cj = certificate_json(res.smooth_certificate);
    for (const auto& [key, value] : cj.items()) report[key] = value;
  } else {
    const ParityCertificate cert = solve(map, box, opt);
    const json cj = certificate_json(cert);
    for (const auto& [key, value] : cj.items()) report[key] = value;
  }
  out.report_text = finish(report);
  return out;
}

CommandOutcome run_trace(const RunConfig& config) {
  MapModel map = load_map(config);
  if (map.n_in() != 2)
    throw SolveError(SolveFailure::Unsupported, "trace: only dimension 2 is supported");
  const Cuboid box = resolve_box(config, 2);
  const SolveOptions opt = solve_options(config);

  const BoundaryReport boundary = check_miranda(map, box, opt.boundary_samples);
  if (!boundary.pass())
    throw SolveError(SolveFailure::MirandaFailed,
                     "trace: boundary condition fails\n" + boundary.summary());
  const RegularValueProposal prop =
      propose(face_margins(map, box, opt.boundary_samples), opt.epsilon, opt.seed, 0);

  const MapModel reduced = reduce_map(map, 1);
  const std::vector<double> qbar{prop.q[0]};

  FaceSolver face_solver = [&](const MapModel& face_map, const Cuboid& face_box,
                               std::span<const double> target) {
    Solve1dResult res = solve_1d(face_map, face_box, target[0], opt.scan_cells_1d);
    std::vector<std::vector<double>> sols;
    for (double r : res.roots) sols.push_back({r});
    return sols;
  };
  const StartSet starts = find_boundary_starts(reduced, qbar, box, face_solver, opt.trace,
                                               opt.face_grid_per_axis);
  std::vector<CurveComponent> comps =
      trace_all_components(reduced, qbar, box, starts, opt.trace,
                           opt.supplement_enabled(2), opt.supplement_grid_2d);
  std::sort(comps.begin(), comps.end(), [](const CurveComponent& a, const CurveComponent& b) {
    const auto ka = a.canonical_key();
    const auto kb = b.canonical_key();
    return std::lexicographical_compare(ka.begin(), ka.end(), kb.begin(), kb.end());
  });

  json files = json::array();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_component_%02zu.csv", config.csv_prefix.c_str(), i);
    write_file(name, component_csv(comps[i]));
    files.push_back(name);
  }
  const std::string svg_path =
      config.svg_path.empty() ? config.csv_prefix + ".svg" : config.svg_path;
  write_file(svg_path, svg_figure(comps, starts, box));

  json comps_json = json::array();
  for (const CurveComponent& c : comps) {
    comps_json.push_back(json{{"kind", component_kind_name(c.kind)},
                              {"vertices", c.polyline.size()},
                              {"arc_length", c.arc_length},
                              {"endpoint_first", vec_json(c.front())},
                              {"endpoint_last", vec_json(c.back())},
                              {"from_grid_supplement", c.from_grid_supplement}});
  }
  json starts_json = json::array();
  for (const BoundaryStart& s : starts.starts)
    starts_json.push_back(json{
        {"point", vec_json(s.point)},
        {"side", s.side == FaceSide::Lower ? "lower" : "upper"}});

  json report = base_report(config);
  report["q"] = vec_json(prop.q);
  report["components"] = comps_json;
  report["boundary_starts"] = starts_json;
  report["files"] = json{{"csv", files}, {"svg", svg_path}};
  CommandOutcome out;
  out.report_text = finish(report);
  return out;
}

CommandOutcome run_compare(const RunConfig& config) {
  MapModel map = load_map(config);
  if (map.n_in() > 3)
    throw SolveError(SolveFailure::Unsupported, "compare: guarded to n <= 3");
  const Cuboid box = resolve_box(config, map.n_in());
  const SolveOptions opt = solve_options(config);

  const ParityCertificate cert = solve(map, box, opt);
  const int grid = config.oracle_grid > 0 ? config.oracle_grid : (box.n() <= 2 ? 32 : 12);
  const OracleResult oracle_result = count_zeros_grid(map, box, cert.q, grid);

  // Greedy nearest pairing of the two (sorted) zero lists.
  double max_pair_distance = 0.0;
  json pairs = json::array();
  std::vector<bool> used(oracle_result.zeros.size(), false);
  for (const auto& z : cert.zeros) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = oracle_result.zeros.size();
    for (std::size_t j = 0; j < oracle_result.zeros.size(); ++j) {
      if (used[j]) continue;
      const double d = dist2(z, oracle_result.zeros[j]);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    json pair{{"solver", vec_json(z)}};
    if (best_j < oracle_result.zeros.size()) {
      used[best_j] = true;
      pair["oracle"] = vec_json(oracle_result.zeros[best_j]);
      pair["distance"] = best;
      max_pair_distance = std::max(max_pair_distance, best);
    } else {
      pair["oracle"] = nullptr;
    }
    pairs.push_back(pair);
  }

  const bool counts_match = cert.zeros.size() == oracle_result.zeros.size();
  json report = base_report(config);
  report["solver"] = json{{"count", cert.zeros.size()},
                          {"zeros", points_json(cert.zeros)},
                          {"parity", parity_name(cert.parity)}};
  report["oracle"] = json{{"count", oracle_result.zeros.size()},
                          {"zeros", points_json(oracle_result.zeros)},
                          {"grid_per_axis", oracle_result.grid_per_axis},
                          {"basins_explored", oracle_result.basins_explored},
                          {"parity", oracle_result.zeros.size() % 2 == 1 ? "odd" : "even"}};
  report["pairs"] = pairs;
  report["counts_match"] = counts_match;
  report["max_pair_distance"] = max_pair_distance;

  CommandOutcome out;
  out.report_text = finish(report);
  out.exit_code = counts_match ? 0 : 1;
  if (!counts_match)
    out.error_text = "zero counts differ: solver " + std::to_string(cert.zeros.size()) +
                     ", oracle " + std::to_string(oracle_result.zeros.size());
  return out;
}

CommandOutcome run_field(const RunConfig& config) {
  MapModel field = load_map(config);
  const Cuboid box = resolve_box(config, field.n_in());
  const SolveOptions opt = solve_options(config);
  const FieldReport field_report = solve_field(field, box, opt);

  json report = base_report(config);
  json fj{{"outward", field_report.outward}};
  if (!field_report.outward) {
    fj["witness"] = json{{"point", vec_json(field_report.inward_witness)},
                         {"component_value", field_report.inward_value},
                         {"axis", field_report.inward_axis + 1},
                         {"side", field_report.inward_side == FaceSide::Lower ? "lower"
                                                                              : "upper"}};
  }
  report["field"] = fj;
  report["boundary"] = boundary_json(field_report.derived_boundary);
  if (field_report.certificate) {
    const json cj = certificate_json(*field_report.certificate);
    for (const auto& [key, value] : cj.items()) report[key] = value;
  }

  CommandOutcome out;
  out.report_text = finish(report);
  if (!field_report.outward) {
    out.exit_code = 2;
    out.error_text = "field is not outward-pointing on the boundary";
  }
  return out;
}

}  // namespace

json config_json(const RunConfig& c) {
  json permute = json::array();
  for (int p : c.permute) permute.push_back(p);
  json degrees = json::array();
  for (int d : c.degree_schedule) degrees.push_back(d);
  json box = json::array();
  for (double b : c.box) box.push_back(b);
  return json{{"command", c.command},
              {"map", c.map_name},
              {"expr", c.expr_text},
              {"map_file", c.map_file},
              {"dim", c.dim},
              {"box", box},
              {"epsilon", c.epsilon},
              {"seed", c.seed},
              {"sigma_min", c.sigma_min},
              {"max_attempts", c.max_attempts},
              {"boundary_samples", c.boundary_samples},
              {"scan_cells_1d", c.scan_cells_1d},
              {"oracle_grid", c.oracle_grid},
              {"grid_supplement", c.grid_supplement},
              {"continuous", c.continuous},
              {"degree_schedule", degrees},
              {"permute", permute},
              {"out", c.out_path},
              {"csv_prefix", c.csv_prefix},
              {"svg", c.svg_path}};
}

json boundary_json(const BoundaryReport& report) {
  json axes = json::array();
  for (std::size_t i = 0; i < report.axes.size(); ++i) {
    const AxisVerdict& v = report.axes[i];
    json axis{{"axis", i + 1},
              {"pass", v.pass},
              {"min_abs_lower", v.min_abs_lower},
              {"min_abs_upper", v.min_abs_upper}};
    if (v.pass) {
      axis["orientation"] =
          v.orientation == AxisOrientation::NegativeLower ? "negative_lower" : "positive_lower";
    } else {
      axis["witness"] = json{{"lower_point", vec_json(v.witness_lower)},
                             {"lower_value", v.witness_value_lower},
                             {"upper_point", vec_json(v.witness_upper)},
                             {"upper_value", v.witness_value_upper}};
    }
    axes.push_back(axis);
  }
  return json{{"pass", report.pass()},
              {"samples_per_axis", report.samples_per_axis},
              {"map_scale", report.map_scale},
              {"axes", axes}};
}

json certificate_json(const ParityCertificate& cert) {
  json comps = json::array();
  for (const ComponentRecord& c : cert.components) {
    comps.push_back(json{{"kind", component_kind_name(c.kind)},
                         {"depth", c.depth},
                         {"arc_length", c.arc_length},
                         {"vertices", c.vertex_count},
                         {"roots", c.root_count},
                         {"parity", c.odd ? "odd" : "even"},
                         {"from_grid_supplement", c.from_grid_supplement},
                         {"endpoint_first", vec_json(c.endpoint_first)},
                         {"endpoint_last", vec_json(c.endpoint_last)},
                         {"min_vertex", vec_json(c.min_vertex)}});
  }
  json zeros = json::array();
  for (std::size_t i = 0; i < cert.zeros.size(); ++i)
    zeros.push_back(json{{"x", vec_json(cert.zeros[i])}, {"residual", cert.residuals[i]}});

  return json{{"q", vec_json(cert.q)},
              {"boundary", boundary_json(cert.boundary)},
              {"components", comps},
              {"zeros", zeros},
              {"parity", parity_name(cert.parity)},
              {"audit", audit_json(cert.audit)},
              {"tolerances", tolerances_json(cert.tolerances)},
              {"grid_supplemented", cert.grid_supplemented},
              {"attempts_used", cert.attempts_used}};
}

MapModel load_map(const RunConfig& config) {
  int sources = 0;
  if (!config.expr_text.empty()) ++sources;
  if (!config.map_file.empty()) ++sources;
  if (!config.map_name.empty()) ++sources;
  if (sources != 1)
    throw std::invalid_argument("specify exactly one of --expr, --map-file, --map");

  if (!config.map_name.empty()) return builtin(config.map_name, config.dim);

  std::string text = config.expr_text;
  if (!config.map_file.empty()) {
    std::ifstream in(config.map_file);
    if (!in) throw std::invalid_argument("cannot open map file: " + config.map_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  MapModel parsed = parse_map(text);
  if (config.dim > 0 && config.dim != parsed.n_in()) {
    if (config.dim < parsed.n_in())
      throw std::invalid_argument("expression references more variables than --dim");
    std::vector<ExprPtr> comps = parse_map_text(text);
    Provenance prov{Provenance::Kind::Parsed, text, 0};
    return make_expr_map(std::move(comps), config.dim, std::move(prov));
  }
  return parsed;
}

Cuboid resolve_box(const RunConfig& config, int n) {
  if (config.box.empty()) return Cuboid::symmetric(n);
  if (config.box.size() == 2) {
    return Cuboid(std::vector<double>(static_cast<std::size_t>(n), config.box[0]),
                  std::vector<double>(static_cast<std::size_t>(n), config.box[1]));
  }
  if (config.box.size() != static_cast<std::size_t>(2 * n))
    throw std::invalid_argument("--box needs one pair or n pairs of bounds");
  std::vector<double> lo, hi;
  for (int i = 0; i < n; ++i) {
    lo.push_back(config.box[static_cast<std::size_t>(2 * i)]);
    hi.push_back(config.box[static_cast<std::size_t>(2 * i + 1)]);
  }
  return Cuboid(std::move(lo), std::move(hi));
}

SolveOptions solve_options(const RunConfig& config) {
  SolveOptions opt;
  opt.epsilon = config.epsilon;
  opt.seed = config.seed;
  opt.sigma_min = config.sigma_min;
  opt.max_attempts = config.max_attempts;
  opt.boundary_samples = config.boundary_samples;
  opt.scan_cells_1d = config.scan_cells_1d;
  if (config.grid_supplement == "on")
    opt.grid_supplement = true;
  else if (config.grid_supplement == "off")
    opt.grid_supplement = false;
  else if (config.grid_supplement != "auto")
    throw std::invalid_argument("--grid-supplement must be auto, on, or off");
  if (!config.permute.empty()) {
    for (int p : config.permute) opt.axis_permutation.push_back(p - 1);
  }
  return opt;
}

std::string component_csv(const CurveComponent& component) {
  std::string out = "x1,x2\n";
  for (const auto& p : component.polyline) out += fmt17(p[0]) + "," + fmt17(p[1]) + "\n";
  return out;
}

std::string svg_figure(const std::vector<CurveComponent>& components,
                       const StartSet& starts, const Cuboid& box) {
  const double w = box.extent(0);
  const double h = box.extent(1);
  // Mirror y inside the box so the viewBox equals the cuboid while the figure
  // keeps the mathematical orientation.
  const double ysum = box.lower[1] + box.upper[1];
  auto flip = [&](double y) { return ysum - y; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt17(box.lower[0])
      << " " << fmt17(box.lower[1]) << " " << fmt17(w) << " " << fmt17(h) << "\">\n";
  svg << "  <rect x=\"" << fmt17(box.lower[0]) << "\" y=\"" << fmt17(box.lower[1])
      << "\" width=\"" << fmt17(w) << "\" height=\"" << fmt17(h)
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"" << fmt17(0.004 * std::min(w, h))
      << "\"/>\n";
  const double stroke = 0.006 * std::min(w, h);
  for (const CurveComponent& c : components) {
    const char* color = c.kind == ComponentKind::Loop ? "#d95f02" : "#1b6ca8";
    svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
        << fmt17(stroke) << "\" points=\"";
    for (std::size_t i = 0; i < c.polyline.size(); ++i) {
      if (i > 0) svg << " ";
      svg << fmt17(c.polyline[i][0]) << "," << fmt17(flip(c.polyline[i][1]));
    }
    svg << "\"/>\n";
  }
  for (const BoundaryStart& s : starts.starts) {
    svg << "  <circle cx=\"" << fmt17(s.point[0]) << "\" cy=\"" << fmt17(flip(s.point[1]))
        << "\" r=\"" << fmt17(0.012 * std::min(w, h)) << "\" fill=\"#c1272d\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

CommandOutcome run_command(const RunConfig& config) {
  work_counters().reset();
  CommandOutcome out;
  try {
    if (config.command == "check")
      out = run_check(config);
    else if (config.command == "solve")
      out = run_solve(config);
    else if (config.command == "trace")
      out = run_trace(config);
    else if (config.command == "compare")
      out = run_compare(config);
    else if (config.command == "field")
      out = run_field(config);
    else
      throw std::invalid_argument("unknown command: " + config.command);
  } catch (const SolveError& e) {
    out.exit_code = exit_for(e);
    out.error_text = e.what();
    return out;
  } catch (const ParseError& e) {
    out.exit_code = 1;
    out.error_text = e.what();
    return out;
  } catch (const EvalError& e) {
    out.exit_code = 1;
    out.error_text = e.what();
    return out;
  } catch (const std::exception& e) {
    out.exit_code = 1;
    out.error_text = e.what();
    return out;
  }
  if (!config.out_path.empty()) write_file(config.out_path, out.report_text);
  return out;
}

}  // namespace miranda
