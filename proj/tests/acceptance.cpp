// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run via ctest or directly; total budget is dominated by the
// 300-map parity sweep of criterion 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "map_gen.hpp"
#include "miranda/linalg.hpp"
#include "miranda/oracle.hpp"
#include "miranda/report.hpp"
#include "miranda/solver.hpp"

using namespace miranda;
using nlohmann::json;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %d. %s: %s\n", ok ? "PASS" : "FAIL", index, name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

double pairing_distance(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b) {
  double worst = 0.0;
  for (const auto& z : a) {
    double best = 1e18;
    for (const auto& e : b) best = std::min(best, dist2(z, e));
    worst = std::max(worst, best);
  }
  return worst;
}

// --- 1. Parity suite ---------------------------------------------------------

void criterion_parity_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  int solved = 0;
  int odd = 0;
  int attempted = 0;
  std::string first_failure;

  for (int n = 1; n <= 3; ++n) {
    int accepted = 0;
    for (std::uint64_t draw = 0; accepted < 100 && draw < 400; ++draw) {
      const std::uint64_t seed = mix_seed(0xACCE0001ull + static_cast<std::uint64_t>(n), draw);
      auto map = testgen::random_miranda_map(n, seed);
      if (!map) continue;
      ++accepted;
      ++attempted;
      SolveOptions opt;
      opt.epsilon = 0.05;
      opt.seed = seed;
      try {
        const ParityCertificate cert = solve(*map, Cuboid::symmetric(n), opt);
        if (cert.audit.regular) {
          ++solved;
          if (cert.parity == Parity::Odd && cert.zeros.size() % 2 == 1) ++odd;
        }
      } catch (const std::exception& e) {
        if (first_failure.empty())
          first_failure = "n=" + std::to_string(n) + " draw=" + std::to_string(draw) +
                          ": " + e.what();
      }
    }
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = attempted == 300 && solved == 300 && odd == solved && seconds < 300.0;
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "%d/300 maps solved with a regular audit, %d/%d odd, %.1f s%s%s", solved,
                odd, solved, seconds, first_failure.empty() ? "" : " | first failure: ",
                first_failure.c_str());
  report(1, "parity suite (Theorem 1 / Corollary 1)", ok, detail);
}

// --- 2. Oracle equivalence ---------------------------------------------------

void criterion_oracle_equivalence() {
  int checked = 0;
  int agreed = 0;
  double worst_pairing = 0.0;
  std::string note;

  struct Case {
    MapModel map;
    int n;
  };
  std::vector<Case> cases;
  for (int n = 1; n <= 4; ++n) cases.push_back({builtin("identity", n), n});
  cases.push_back({builtin("cubic2d"), 2});
  cases.push_back({builtin("separable_cubic", 2), 2});
  cases.push_back({builtin("loop2d"), 2});  // the cubic field map doubles as a corpus entry
  for (int n = 1; n <= 3; ++n) {
    for (std::uint64_t draw = 0; draw < 10; ++draw) {
      const std::uint64_t seed = mix_seed(0xACCE0002ull + static_cast<std::uint64_t>(n), draw);
      auto map = testgen::random_miranda_map(n, seed);
      if (map) cases.push_back({*map, n});
    }
  }

  for (const Case& c : cases) {
    ++checked;
    SolveOptions opt;
    opt.epsilon = 0.01;
    opt.seed = 11;
    const Cuboid box = Cuboid::symmetric(c.n);
    try {
      const ParityCertificate cert = solve(c.map, box, opt);
      const int grid = c.n <= 2 ? 32 : (c.n == 3 ? 12 : 8);
      const OracleResult oracle = count_zeros_grid(c.map, box, cert.q, grid);
      const double d = pairing_distance(cert.zeros, oracle.zeros);
      worst_pairing = std::max(worst_pairing, d);
      if (cert.zeros.size() == oracle.zeros.size() && d <= 1e-6) ++agreed;
      else if (note.empty())
        note = " | first mismatch: " + c.map.provenance().describe().substr(0, 60);
    } catch (const std::exception& e) {
      if (note.empty()) note = std::string(" | error: ") + e.what();
    }
  }

  char detail[256];
  std::snprintf(detail, sizeof(detail), "%d/%d cases agree, worst pairing %.2e%s", agreed,
                checked, worst_pairing, note.c_str());
  report(2, "oracle equivalence (corpus + 30 random maps)", agreed == checked, detail);
}

// --- 3. Lemma suite ----------------------------------------------------------

void criterion_lemma_suite() {
  int odd_ok = 0, even_ok = 0, loop_ok = 0;
  const Cuboid interval = Cuboid::symmetric(1);

  int odd_seen = 0, even_seen = 0;
  for (std::uint64_t draw = 0; (odd_seen < 50 || even_seen < 50) && draw < 2000; ++draw) {
    MapModel poly = testgen::random_poly_1d(mix_seed(0xACCE0003ull, draw));
    double fa, fb;
    try {
      fa = poly(std::vector<double>{-1.0})[0];
      fb = poly(std::vector<double>{1.0})[0];
    } catch (const EvalError&) {
      continue;
    }
    if (fa == 0.0 || fb == 0.0) continue;
    const bool negative_product = (fa > 0.0) != (fb > 0.0);
    if (negative_product && odd_seen >= 50) continue;
    if (!negative_product && even_seen >= 50) continue;
    try {
      const Solve1dResult r = solve_1d(poly, interval, 0.0);
      if (negative_product) {
        ++odd_seen;
        if (r.parity == Parity::Odd) ++odd_ok;
      } else {
        ++even_seen;
        if (r.parity == Parity::Even) ++even_ok;
      }
    } catch (const std::exception&) {
      // A thrown parity mismatch counts as a failure: the draw is consumed.
      if (negative_product) ++odd_seen;
      else ++even_seen;
    }
  }

  // Synthetic loops: random circles against random affine scalars (Lemma 2).
  const TraceTols tols = derive_tols(TraceControls{}, Cuboid::symmetric(2),
                                     std::vector<double>{0.0});
  for (int k = 0; k < 20; ++k) {
    SplitMix64 rng(mix_seed(0xACCE0013ull, static_cast<std::uint64_t>(k)));
    const double cx = rng.next_in(-0.3, 0.3), cy = rng.next_in(-0.3, 0.3);
    const double r = rng.next_in(0.3, 0.6);
    CurveComponent loop;
    loop.kind = ComponentKind::Loop;
    const int segments = 400;
    for (int i = 0; i <= segments; ++i) {
      const double t = 2.0 * std::numbers::pi * i / segments;
      loop.polyline.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
      loop.tangents.push_back({-std::sin(t), std::cos(t)});
    }
    loop.arc_length = 2.0 * std::numbers::pi * r;

    char expr[128];
    std::snprintf(expr, sizeof(expr), "%.17g*x1 + %.17g*x2 + %.17g",
                  rng.next_symmetric(), rng.next_symmetric(), 0.5 * rng.next_symmetric());
    try {
      const SignChangeLedger ledger = sign_changes(loop, parse_map(expr), 0.0, tols);
      if (!ledger.odd && ledger.roots.size() % 2 == 0) ++loop_ok;
    } catch (const std::exception&) {
    }
  }

  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "odd clause %d/50, even clause %d/50, synthetic loops %d/20", odd_ok,
                even_ok, loop_ok);
  report(3, "lemma suite (Lemma 1 both clauses, Lemma 2)",
         odd_ok == 50 && even_ok == 50 && loop_ok == 20, detail);
}

// --- 4. Tracer analytics -----------------------------------------------------

void criterion_tracer_analytics() {
  bool circle_ok = false, segment_ok = false;
  double circle_err = -1.0, segment_err = -1.0;
  const Cuboid square = Cuboid::symmetric(2);
  try {
    MapModel circle_map = parse_map("x1^2 + x2^2 - 0.25");
    const CurveComponent loop = trace_interior(std::vector<double>{0.5, 0.0}, circle_map,
                                               std::vector<double>{0.0}, square,
                                               TraceControls{});
    circle_err = std::abs(loop.arc_length - std::numbers::pi);
    circle_ok = loop.kind == ComponentKind::Loop && circle_err <= 1e-3;
  } catch (const std::exception&) {
  }
  try {
    MapModel reduced = reduce_map(builtin("identity", 2), 1);
    const CurveComponent seg =
        trace(std::vector<double>{0.0, -1.0}, FaceSide::Lower, reduced,
              std::vector<double>{0.0}, square, TraceControls{});
    segment_err = std::abs(seg.arc_length - 2.0);
    segment_ok = seg.kind == ComponentKind::SegmentConnecting && segment_err <= 1e-6;
  } catch (const std::exception&) {
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "circle loop |arc - pi| = %.2e (tol 1e-3), identity segment |arc - 2| = "
                "%.2e (tol 1e-6)",
                circle_err, segment_err);
  report(4, "tracer analytics", circle_ok && segment_ok, detail);
}

// --- 5. Known-count checks ---------------------------------------------------

void criterion_known_counts() {
  bool cubic_ok = false, sep_ok = false;
  double worst = 0.0;
  SolveOptions opt;
  opt.epsilon = 1e-7;
  opt.seed = 2;
  try {
    const ParityCertificate cert = solve(builtin("cubic2d"), Cuboid::symmetric(2), opt);
    const std::vector<std::vector<double>> expected{{-0.5, 0.0}, {0.0, 0.0}, {0.5, 0.0}};
    const double d = pairing_distance(cert.zeros, expected);
    worst = std::max(worst, d);
    cubic_ok = cert.zeros.size() == 3 && d <= 1e-6;
  } catch (const std::exception&) {
  }
  try {
    const ParityCertificate cert =
        solve(builtin("separable_cubic", 2), Cuboid::symmetric(2), opt);
    std::vector<std::vector<double>> expected;
    for (double a : {-0.5, 0.0, 0.5})
      for (double b : {-0.5, 0.0, 0.5}) expected.push_back({a, b});
    const double d = pairing_distance(cert.zeros, expected);
    worst = std::max(worst, d);
    sep_ok = cert.zeros.size() == 9 && d <= 1e-6;
  } catch (const std::exception&) {
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "cubic2d 3 zeros, separable_cubic 9 zeros, worst offset %.2e (tol 1e-6)",
                worst);
  report(5, "known-count checks", cubic_ok && sep_ok, detail);
}

// --- 6. Theorem 2 ------------------------------------------------------------

void criterion_theorem2() {
  bool identity_ok = false, cubic_ok = false, inward_ok = false;
  SolveOptions opt;
  opt.epsilon = 0.01;
  opt.seed = 4;
  const Cuboid square = Cuboid::symmetric(2);
  try {
    const FieldReport r = solve_field(builtin("identity", 2), square, opt);
    identity_ok = r.outward && r.certificate && r.certificate->zeros.size() == 1;
  } catch (const std::exception&) {
  }
  try {
    const FieldReport r = solve_field(builtin("cubic2d"), square, opt);
    cubic_ok = r.outward && r.certificate && r.certificate->zeros.size() == 3;
  } catch (const std::exception&) {
  }
  try {
    const FieldReport r = solve_field(negate_map(builtin("identity", 2)), square, opt);
    inward_ok = !r.outward && !r.inward_witness.empty();
  } catch (const std::exception&) {
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "identity field 1 zero: %s, cubic field 3 zeros: %s, inward witness: %s",
                identity_ok ? "yes" : "no", cubic_ok ? "yes" : "no",
                inward_ok ? "yes" : "no");
  report(6, "outward vector fields (Theorem 2)", identity_ok && cubic_ok && inward_ok,
         detail);
}

// --- 7. Continuous pipeline --------------------------------------------------

void criterion_continuous_pipeline() {
  bool ok = false;
  char detail[256];
  std::snprintf(detail, sizeof(detail), "pipeline failed");
  try {
    SolveOptions opt;
    const std::vector<int> schedule{4, 8, 16, 32, 64};
    const ContinuousSolveResult r =
        solve_continuous(builtin("nonsmooth_abs"), Cuboid::symmetric(2), schedule, opt);
    const bool triangle =
        r.residual_norm <= r.term_smoothing + r.term_solve + r.term_c + 1e-12;
    ok = r.degree_used <= 64 && r.residual_norm <= 1e-3 && triangle;
    std::snprintf(detail, sizeof(detail),
                  "degree %d, ||f(x*)|| = %.2e (tol 1e-3), triangle slack %.2e",
                  r.degree_used, r.residual_norm,
                  r.term_smoothing + r.term_solve + r.term_c - r.residual_norm);
  } catch (const std::exception& e) {
    std::snprintf(detail, sizeof(detail), "error: %s", e.what());
  }
  report(7, "continuous-map pipeline (smoothing)", ok, detail);
}

// --- 8. Determinism ----------------------------------------------------------

void criterion_determinism() {
  int checked = 0, identical = 0;
  auto check = [&](const RunConfig& config) {
    ++checked;
    const CommandOutcome a = run_command(config);
    const CommandOutcome b = run_command(config);
    if (a.report_text == b.report_text && a.exit_code == b.exit_code) ++identical;
  };

  RunConfig solve_cfg;
  solve_cfg.command = "solve";
  solve_cfg.map_name = "cubic2d";
  solve_cfg.seed = 9;
  check(solve_cfg);
  solve_cfg.map_name = "separable_cubic";
  solve_cfg.dim = 2;
  check(solve_cfg);
  solve_cfg.map_name = "nonsmooth_abs";
  solve_cfg.dim = 0;
  check(solve_cfg);

  RunConfig check_cfg;
  check_cfg.command = "check";
  check_cfg.map_name = "loop2d";
  check(check_cfg);

  RunConfig field_cfg;
  field_cfg.command = "field";
  field_cfg.map_name = "identity";
  field_cfg.dim = 3;
  check(field_cfg);

  RunConfig compare_cfg;
  compare_cfg.command = "compare";
  compare_cfg.map_name = "cubic2d";
  check(compare_cfg);

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "miranda_acceptance_trace";
  fs::remove_all(dir);
  fs::create_directories(dir);
  RunConfig trace_cfg;
  trace_cfg.command = "trace";
  trace_cfg.map_name = "loop2d";
  trace_cfg.csv_prefix = (dir / "t").string();
  trace_cfg.svg_path = (dir / "t.svg").string();
  check(trace_cfg);
  fs::remove_all(dir);

  char detail[96];
  std::snprintf(detail, sizeof(detail), "%d/%d command pairs byte-identical", identical,
                checked);
  report(8, "determinism of reports", identical == checked, detail);
}

// --- 9. Figure reproduction --------------------------------------------------

void criterion_figure() {
  bool ok = false;
  char detail[256];
  std::snprintf(detail, sizeof(detail), "trace failed");
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "miranda_acceptance_figure";
  fs::remove_all(dir);
  fs::create_directories(dir);
  try {
    RunConfig config;
    config.command = "trace";
    config.map_name = "cubic2d";
    config.csv_prefix = (dir / "fig").string();
    config.svg_path = (dir / "fig.svg").string();
    const CommandOutcome out = run_command(config);
    if (out.exit_code == 0) {
      const json r = json::parse(out.report_text);
      int connecting = 0;
      double worst = 1e18;
      const double boundary_tol = 1e-8 * Cuboid::symmetric(2).diameter();
      for (const auto& comp : r["components"]) {
        if (comp["kind"] != "segment_connecting") continue;
        ++connecting;
        worst = 0.0;
        for (const char* key : {"endpoint_first", "endpoint_last"}) {
          const std::vector<double> ep = comp[key].get<std::vector<double>>();
          double best = 1e18;
          for (const auto& s : r["boundary_starts"]) {
            const std::vector<double> sp = s["point"].get<std::vector<double>>();
            best = std::min(best, dist2(ep, sp));
          }
          worst = std::max(worst, best);
        }
      }
      const bool svg_ok = fs::exists(config.svg_path) && fs::file_size(config.svg_path) > 0;
      ok = connecting == 1 && worst <= boundary_tol && svg_ok;
      std::snprintf(detail, sizeof(detail),
                    "%d connecting component, endpoint-to-start offset %.2e (tol %.2e), "
                    "svg %s",
                    connecting, worst, boundary_tol, svg_ok ? "written" : "missing");
    }
  } catch (const std::exception& e) {
    std::snprintf(detail, sizeof(detail), "error: %s", e.what());
  }
  fs::remove_all(dir);
  report(9, "figure reproduction (level-set export)", ok, detail);
}

}  // namespace

int main() {
  criterion_parity_suite();
  criterion_oracle_equivalence();
  criterion_lemma_suite();
  criterion_tracer_analytics();
  criterion_known_counts();
  criterion_theorem2();
  criterion_continuous_pipeline();
  criterion_determinism();
  criterion_figure();
  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
