#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "miranda/builtins.hpp"
#include "miranda/linalg.hpp"
#include "miranda/oracle.hpp"
#include "miranda/solver.hpp"

using namespace miranda;

namespace {

double match_distance(const std::vector<std::vector<double>>& zeros,
                      const std::vector<std::vector<double>>& expected) {
  REQUIRE(zeros.size() == expected.size());
  double worst = 0.0;
  for (const auto& z : zeros) {
    double best = 1e18;
    for (const auto& e : expected) best = std::min(best, dist2(z, e));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("solve_1d isolates roots and classifies parity by endpoint signs") {
  const Cuboid interval = Cuboid::symmetric(1);
  SUBCASE("f(x) = x has the single root 0") {
    const Solve1dResult r = solve_1d(parse_map("x1"), interval, 0.0);
    REQUIRE(r.roots.size() == 1);
    CHECK(std::abs(r.roots[0]) <= 1e-12);
    CHECK(r.parity == Parity::Odd);
    CHECK(r.endpoint_product_negative);
  }
  SUBCASE("f(x) = x(x^2 - 0.25) has roots {-0.5, 0, 0.5}") {
    const Solve1dResult r = solve_1d(parse_map("x1*(x1^2 - 0.25)"), interval, 0.0);
    REQUIRE(r.roots.size() == 3);
    CHECK(r.roots[0] == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(r.roots[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.roots[2] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.parity == Parity::Odd);
  }
  SUBCASE("f(x) = x^2 - 0.25 violates the boundary condition but keeps even parity") {
    const Solve1dResult r = solve_1d(parse_map("x1^2 - 0.25"), interval, 0.0);
    REQUIRE(r.roots.size() == 2);
    CHECK(r.roots[0] == doctest::Approx(-0.5));
    CHECK(r.roots[1] == doctest::Approx(0.5));
    CHECK(r.parity == Parity::Even);
    CHECK(!r.endpoint_product_negative);
  }
  SUBCASE("a target beyond the endpoint values is caught by the margin guard") {
    CHECK_THROWS_AS(solve_1d(parse_map("x1"), interval, 1.0), SolveError);
  }
}

TEST_CASE("solve on the identity recovers the proposed q as its lone zero") {
  SolveOptions opt;
  opt.epsilon = 0.1;
  const ParityCertificate cert = solve(builtin("identity", 3), Cuboid::symmetric(3), opt);
  CHECK(cert.parity == Parity::Odd);
  REQUIRE(cert.zeros.size() == 1);
  CHECK(dist2(cert.zeros[0], cert.q) <= 1e-7);
  CHECK(cert.audit.regular);
}

TEST_CASE("solve on cubic2d finds the three zeros near the unperturbed ones") {
  SolveOptions opt;
  opt.epsilon = 1e-7;
  opt.seed = 5;
  const ParityCertificate cert = solve(builtin("cubic2d"), Cuboid::symmetric(2), opt);
  CHECK(cert.parity == Parity::Odd);
  CHECK(match_distance(cert.zeros, {{-0.5, 0.0}, {0.0, 0.0}, {0.5, 0.0}}) <= 1e-6);
}

TEST_CASE("solve on separable_cubic finds all nine zeros") {
  SolveOptions opt;
  opt.epsilon = 1e-7;
  const ParityCertificate cert =
      solve(builtin("separable_cubic", 2), Cuboid::symmetric(2), opt);
  std::vector<std::vector<double>> expected;
  for (double a : {-0.5, 0.0, 0.5})
    for (double b : {-0.5, 0.0, 0.5}) expected.push_back({a, b});
  CHECK(match_distance(cert.zeros, expected) <= 1e-6);
}

TEST_CASE("interior loop zeros need the grid supplement; parity holds either way") {
  SolveOptions opt;
  opt.epsilon = 1e-7;
  SUBCASE("supplement on: all three zeros") {
    opt.grid_supplement = true;
    const ParityCertificate cert = solve(builtin("loop2d"), Cuboid::symmetric(2), opt);
    CHECK(cert.zeros.size() == 3);
    CHECK(cert.grid_supplemented);
    CHECK(match_distance(cert.zeros, {{0.0, 0.0}, {0.1, 0.0}, {0.5, 0.0}}) <= 1e-6);
  }
  SUBCASE("supplement off: the boundary-connected zero only, still odd") {
    opt.grid_supplement = false;
    const ParityCertificate cert = solve(builtin("loop2d"), Cuboid::symmetric(2), opt);
    CHECK(cert.zeros.size() == 1);
    CHECK(!cert.grid_supplemented);
    CHECK(cert.parity == Parity::Odd);
  }
}

TEST_CASE("certificates are deterministic and carry the invariants") {
  SolveOptions opt;
  opt.epsilon = 0.05;
  opt.seed = 1234;
  const Cuboid box = Cuboid::symmetric(2);
  const ParityCertificate a = solve(builtin("cubic2d"), box, opt);
  const ParityCertificate b = solve(builtin("cubic2d"), box, opt);

  REQUIRE(a.zeros.size() == b.zeros.size());
  for (std::size_t i = 0; i < a.zeros.size(); ++i) CHECK(a.zeros[i] == b.zeros[i]);
  CHECK(a.q == b.q);

  for (std::size_t i = 0; i < a.zeros.size(); ++i) {
    CHECK(a.residuals[i] <= a.tolerances.zero_tol);          // zero residual bound
    CHECK(box.face_distance(a.zeros[i]) > a.tolerances.boundary_tol);  // interiority
  }
  for (const ComponentRecord& c : a.components) {
    const bool expect_odd = c.kind == ComponentKind::SegmentConnecting;
    CHECK(c.odd == expect_odd);
  }
}

TEST_CASE("solve refuses maps with abs nodes") {
  CHECK_THROWS_AS(solve(builtin("nonsmooth_abs"), Cuboid::symmetric(2), SolveOptions{}),
                  SolveError);
}

TEST_CASE("axis permutation leaves the zero set unchanged") {
  SolveOptions opt;
  opt.epsilon = 1e-7;
  opt.seed = 3;
  const Cuboid box = Cuboid::symmetric(2);
  const ParityCertificate plain = solve(builtin("cubic2d"), box, opt);
  opt.axis_permutation = {1, 0};
  const ParityCertificate permuted = solve(builtin("cubic2d"), box, opt);
  REQUIRE(plain.zeros.size() == permuted.zeros.size());
  for (std::size_t i = 0; i < plain.zeros.size(); ++i)
    CHECK(dist2(plain.zeros[i], permuted.zeros[i]) <= 2e-6);
}

TEST_CASE("solve_field accepts outward fields and rejects inward ones") {
  SolveOptions opt;
  opt.epsilon = 0.01;
  SUBCASE("identity field: one equilibrium") {
    const FieldReport r = solve_field(builtin("identity", 2), Cuboid::symmetric(2), opt);
    CHECK(r.outward);
    REQUIRE(r.certificate.has_value());
    CHECK(r.certificate->zeros.size() == 1);
    CHECK(r.certificate->parity == Parity::Odd);
    // Outwardness implies the boundary condition with the fixed orientation.
    CHECK(r.derived_boundary.pass());
    for (const AxisVerdict& v : r.derived_boundary.axes)
      CHECK(v.orientation == AxisOrientation::NegativeLower);
  }
  SUBCASE("negated identity: inwardness witness, no certificate") {
    const FieldReport r = solve_field(negate_map(builtin("identity", 2)),
                                      Cuboid::symmetric(2), opt);
    CHECK(!r.outward);
    CHECK(!r.certificate.has_value());
    REQUIRE(!r.inward_witness.empty());
    // The witness actually violates outwardness at its face.
    const double v = r.inward_value;
    CHECK((r.inward_side == FaceSide::Lower ? v >= 0.0 : v <= 0.0));
  }
  SUBCASE("cubic field: v1 is within [0.65, 0.85] on the x1 = 1 face, three zeros") {
    const FieldReport r = solve_field(builtin("cubic2d"), Cuboid::symmetric(2), opt);
    CHECK(r.outward);
    REQUIRE(r.certificate.has_value());
    CHECK(r.certificate->zeros.size() == 3);
  }
}

TEST_CASE("scaling a field by 2 changes neither the zero set nor the parity") {
  SolveOptions opt;
  opt.epsilon = 1e-7;
  opt.seed = 21;
  const Cuboid box = Cuboid::symmetric(2);
  const FieldReport a = solve_field(builtin("cubic2d"), box, opt);
  const FieldReport b = solve_field(scale_map(builtin("cubic2d"), 2.0), box, opt);
  REQUIRE(a.certificate.has_value());
  REQUIRE(b.certificate.has_value());
  REQUIRE(a.certificate->zeros.size() == b.certificate->zeros.size());
  const double dedup = 1e-6 * box.diameter();
  for (std::size_t i = 0; i < a.certificate->zeros.size(); ++i)
    CHECK(dist2(a.certificate->zeros[i], b.certificate->zeros[i]) <= dedup);
  CHECK(a.certificate->parity == b.certificate->parity);
}

TEST_CASE("solve_continuous on the nonsmooth corpus map") {
  SolveOptions opt;
  const std::vector<int> schedule{4, 8, 16, 32, 64};
  const ContinuousSolveResult r =
      solve_continuous(builtin("nonsmooth_abs"), Cuboid::symmetric(2), schedule, opt);
  CHECK(r.degree_used <= 64);
  CHECK(std::abs(r.x_star[0] - 0.15) <= 1e-3);
  CHECK(std::abs(r.x_star[1]) <= 1e-3);
  CHECK(r.residual_norm <= 1e-3);
  // Triangle inequality on the reported decomposition.
  CHECK(r.residual_norm <= r.term_smoothing + r.term_solve + r.term_c + 1e-12);
}

TEST_CASE("routing a smooth map through the continuous pipeline agrees with solve") {
  SolveOptions opt;
  opt.epsilon = 1e-3;
  opt.seed = 9;
  const Cuboid box = Cuboid::symmetric(2);
  const ParityCertificate direct = solve(builtin("cubic2d"), box, opt);
  const std::vector<int> schedule{4, 8, 16, 32, 64};
  const ContinuousSolveResult via =
      solve_continuous(builtin("cubic2d"), box, schedule, opt);
  CHECK(via.smooth_certificate.zeros.size() == direct.zeros.size());
  // Positions agree within the measured smoothing error bound (loosened by the
  // local conditioning of the zeros).
  const double bound = 20.0 * via.measured_sup_error + 1e-6;
  for (const auto& z : via.smooth_certificate.zeros) {
    double best = 1e18;
    for (const auto& d : direct.zeros) best = std::min(best, dist2(z, d));
    CHECK(best <= bound);
  }
}

TEST_CASE("solve_continuous handles the steep-but-smooth degree schedule test") {
  SolveOptions opt;
  const std::vector<int> schedule{4, 8, 16, 32, 64};
  const ContinuousSolveResult r =
      solve_continuous(builtin("tanh_steep"), Cuboid::symmetric(2), schedule, opt);
  CHECK(norm2(r.x_star) <= 0.05);
  CHECK(r.residual_norm <= 1e-3);
}

TEST_CASE("oracle equivalence on the corpus") {
  SolveOptions opt;
  opt.epsilon = 0.01;
  opt.seed = 31;
  for (const std::string& name : {"cubic2d", "separable_cubic", "loop2d"}) {
    const Cuboid box = Cuboid::symmetric(2);
    const ParityCertificate cert = solve(builtin(name, 2), box, opt);
    const OracleResult oracle = count_zeros_grid(builtin(name, 2), box, cert.q, 32);
    REQUIRE(cert.zeros.size() == oracle.zeros.size());
    CHECK(match_distance(cert.zeros, oracle.zeros) <= 1e-6);
  }
}
