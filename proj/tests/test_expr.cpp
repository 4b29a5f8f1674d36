#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "miranda/bernstein.hpp"
#include "miranda/builtins.hpp"
#include "miranda/map_model.hpp"
#include "miranda/rng.hpp"

using namespace miranda;

TEST_CASE("parse_map evaluates the arithmetic meaning of the text") {
  MapModel m = parse_map("x1^3 - 0.25*x1 + 0.1*x2 ; x2");
  CHECK(m.n_in() == 2);
  CHECK(m.n_out() == 2);
  const std::vector<double> out = m(std::vector<double>{1.0, 1.0});
  CHECK(out[0] == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(out[1] == 1.0);
}

TEST_CASE("semicolons separate components; identity on 3 variables") {
  MapModel m = parse_map("x1 ; x2 ; x3");
  CHECK(m.n_in() == 3);
  CHECK(m.n_out() == 3);
  const std::vector<double> x{0.3, -0.7, 0.2};
  CHECK(m(x) == x);
}

TEST_CASE("unknown identifiers are parse errors with a position") {
  CHECK_THROWS_AS(parse_map("x1 + y"), ParseError);
  CHECK_THROWS_AS(parse_map("x1 +"), ParseError);
  CHECK_THROWS_AS(parse_map("sin x1"), ParseError);
  CHECK_THROWS_AS(parse_map("x0"), ParseError);
}

TEST_CASE("division by zero is reported at evaluation, not parse") {
  MapModel m = parse_map("1/x1");
  CHECK_THROWS_AS(m(std::vector<double>{0.0}), EvalError);
  CHECK(m(std::vector<double>{2.0})[0] == 0.5);
}

TEST_CASE("products and powers") {
  CHECK(parse_map("x1*x2")(std::vector<double>{2.0, 3.0})[0] == 6.0);
  // ^ binds tighter than unary minus
  CHECK(parse_map("-x1^2")(std::vector<double>{2.0})[0] == -4.0);
  CHECK(parse_map("(-x1)^2")(std::vector<double>{2.0})[0] == 4.0);
  CHECK(parse_map("x1^0")(std::vector<double>{0.0})[0] == 1.0);
}

TEST_CASE("jacobian of the identity is the identity matrix") {
  MapModel m = parse_map("x1 ; x2");
  const JacobianEvaluation je = jacobian(m, std::vector<double>{0.4, -0.9});
  CHECK(je.entry(0, 0) == 1.0);
  CHECK(je.entry(0, 1) == 0.0);
  CHECK(je.entry(1, 0) == 0.0);
  CHECK(je.entry(1, 1) == 1.0);
}

TEST_CASE("jacobian matches hand differentiation") {
  MapModel m = parse_map("x1^2 ; x1*x2");
  const JacobianEvaluation je = jacobian(m, std::vector<double>{1.0, 2.0});
  CHECK(je.entry(0, 0) == doctest::Approx(2.0));
  CHECK(je.entry(0, 1) == 0.0);
  CHECK(je.entry(1, 0) == doctest::Approx(2.0));
  CHECK(je.entry(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("forward duals agree with central differences on the smooth corpus") {
  JacobianMethod central;
  central.kind = JacobianMethod::Kind::CentralDifference;
  central.step = 1e-5;

  for (const std::string& name : {"identity", "cubic2d", "separable_cubic", "tanh_steep",
                                  "loop2d", "scaled_identity"}) {
    MapModel m = builtin(name, 2);
    SplitMix64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> x{rng.next_symmetric() * 0.9, rng.next_symmetric() * 0.9};
      const JacobianEvaluation a = jacobian(m, x);
      const JacobianEvaluation b = jacobian(m, x, central);
      for (int r = 0; r < a.rows; ++r) {
        for (int c = 0; c < a.cols; ++c) {
          const double scale = std::max(1.0, std::abs(a.entry(r, c)));
          CHECK(std::abs(a.entry(r, c) - b.entry(r, c)) / scale <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("parse-print round trip evaluates bit-identically at 100 random points") {
  const std::vector<std::string> sources = {
      "x1^3 - 0.25*x1 + 0.1*x2 ; x2",
      "sin(x1)*cos(x2) + exp(x1/3) - tanh(x2) ; abs(x1) - 0.5/x2",
      "-x1^2 + (x2 - 0.125)^3 ; x1*x2*x1",
  };
  for (const std::string& src : sources) {
    const std::vector<ExprPtr> original = parse_map_text(src);
    const std::string printed = map_to_text(original);
    const std::vector<ExprPtr> reparsed = parse_map_text(printed);
    REQUIRE(original.size() == reparsed.size());

    SplitMix64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x{rng.next_in(0.1, 1.0), rng.next_in(0.1, 1.0)};
      for (std::size_t c = 0; c < original.size(); ++c) {
        const double a = eval_expr(*original[c], std::span<const double>(x));
        const double b = eval_expr(*reparsed[c], std::span<const double>(x));
        CHECK(a == b);  // bit-identical
      }
    }
  }
}

TEST_CASE("abs marks a map non-smooth") {
  CHECK(!builtin("nonsmooth_abs").smooth());
  CHECK(builtin("cubic2d").smooth());
  CHECK(parse_map("abs(x1) ; x2").smooth() == false);
}

TEST_CASE("builtin corpus definitions") {
  CHECK(builtin("identity", 3)(std::vector<double>{1.0, 2.0, 3.0}) ==
        std::vector<double>{1.0, 2.0, 3.0});
  CHECK(builtin("scaled_identity", 1)(std::vector<double>{0.5})[0] == 1.0);
  // cubic2d zeros: x2 = 0, x1 in {-0.5, 0, 0.5}
  MapModel cubic = builtin("cubic2d");
  for (double r : {-0.5, 0.0, 0.5}) {
    const std::vector<double> v = cubic(std::vector<double>{r, 0.0});
    CHECK(std::abs(v[0]) <= 1e-15);
    CHECK(v[1] == 0.0);
  }
  MapModel sep = builtin("separable_cubic", 2);
  const std::vector<double> v = sep(std::vector<double>{0.5, -0.5});
  CHECK(std::abs(v[0]) <= 1e-15);
  CHECK(std::abs(v[1]) <= 1e-15);
  CHECK_THROWS(builtin("no_such_map", 2));
  CHECK_THROWS(builtin("cubic2d", 3));
}

TEST_CASE("map adapters: reduce, restrict, component, permute") {
  MapModel m = builtin("cubic2d");
  MapModel f1 = reduce_map(m, 1);
  CHECK(f1.n_out() == 1);
  CHECK(f1(std::vector<double>{1.0, 1.0})[0] == doctest::Approx(0.85));

  MapModel edge = restrict_map(f1, 1, -1.0);  // f1 on the bottom edge
  CHECK(edge.n_in() == 1);
  CHECK(edge(std::vector<double>{1.0})[0] == doctest::Approx(0.65));

  MapModel f2 = component_map(m, 1);
  CHECK(f2(std::vector<double>{0.3, 0.7})[0] == doctest::Approx(0.7));

  MapModel swapped = permute_map(m, {1, 0});
  const std::vector<double> y{0.7, 0.3};  // y = (x2, x1)
  const std::vector<double> g = swapped(y);
  const std::vector<double> f = m(std::vector<double>{0.3, 0.7});
  CHECK(g[0] == f[1]);
  CHECK(g[1] == f[0]);
}

TEST_CASE("bernstein reproduces affine maps to rounding") {
  MapModel affine = parse_map("2*x1 + 1");
  const Cuboid box({0.0}, {1.0});
  for (int degree : {1, 3, 8}) {
    const BernsteinBuild build = bernstein_approximate(affine, box, degree, 101);
    CHECK(build.measured_sup_error <= 1e-12);
  }
}

TEST_CASE("bernstein reproduces constants exactly") {
  Provenance prov{Provenance::Kind::Parsed, "0.375 ; 0.375", 0};
  MapModel constant = make_expr_map(parse_map_text("0.375 ; 0.375"), 2, prov);
  const Cuboid box = Cuboid::symmetric(2);
  const BernsteinBuild build = bernstein_approximate(constant, box, 4, 41);
  CHECK(build.measured_sup_error <= 1e-14);
}

TEST_CASE("bernstein interpolates the source at cuboid vertices") {
  MapModel m = builtin("cubic2d");
  const Cuboid box = Cuboid::symmetric(2);
  const BernsteinBuild build = bernstein_approximate(m, box, 6, 11);
  for (double x1 : {-1.0, 1.0}) {
    for (double x2 : {-1.0, 1.0}) {
      const std::vector<double> corner{x1, x2};
      const std::vector<double> a = build.approximant(corner);
      const std::vector<double> b = m(corner);
      CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-14));
      CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-14));
    }
  }
}

TEST_CASE("bernstein error on the nonsmooth corpus map shrinks with degree") {
  MapModel m = builtin("nonsmooth_abs");
  const Cuboid box = Cuboid::symmetric(2);
  const BernsteinBuild deg8 = bernstein_approximate(m, box, 8, 101);
  const BernsteinBuild deg64 = bernstein_approximate(m, box, 64, 101);
  CHECK(deg64.measured_sup_error < 0.05);
  CHECK(deg64.measured_sup_error <= deg8.measured_sup_error + 1e-12);
}

TEST_CASE("bernstein_smooth enforces the eta budget") {
  SmoothingRequest request;
  request.source = builtin("nonsmooth_abs");
  request.degree = 8;
  request.eta = 1e-6;  // unreachable at degree 8
  CHECK_THROWS_AS(bernstein_smooth(request, Cuboid::symmetric(2)), SolveError);

  request.eta = 10.0;
  double measured = 0.0;
  MapModel smooth = bernstein_smooth(request, Cuboid::symmetric(2), &measured);
  CHECK(smooth.smooth());
  CHECK(measured > 0.0);
  CHECK(measured <= 5.0);
}

TEST_CASE("bernstein approximants inherit the boundary condition from the source") {
  // The face restriction of the approximant is a convex combination of
  // same-signed source face values, so the sign condition survives smoothing
  // even at very low degree.
  const Cuboid box = Cuboid::symmetric(2);
  for (const std::string& name : {"nonsmooth_abs", "cubic2d", "loop2d"}) {
    MapModel source = builtin(name);
    REQUIRE(check_miranda(source, box).pass());
    for (int degree : {2, 5}) {
      const BernsteinBuild build = bernstein_approximate(source, box, degree, 33);
      CHECK(check_miranda(build.approximant, box).pass());
    }
  }
}

TEST_CASE("evaluation reports non-finite results") {
  MapModel m = parse_map("exp(x1)");
  CHECK_THROWS_AS(m(std::vector<double>{1e6}), EvalError);
}
