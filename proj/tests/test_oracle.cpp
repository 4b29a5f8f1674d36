#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "miranda/builtins.hpp"
#include "miranda/oracle.hpp"

using namespace miranda;

namespace {
const std::vector<double> kZero2{0.0, 0.0};
}

TEST_CASE("identity has exactly the origin") {
  const OracleResult r =
      count_zeros_grid(builtin("identity", 2), Cuboid::symmetric(2), kZero2, 16);
  REQUIRE(r.zeros.size() == 1);
  CHECK(std::abs(r.zeros[0][0]) <= 1e-12);
  CHECK(std::abs(r.zeros[0][1]) <= 1e-12);
  CHECK(r.basins_explored == 16 * 16);
}

TEST_CASE("cubic2d has three zeros matching the analytic factorization") {
  const OracleResult r =
      count_zeros_grid(builtin("cubic2d"), Cuboid::symmetric(2), kZero2, 32);
  REQUIRE(r.zeros.size() == 3);
  // x2 = 0 and x1 (x1^2 - 0.25) = 0
  CHECK(std::abs(r.zeros[0][0] + 0.5) <= 1e-8);
  CHECK(std::abs(r.zeros[1][0]) <= 1e-8);
  CHECK(std::abs(r.zeros[2][0] - 0.5) <= 1e-8);
  for (const auto& z : r.zeros) CHECK(std::abs(z[1]) <= 1e-8);
}

TEST_CASE("separable_cubic has nine zeros") {
  const OracleResult r =
      count_zeros_grid(builtin("separable_cubic", 2), Cuboid::symmetric(2), kZero2, 32);
  CHECK(r.zeros.size() == 9);
}

TEST_CASE("doubling the grid never loses zeros on the corpus") {
  for (const std::string& name : {"cubic2d", "separable_cubic", "loop2d"}) {
    const OracleResult coarse =
        count_zeros_grid(builtin(name, 2), Cuboid::symmetric(2), kZero2, 16);
    const OracleResult fine =
        count_zeros_grid(builtin(name, 2), Cuboid::symmetric(2), kZero2, 32);
    CHECK(fine.zeros.size() >= coarse.zeros.size());
  }
}

TEST_CASE("corpus maps with the boundary condition have odd oracle counts") {
  for (const std::string& name : {"identity", "cubic2d", "separable_cubic", "loop2d"}) {
    const OracleResult r =
        count_zeros_grid(builtin(name, 2), Cuboid::symmetric(2), kZero2, 24);
    CHECK(r.zeros.size() % 2 == 1);
  }
}

TEST_CASE("cost guards") {
  CHECK_THROWS(count_zeros_grid(builtin("identity", 5), Cuboid::symmetric(5),
                                std::vector<double>(5, 0.0), 8));
  CHECK_THROWS(count_zeros_grid(builtin("identity", 2), Cuboid::symmetric(2), kZero2, 1));
}

TEST_CASE("scan_1d brackets sign changes") {
  const Cuboid interval = Cuboid::symmetric(1);
  SUBCASE("f(x) = x with 10 cells: one bracket containing 0") {
    const auto brackets = scan_1d(parse_map("x1"), interval, 0.0, 10);
    REQUIRE(brackets.size() == 1);
    CHECK(brackets[0].first < 0.0);
    CHECK(brackets[0].second > 0.0);
  }
  SUBCASE("the cubic has three brackets at 1024 cells") {
    const auto brackets = scan_1d(parse_map("x1*(x1^2 - 0.25)"), interval, 0.0, 1024);
    CHECK(brackets.size() == 3);
  }
  SUBCASE("x^2 + 1 has none") {
    CHECK(scan_1d(parse_map("x1^2 + 1"), interval, 0.0, 1024).empty());
  }
  SUBCASE("an exact node hit is healed by the deterministic jitter") {
    // f(x) = x with an even cell count puts a node exactly at the root.
    const auto brackets = scan_1d(parse_map("x1"), interval, 0.0, 8);
    REQUIRE(brackets.size() == 1);
    CHECK(brackets[0].first < 0.0);
    CHECK(brackets[0].second > 0.0);
  }
}
