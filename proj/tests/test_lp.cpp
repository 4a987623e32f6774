#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lp.hpp"
#include "oracles.hpp"

using namespace ubw1;

TEST_CASE("one-variable maximization") {
  LinearProgram lp(1);
  lp.c[0] = -1.0;  // max x == min -x
  lp.add_row({1.0}, Sense::le, 3.0);
  auto r = lp_solve(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.objective == doctest::Approx(-3.0));
}

TEST_CASE("degenerate equality-only feasible point") {
  LinearProgram lp(2);
  lp.c = {1.0, 2.0};
  lp.add_row({1.0, 0.0}, Sense::eq, 0.0);
  lp.add_row({0.0, 1.0}, Sense::eq, 0.0);
  auto r = lp_solve(lp);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.x[0] == doctest::Approx(0.0));
  CHECK(r.x[1] == doctest::Approx(0.0));
}

TEST_CASE("infeasible and unbounded detection") {
  {
    LinearProgram lp(1);
    lp.add_row({1.0}, Sense::ge, 2.0);
    lp.add_row({1.0}, Sense::le, 1.0);
    CHECK(lp_solve(lp).status == LpStatus::infeasible);
  }
  {
    LinearProgram lp(1);
    lp.c[0] = -1.0;
    lp.add_row({-1.0}, Sense::le, 1.0);
    CHECK(lp_solve(lp).status == LpStatus::unbounded);
  }
}

TEST_CASE("variable bounds: shifts, uppers, free splits") {
  {
    LinearProgram lp(1);
    lp.c[0] = 1.0;
    lp.lo[0] = -5.0;
    lp.hi[0] = 7.0;
    lp.add_row({1.0}, Sense::le, 100.0);
    auto r = lp_solve(lp);
    CHECK(r.x[0] == doctest::Approx(-5.0));
  }
  {
    LinearProgram lp(2);
    lp.c = {1.0, 0.0};
    lp.lo[0] = -kInf;  // free variable
    lp.add_row({1.0, 1.0}, Sense::eq, 2.0);
    lp.add_row({1.0, -1.0}, Sense::ge, -10.0);
    auto r = lp_solve(lp);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.x[0] == doctest::Approx(-4.0));
    CHECK(r.x[1] == doctest::Approx(6.0));
  }
}

TEST_CASE("random 6x8 instances match vertex enumeration") {
  for (int seed = 0; seed < 25; ++seed) {
    Xoshiro rng(900 + seed);
    int m = 6, n = 8;
    std::vector<double> c(n), b(m);
    std::vector<std::vector<double>> A(m, std::vector<double>(n));
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    for (auto& v : b) v = rng.uniform(0.2, 2.0);  // x = 0 feasible
    for (auto& row : A)
      for (auto& v : row) v = rng.uniform(-1.0, 1.0);
    LinearProgram lp(n);
    lp.c = c;
    for (int i = 0; i < m; ++i) lp.add_row(A[i], Sense::le, b[i]);
    auto r = lp_solve(lp);
    double want = oracle::lp_vertex_enumeration(c, A, b);
    if (!is_finite(want)) continue;  // enumeration found no finite optimum
    if (r.status != LpStatus::optimal) {
      CHECK(r.status == LpStatus::unbounded);
      continue;
    }
    CHECK(r.objective == doctest::Approx(want).epsilon(1e-8));

    // primal feasibility, dual feasibility, complementary slackness
    for (int i = 0; i < m; ++i) {
      double ax = 0;
      for (int j = 0; j < n; ++j) ax += A[i][j] * r.x[j];
      CHECK(ax <= b[i] + 1e-9);
      CHECK(r.duals[i] * (ax - b[i]) == doctest::Approx(0.0).epsilon(1e-8));
    }
    for (int j = 0; j < n; ++j) {
      double ya = 0;
      for (int i = 0; i < m; ++i) ya += r.duals[i] * A[i][j];
      CHECK(ya <= c[j] + 1e-9);  // y.A <= c for a min problem with x >= 0
      CHECK(r.x[j] * (c[j] - ya) == doctest::Approx(0.0).epsilon(1e-8));
    }
    // strong duality
    double yb = 0;
    for (int i = 0; i < m; ++i) yb += r.duals[i] * b[i];
    CHECK(yb == doctest::Approx(r.objective).epsilon(1e-8));
  }
}
