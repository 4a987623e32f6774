#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dirac.hpp"
#include "oracles.hpp"

using namespace ubw1;

namespace {
double hellinger_S(double L) { return sqr(0.5 * L + std::sqrt(0.25 * L * L + 1.0)); }
}

TEST_CASE("tangent split closed forms") {
  auto hell = LocalDiscrepancy::catalog("hellinger");
  // s with L(s) = 1.5 gives the (1/4, 4) split
  auto t = tangent_split(hell, -0.5);
  CHECK(t.alpha == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(t.beta == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(t.L_of_s == doctest::Approx(1.5).epsilon(1e-8));
  // closed form L(s) = sqrt(s^2 - 4s)
  for (double s : {-0.2, -1.0, -3.0}) {
    auto ts = tangent_split(hell, s);
    CHECK(ts.L_of_s == doctest::Approx(std::sqrt(s * s - 4 * s)).epsilon(1e-7));
  }
  // L(s) strictly decreases in s (increases in |s|)
  double prev = 0.0;
  for (double s : {-0.1, -0.5, -2.0, -8.0}) {
    auto ts = tangent_split(hell, s);
    CHECK(ts.L_of_s > prev);
    prev = ts.L_of_s;
  }
  // near-vanishing intercept: tangency collapses to the balance point
  auto t0 = tangent_split(hell, -1e-7);
  CHECK(t0.alpha == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(t0.beta == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(t0.L_of_s <= 1e-3);

  // flat tangents of the box model
  auto tv = LocalDiscrepancy::catalog("tv");
  for (double s : {-0.3, -2.0, -20.0})
    CHECK(tangent_split(tv, s).L_of_s == doctest::Approx(2.0).epsilon(1e-6));

  CHECK_THROWS_AS(tangent_split(hell, 0.5), error);
  CHECK_THROWS_AS(tangent_split(LocalDiscrepancy::catalog("exact"), -1.0), error);
}

TEST_CASE("hellinger interior solution and the move-everything regimes") {
  auto hell = LocalDiscrepancy::catalog("hellinger");
  auto sol = solve_dirac(hell, DiracInstance{1.5, 1.0, 0.0, 0.0, 1.0});
  CHECK(sol.a == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(sol.b == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(sol.regime == DiracRegime::interior);
  CHECK(sol.alpha == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(sol.beta == doctest::Approx(4.0).epsilon(1e-6));

  // ratio beyond S(L): move everything first, then grow
  double S = hellinger_S(1.5);
  auto big = solve_dirac(hell, DiracInstance{1.5, 1.0, 0.0, 0.0, S + 1.0});
  CHECK(big.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(big.b == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(big.regime == DiracRegime::boundary_b0);

  auto small = solve_dirac(hell, DiracInstance{1.5, 1.0, 0.0, 0.0, 1.0 / (S + 1.0)});
  CHECK(small.a == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(small.regime == DiracRegime::boundary_a0);
}

TEST_CASE("balanced instances are free") {
  auto hell = LocalDiscrepancy::catalog("hellinger");
  auto sol = solve_dirac(hell, DiracInstance{2.0, 0.7, 0.3, 0.7, 0.3});
  CHECK(sol.value == 0.0);
  CHECK(sol.a == 0.0);
  CHECK(sol.b == 0.0);
}

TEST_CASE("grid oracle agreement across models and masses") {
  const char* models[4] = {"hellinger", "jensen_shannon", "chi2", "tv"};
  Xoshiro rng(5150);
  for (int k = 0; k < 16; ++k) {
    auto disc = LocalDiscrepancy::catalog(models[k % 4]);
    DiracInstance in;
    in.L = rng.uniform(0.3, 3.5);
    in.m00 = rng.uniform(0.1, 2.0);
    in.m0L = rng.uniform(0.0, 1.0);
    in.m10 = rng.uniform(0.0, in.m00);
    in.m1L = in.m0L + rng.uniform(0.05, 2.0);
    auto sol = solve_dirac(disc, in);
    double grid = oracle::dirac_grid_min(disc, in.L, in.m00, in.m0L, in.m10, in.m1L);
    CHECK(sol.value <= grid + 1e-6);
    CHECK(sol.value >= grid - 1e-4);
  }
}

TEST_CASE("interior optima satisfy the stationarity system") {
  auto hell = LocalDiscrepancy::catalog("hellinger");
  DiracInstance in{1.1, 1.3, 0.2, 0.4, 1.7};
  auto sol = solve_dirac(hell, in);
  if (sol.regime == DiracRegime::interior) {
    double h = 1e-6;
    auto P = [&](double a, double b) { return dirac_objective(hell, in, a, b); };
    double da = (P(sol.a + h, sol.b) - P(sol.a - h, sol.b)) / (2 * h);
    double db = (P(sol.a, sol.b + h) - P(sol.a, sol.b - h)) / (2 * h);
    CHECK(std::abs(da) <= 1e-5);
    CHECK(std::abs(db) <= 1e-5);
  }
}

TEST_CASE("objective is convex along random directions") {
  auto js = LocalDiscrepancy::catalog("jensen_shannon");
  DiracInstance in{0.9, 1.0, 0.4, 0.3, 1.4};
  Xoshiro rng(777);
  for (int rep = 0; rep < 20; ++rep) {
    double a = rng.uniform(0.05, 0.95), b = rng.uniform(0.05, 0.95 * in.m1L);
    double da = rng.uniform(-0.04, 0.04), db = rng.uniform(-0.04, 0.04);
    double m = dirac_objective(js, in, a, b);
    double p = dirac_objective(js, in, a + da, b + db);
    double q = dirac_objective(js, in, a - da, b - db);
    if (!is_finite(p) || !is_finite(q)) continue;
    CHECK(p + q - 2 * m >= -1e-9);
  }
}

TEST_CASE("phase diagram rows and the boundary tie rule") {
  auto hell = LocalDiscrepancy::catalog("hellinger");
  auto rows = phase_diagram(hell, {1.5}, {0.1, 1.0, 5.0});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].regime == DiracRegime::boundary_a0);  // 0.1 < 1/S(1.5) = 0.25
  CHECK(rows[1].regime == DiracRegime::interior);
  CHECK(rows[2].regime == DiracRegime::boundary_b0);  // 5 > S(1.5) = 4

  // exactly on the boundary: classified as boundary
  auto tie = solve_dirac(hell, DiracInstance{1.5, 1.0, 0.0, 0.0, 4.0});
  CHECK(tie.regime == DiracRegime::boundary_b0);
}

TEST_CASE("swapped orientation is handled") {
  auto hell = LocalDiscrepancy::catalog("hellinger");
  // growth at site 0, shrink at site L
  auto sol = solve_dirac(hell, DiracInstance{1.5, 0.0, 1.0, 1.0, 0.0});
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.swapped);
}
