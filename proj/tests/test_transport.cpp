#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dirac.hpp"
#include "oracles.hpp"
#include "transport.hpp"

using namespace ubw1;

namespace {

DiscreteMeasure unit_at(const SpacePtr& sp, int i) {
  std::vector<double> w(sp->size(), 0.0);
  w[i] = 1.0;
  return DiscreteMeasure(sp, w);
}

}  // namespace

TEST_CASE("identical measures cost nothing") {
  auto sp = MetricSpace::euclidean({{0.0}, {0.7}, {1.9}});
  DiscreteMeasure rho(sp, {0.4, 0.2, 0.9});
  for (const char* m : {"tv", "hellinger", "jensen_shannon", "exact"}) {
    auto sol = solve_static(rho, rho, LocalDiscrepancy::catalog(m), 33);
    CHECK(sol.primal_value == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(sol.gap <= 1e-9);
    for (int i = 0; i < 3; ++i) CHECK(sol.partition[i] == Region::equal);
  }
}

TEST_CASE("single point: pure mass change") {
  auto sp = MetricSpace::euclidean({{0.0}});
  DiscreteMeasure a(sp, {2.0}), b(sp, {3.0});
  auto hell = LocalDiscrepancy::catalog("hellinger");
  auto sol = solve_static(a, b, hell, 17);
  CHECK(sol.primal_value == doctest::Approx(sqr(std::sqrt(2.0) - std::sqrt(3.0))).epsilon(1e-9));
  CHECK(std::abs(sol.gap) <= 1e-8);
  CHECK(sol.partition[0] == Region::plus);
}

TEST_CASE("flat-norm thresholds on two points") {
  auto tv = LocalDiscrepancy::catalog("tv");
  for (double L : {0.5, 1.9, 2.1, 5.0}) {
    auto sp = MetricSpace::euclidean({{0.0}, {L}});
    auto sol = solve_static(unit_at(sp, 0), unit_at(sp, 1), tv, 65);
    CHECK(sol.primal_value == doctest::Approx(std::min(L, 2.0)).epsilon(1e-9));
    CHECK(sol.gap <= 1e-8);
  }
}

TEST_CASE("two-point hellinger agrees with the dirac lab") {
  auto hell = LocalDiscrepancy::catalog("hellinger");
  auto sp = MetricSpace::euclidean({{0.0}, {1.5}});
  auto sol = solve_static(unit_at(sp, 0), unit_at(sp, 1), hell, 65);
  auto dir = solve_dirac(hell, DiracInstance{1.5, 1.0, 0.0, 0.0, 1.0});
  CHECK(sol.primal_value == doctest::Approx(dir.value).epsilon(1e-5));
}

TEST_CASE("exact model reduces to W1 and guards mass") {
  auto exact = LocalDiscrepancy::catalog("exact");
  auto sp = MetricSpace::euclidean({{0.0}, {1.0}});
  DiscreteMeasure a(sp, {1.0, 1.0}), b(sp, {0.5, 1.5});
  auto sol = solve_static(a, b, exact, 17);
  CHECK(sol.primal_value == doctest::Approx(0.5));
  CHECK(sol.gap <= 1e-9);
  CHECK_THROWS_AS(solve_static(a, DiscreteMeasure(sp, {1.0, 1.5}), exact, 17), error);
}

TEST_CASE("zero total mass instances") {
  auto sp = MetricSpace::euclidean({{0.0}, {1.0}});
  DiscreteMeasure zero(sp, {0.0, 0.0}), rho(sp, {0.4, 0.6});
  auto hell = LocalDiscrepancy::catalog("hellinger");
  auto sol = solve_static(zero, rho, hell, 17);
  CHECK(sol.primal_value == doctest::Approx(1.0));  // c_S(0, m) = m
  CHECK(sol.gap <= 1e-6);
  auto rev = solve_static(rho, zero, hell, 17);
  CHECK(rev.primal_value == doctest::Approx(1.0));
  CHECK(rev.gap <= 1e-6);
}

TEST_CASE("space mismatch is rejected") {
  auto sp1 = MetricSpace::euclidean({{0.0}, {1.0}});
  auto sp2 = MetricSpace::euclidean({{0.0}, {2.0}});
  auto hell = LocalDiscrepancy::catalog("hellinger");
  CHECK_THROWS_AS(solve_static(unit_at(sp1, 0), unit_at(sp2, 1), hell, 17), error);
}

TEST_CASE("flat-norm shift invariance: cost depends only on the difference") {
  auto tv = LocalDiscrepancy::catalog("tv");
  Xoshiro rng(11);
  auto sp = MetricSpace::euclidean({{0.0, 0.0}, {0.4, 0.2}, {1.0, 0.3}, {0.2, 0.8}});
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> w0(4), w1(4), sigma(4);
    for (int i = 0; i < 4; ++i) {
      w0[i] = rng.next_unit();
      w1[i] = rng.next_unit();
      sigma[i] = rng.next_unit();
    }
    auto base = solve_static(DiscreteMeasure(sp, w0), DiscreteMeasure(sp, w1), tv, 33);
    std::vector<double> w0s(4), w1s(4);
    for (int i = 0; i < 4; ++i) {
      w0s[i] = w0[i] + sigma[i];
      w1s[i] = w1[i] + sigma[i];
    }
    auto shifted =
        solve_static(DiscreteMeasure(sp, w0s), DiscreteMeasure(sp, w1s), tv, 33);
    CHECK(shifted.primal_value == doctest::Approx(base.primal_value).epsilon(1e-7));
  }
}

TEST_CASE("semimetric symmetry") {
  Xoshiro rng(21);
  auto sp = MetricSpace::euclidean({{0.0, 0.0}, {0.5, 0.1}, {0.2, 0.9}});
  std::vector<double> w0(3), w1(3);
  for (int i = 0; i < 3; ++i) {
    w0[i] = rng.next_unit();
    w1[i] = rng.next_unit();
  }
  DiscreteMeasure a(sp, w0), b(sp, w1);
  for (const char* m : {"tv", "hellinger", "jensen_shannon", "chi2"}) {
    auto disc = LocalDiscrepancy::catalog(m);
    double ab = solve_static(a, b, disc, 65).primal_value;
    double ba = solve_static(b, a, disc, 65).primal_value;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-7));
  }
}

TEST_CASE("structure checks pass at optima and flag corruption") {
  Xoshiro rng(31);
  auto sp = MetricSpace::euclidean(
      {{0.0, 0.0}, {0.3, 0.4}, {0.9, 0.2}, {0.5, 0.8}, {0.1, 0.6}});
  std::vector<double> w0(5), w1(5);
  for (int i = 0; i < 5; ++i) {
    w0[i] = rng.next_unit();
    w1[i] = rng.next_unit();
  }
  auto hell = LocalDiscrepancy::catalog("hellinger");
  auto sol = solve_static(DiscreteMeasure(sp, w0), DiscreteMeasure(sp, w1), hell, 65);
  CHECK(verify_structure(sol).empty());

  // push mass into a shrink point through pi0: condition I must fire
  int minus = -1, other = -1;
  for (int i = 0; i < 5; ++i) {
    if (sol.partition[i] == Region::minus) minus = i;
    else other = i;
  }
  if (minus >= 0 && other >= 0) {
    TransportSolution bad = sol;
    bad.pi0.m[other][minus] += 0.1;
    auto viols = verify_structure(bad);
    CHECK_FALSE(viols.empty());
    bool names_one = false;
    for (const auto& v : viols) names_one |= v.find("condition I") != std::string::npos;
    CHECK(names_one);
  }
}

TEST_CASE("canonicalize reroutes chains without changing the value") {
  auto sp = MetricSpace::euclidean({{0.0}, {0.7}, {1.4}});
  auto tv = LocalDiscrepancy::catalog("tv");
  auto sol = solve_static(unit_at(sp, 0), unit_at(sp, 2), tv, 65);
  REQUIRE(sol.gap <= 1e-7);
  // hand-build the equal-cost chain through the middle (collinear geometry)
  TransportSolution chained = sol;
  auto zeros = std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0));
  auto p0 = zeros, p1 = zeros;
  p0[0][1] = 1.0;
  p1[1][2] = 1.0;
  chained.pi0 = Coupling(sp, p0);
  chained.pi1 = Coupling(sp, p1);
  chained.rho0p = chained.pi0.second_marginal();
  chained.rho1p = chained.pi1.first_marginal();
  chained.primal_value = chained.pi0.transport_cost() + chained.pi1.transport_cost();
  chained.gap = chained.primal_value - chained.dual_value;
  REQUIRE(chained.primal_value == doctest::Approx(sol.primal_value).epsilon(1e-9));
  chained.partition = {Region::minus, Region::equal, Region::plus};

  auto canon = canonicalize(chained, tv);
  CHECK(canon.primal_value <= chained.primal_value + 1e-9);
  // chain collapsed: nothing passes through the middle anymore
  CHECK(canon.pi0.m[0][1] == doctest::Approx(0.0));
  CHECK(canon.pi1.m[1][2] == doctest::Approx(0.0));
  // already-canonical input is unchanged
  auto again = canonicalize(canon, tv);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(again.pi0.m[i][j] == doctest::Approx(canon.pi0.m[i][j]));
      CHECK(again.pi1.m[i][j] == doctest::Approx(canon.pi1.m[i][j]));
    }
  // canonicalize rejects unconverged solutions
  TransportSolution loose = sol;
  loose.gap = 1.0;
  CHECK_THROWS_AS(canonicalize(loose, tv), error);
}

TEST_CASE("beyond-threshold couplings are diagonal after canonicalization") {
  auto tv = LocalDiscrepancy::catalog("tv");
  auto sp = MetricSpace::euclidean({{0.0}, {0.1}, {3.0}, {3.2}});
  DiscreteMeasure r0(sp, {0.6, 0.4, 0.0, 0.0});
  DiscreteMeasure r1(sp, {0.0, 0.0, 0.5, 0.5});
  auto sol = canonicalize(solve_static(r0, r1, tv, 65), tv);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      CHECK(sol.pi0.m[i][j] <= 1e-9);
      CHECK(sol.pi1.m[i][j] <= 1e-9);
    }
  CHECK(sol.primal_value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("maximal transport distances") {
  auto [l0t, l1t] = max_transport_distances(LocalDiscrepancy::catalog("tv"));
  CHECK(l0t == doctest::Approx(2.0));
  CHECK(l1t == doctest::Approx(2.0));
  auto [l0h, l1h] = max_transport_distances(LocalDiscrepancy::catalog("hellinger"));
  CHECK(l0h == kInf);
  CHECK(l1h == kInf);
  auto [l0e, l1e] = max_transport_distances(LocalDiscrepancy::catalog("exact"));
  CHECK(l0e == kInf);
  CHECK(l1e == kInf);
  auto [l0p, l1p] = max_transport_distances(LocalDiscrepancy::catalog("pwl(-2,-1,2,1,2,0.5)"));
  CHECK(l0p == doctest::Approx(4.0));  // dhi - dlo
  CHECK(l1p == doctest::Approx(4.5));  // sup h_S - inf h_S = 1.5 - (-3)
}

TEST_CASE("weak duality everywhere") {
  Xoshiro rng(47);
  for (int seed = 0; seed < 10; ++seed) {
    int n = 3 + seed % 4;
    std::vector<std::vector<double>> pts(n, std::vector<double>(2));
    for (auto& p : pts) {
      p[0] = rng.next_unit();
      p[1] = rng.next_unit();
    }
    auto sp = MetricSpace::euclidean(pts);
    std::vector<double> w0(n), w1(n);
    for (int i = 0; i < n; ++i) {
      w0[i] = rng.next_unit();
      w1[i] = rng.next_unit();
    }
    const char* names[3] = {"hellinger", "chi2", "jensen_shannon"};
    auto disc = LocalDiscrepancy::catalog(names[seed % 3]);
    auto sol = solve_static(DiscreteMeasure(sp, w0), DiscreteMeasure(sp, w1), disc, 33);
    CHECK(sol.dual_value <= sol.primal_value + 1e-8);
    // marginal constraints hold on the returned couplings
    auto m0 = sol.pi0.first_marginal();
    auto m1 = sol.pi1.second_marginal();
    for (int i = 0; i < n; ++i) {
      CHECK(m0.weights[i] == doctest::Approx(w0[i]).epsilon(1e-7));
      CHECK(m1.weights[i] == doctest::Approx(w1[i]).epsilon(1e-7));
    }
    // dual potentials are feasible: 1-Lipschitz and inside B_S
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y)
        CHECK(sol.alpha[x] - sol.alpha[y] <= sp->d(x, y) + 1e-9);
      CHECK(sol.beta[x] <= disc.hs(-sol.alpha[x]) + 1e-9);
    }
  }
}
