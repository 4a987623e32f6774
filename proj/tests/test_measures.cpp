#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "measures.hpp"
#include "oracles.hpp"

using namespace ubw1;

TEST_CASE("metric space validation") {
  CHECK_NOTHROW(MetricSpace::euclidean({{0.0, 0.0}, {1.0, 1.0}}));
  CHECK_THROWS_AS(MetricSpace::euclidean({}), error);
  // broken triangle inequality: d(0,2) > d(0,1) + d(1,2)
  CHECK_THROWS_AS(MetricSpace::explicit_matrix(
                      {}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}),
                  error);
  CHECK_THROWS_AS(MetricSpace::explicit_matrix({}, {{0, 1}, {2, 0}}), error);
  CHECK_THROWS_AS(MetricSpace::explicit_matrix({}, {{0.5, 1}, {1, 0}}), error);
  auto sp = MetricSpace::explicit_matrix({}, {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  CHECK(sp->d(0, 2) == 2.0);
  CHECK_FALSE(sp->euclidean_mode());
}

TEST_CASE("measure and coupling invariants") {
  auto sp = MetricSpace::euclidean({{0.0}, {1.0}});
  CHECK_THROWS_AS(DiscreteMeasure(sp, {1.0}), error);
  CHECK_THROWS_AS(DiscreteMeasure(sp, {1.0, -0.5}), error);
  DiscreteMeasure ok(sp, {1.0, 0.0});
  CHECK(ok.mass() == 1.0);
  CHECK_THROWS_AS(Coupling(sp, {{1.0, 0.0}}), error);
}

TEST_CASE("marginals of simple couplings") {
  auto sp = MetricSpace::euclidean({{0.0}, {1.0}});
  Coupling zero = Coupling::zeros(sp);
  auto [f0, s0] = marginals(zero);
  CHECK(f0.mass() == 0.0);
  CHECK(s0.mass() == 0.0);

  Coupling diag = Coupling::diagonal(DiscreteMeasure(sp, {2.0, 3.0}));
  auto [f1, s1] = marginals(diag);
  CHECK(f1.weights == std::vector<double>{2.0, 3.0});
  CHECK(s1.weights == std::vector<double>{2.0, 3.0});

  Coupling m(sp, {{1.0, 2.0}, {0.0, 3.0}});
  auto [f2, s2] = marginals(m);
  CHECK(f2.weights == std::vector<double>{3.0, 3.0});
  CHECK(s2.weights == std::vector<double>{1.0, 5.0});
}

TEST_CASE("w1 basics") {
  auto sp = MetricSpace::euclidean({{0.0, 0.0}, {3.0, 0.0}});
  DiscreteMeasure a(sp, {2.0, 0.0}), b(sp, {0.0, 2.0});
  auto r = w1_distance(a, b);
  CHECK(r.value == doctest::Approx(6.0));
  CHECK(w1_distance(a, a).value == 0.0);
  CHECK_THROWS_AS(w1_distance(a, DiscreteMeasure(sp, {0.0, 1.0})), error);

  auto other = MetricSpace::euclidean({{0.0, 0.0}, {5.0, 0.0}});
  CHECK_THROWS_AS(w1_distance(a, DiscreteMeasure(other, {2.0, 0.0})), error);
}

TEST_CASE("w1 matches vertex enumeration on random 4-point instances") {
  for (int seed = 0; seed < 12; ++seed) {
    Xoshiro rng(100 + seed);
    int n = 4;
    std::vector<std::vector<double>> pts(n, std::vector<double>(2));
    for (auto& p : pts) {
      p[0] = rng.next_unit();
      p[1] = rng.next_unit();
    }
    auto sp = MetricSpace::euclidean(pts);
    std::vector<double> w0(n), w1v(n);
    double s0 = 0, s1 = 0;
    for (int i = 0; i < n; ++i) {
      w0[i] = rng.next_unit();
      w1v[i] = rng.next_unit();
      s0 += w0[i];
      s1 += w1v[i];
    }
    for (int i = 0; i < n; ++i) w1v[i] *= s0 / s1;  // balance
    DiscreteMeasure r0(sp, w0), r1(sp, w1v);
    auto got = w1_distance(r0, r1);
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = sp->d(i, j);
    double want = oracle::w1_bruteforce(d, w0, w1v);
    CHECK(got.value == doctest::Approx(want).epsilon(1e-9));
    // plan marginals reproduce the inputs
    auto [mf, ms] = marginals(got.plan);
    for (int i = 0; i < n; ++i) {
      CHECK(mf.weights[i] == doctest::Approx(w0[i]).epsilon(1e-9));
      CHECK(ms.weights[i] == doctest::Approx(w1v[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("w1 symmetry and triangle inequality on random balanced triples") {
  for (int seed = 0; seed < 8; ++seed) {
    Xoshiro rng(300 + seed);
    int n = 4;
    std::vector<std::vector<double>> pts(n, std::vector<double>(2));
    for (auto& p : pts) {
      p[0] = rng.next_unit();
      p[1] = rng.next_unit();
    }
    auto sp = MetricSpace::euclidean(pts);
    auto mk = [&]() {
      std::vector<double> w(n);
      double s = 0;
      for (int i = 0; i < n; ++i) {
        w[i] = 0.05 + rng.next_unit();
        s += w[i];
      }
      for (auto& v : w) v /= s;
      return DiscreteMeasure(sp, w);
    };
    auto a = mk(), b = mk(), c = mk();
    double ab = w1_distance(a, b).value;
    double ba = w1_distance(b, a).value;
    double ac = w1_distance(a, c).value;
    double cb = w1_distance(c, b).value;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-8));
    CHECK(ab <= ac + cb + 1e-8);
  }
}
