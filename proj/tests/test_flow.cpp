#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <thread>

#include "flow.hpp"

using namespace ubw1;

TEST_CASE("conjugate cost cd_eval") {
  auto hell = DynamicPenalty::catalog("hellinger");
  CHECK(hell.cd(1, 2) == doctest::Approx(1.0));          // zeta^2 / 4 rho
  CHECK(hell.cd(5, 0) == 0.0);
  auto tv = DynamicPenalty::catalog("tv");
  CHECK(tv.cd(1, -3) == doctest::Approx(3.0));           // |zeta|
  CHECK(tv.cd(0.2, 1.5) == doctest::Approx(1.5));
  auto js = DynamicPenalty::catalog("jensen_shannon");
  // against the closed form with g = zeta/2rho + sqrt((zeta/2rho)^2 + 1)
  double z = 1.3, rho = 0.7;
  double g = z / (2 * rho) + std::sqrt(z * z / (4 * rho * rho) + 1);
  double w = std::sqrt(g) - 1 / std::sqrt(g);
  CHECK(js.cd(rho, z) == doctest::Approx(z * std::log2(g) - rho * w * w / std::log(2.0)));
  auto ex = DynamicPenalty::catalog("exact");
  CHECK(ex.cd(2, 0) == 0.0);
  CHECK(ex.cd(2, 1) == kInf);
  auto pwl = DynamicPenalty::catalog("pwl(-2,-1,2,1,2,0.5)");
  // table closed form, shrink branch zeta <= rho log(1/a)
  double rr = 1.0, zz = -2.0;  // log(1/2) ~ -0.693 > -2
  double want = -2.0 * zz + rr * std::log(2.0) * (-2.0 - (-1.0));
  CHECK(pwl.cd(rr, zz) == doctest::Approx(want));
  CHECK(pwl.cd(1.0, -0.3) == doctest::Approx(0.3));  // slo branch: -(-1)*0.3
}

TEST_CASE("flow closed forms for the quadratic profile") {
  auto dp = DynamicPenalty::catalog("hellinger");
  for (double t : {0.25, 0.5, 2.0})
    for (double z : {0.5, 1.0, 2.0})
      CHECK(dp.flow(t, z).value == doctest::Approx(z / (1 + t * z)).epsilon(1e-8));
  CHECK(dp.flow(1.0, 1.0).value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(dp.flow(0.0, 7.0).value == 7.0);
  // blow-down below the unit level
  CHECK(dp.flow(1.0, -0.5).value == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(dp.flow(1.0, -1.0).value == -kInf);
  CHECK(dp.flow(1.0, -2.0).value == -kInf);
}

TEST_CASE("inverse flow via reflection") {
  auto dp = DynamicPenalty::catalog("hellinger");
  CHECK(dp.inverse_flow(0.0, 0.3).value == 0.3);
  CHECK(dp.inverse_flow(1.0, 0.5).value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(dp.inverse_flow(1.0, -1.0).value == doctest::Approx(-0.5).epsilon(1e-8));
  // round trip on the image
  for (double z : {0.2, 1.0, 3.0}) {
    double y = dp.flow(0.7, z).value;
    CHECK(dp.inverse_flow(0.7, y).value == doctest::Approx(z).epsilon(1e-8));
  }
}

TEST_CASE("box and piecewise dynamics") {
  auto tv = DynamicPenalty::catalog("tv");
  CHECK(tv.flow(3.0, 0.5).value == 0.5);  // everything inside [-1,1] is fixed
  CHECK(tv.flow(0.5, 2.0).value == -kInf);
  CHECK(tv.fixed_lo() == doctest::Approx(-1.0));
  CHECK(tv.fixed_hi() == doctest::Approx(1.0));

  auto pwl = DynamicPenalty::catalog("pwl(-2,-1,2,1,2,0.5)");
  // on [shi, dhi] the profile is (z-1) log(1/2): exponential decay toward 1
  for (double z : {1.2, 1.7}) {
    double want = 1.0 + (z - 1.0) * std::exp(std::log(0.5) * 0.8);
    CHECK(pwl.flow(0.8, z).value == doctest::Approx(want).epsilon(1e-10));
  }
  // below slo the level escapes the domain in finite time
  CHECK(pwl.flow(4.0, -1.5).value == -kInf);
}

TEST_CASE("flow semigroup and lemma properties") {
  for (const char* name : {"hellinger", "pwl(-2,-1,2,1,2,0.5)", "tv"}) {
    CAPTURE(name);
    auto dp = DynamicPenalty::catalog(name);
    auto zs = linspace(std::max(dp.dom_lo() + 0.05, -0.8),
                       std::min(dp.dom_hi() - 0.05, 3.0), 17);
    for (double s : {0.25, 0.5, 1.0})
      for (double t : {0.25, 0.5, 1.0})
        for (double z : zs) {
          double a = dp.flow(t, z).value;
          if (!(a > -kInf)) continue;
          double two = dp.flow(s, a).value;
          double direct = dp.flow(s + t, z).value;
          if (two == -kInf && direct == -kInf) continue;
          CHECK(two == doctest::Approx(direct).epsilon(1e-7));
        }
    for (double t : {0.5, 1.0}) {
      double prev = -kInf;
      for (double z : zs) {
        double v = dp.flow(t, z).value;
        if (!(v > -kInf)) continue;
        CHECK(v <= z + 1e-10);
        if (prev > -kInf) CHECK(v > prev - 1e-10);  // increasing
        prev = v;
      }
    }
  }
}

TEST_CASE("normalized slope at the origin") {
  for (const char* name : {"hellinger", "jensen_shannon", "tv"}) {
    auto dp = DynamicPenalty::catalog(name);
    for (double t : {0.5, 1.0}) {
      double h = 1e-4;
      double s = (dp.flow(t, h).value - dp.flow(t, -h).value) / (2 * h);
      CHECK(std::abs(s - 1.0) <= 1e-3);
    }
  }
}

TEST_CASE("static profile from the flow") {
  auto hs_h = h_s_profile_from_dynamic(DynamicPenalty::catalog("hellinger"));
  for (double z : linspace(-0.9, 4.0, 64))
    CHECK(hs_h(z) == doctest::Approx(z / (1 + z)).epsilon(1e-7));
  CHECK(hs_h(-1.5) == -kInf);

  auto hs_e = h_s_profile_from_dynamic(DynamicPenalty::catalog("exact"));
  for (double z : {-3.0, 0.0, 2.0}) CHECK(hs_e(z) == doctest::Approx(z));

  auto hs_p = h_s_profile_from_dynamic(DynamicPenalty::catalog("pwl(-2,-1,2,1,2,0.5)"));
  auto ref = LocalDiscrepancy::catalog("pwl(-2,-1,2,1,2,0.5)");
  for (double z : {-1.5, -0.5, 0.5, 1.5, 2.5})
    CHECK(hs_p(z) == doctest::Approx(ref.hs(z)).epsilon(1e-9));

  // time-1 flow of the box is the clamped identity
  auto hs_t = h_s_profile_from_dynamic(DynamicPenalty::catalog("tv"));
  CHECK(hs_t(0.5) == doctest::Approx(0.5));
  CHECK(hs_t(3.0) == doctest::Approx(1.0));
  CHECK(hs_t(-2.0) == -kInf);
}

TEST_CASE("derivative identity above the fixed interval") {
  auto dp = DynamicPenalty::catalog("hellinger");
  for (double t : {0.5, 1.0})
    for (double z : {0.5, 1.0, 2.5}) {
      double step = 1e-5;
      double fd = (dp.flow(t, z + step).value - dp.flow(t, z - step).value) / (2 * step);
      double want = dp.h_d()(dp.flow(t, z).value) / dp.h_d()(z);
      CHECK(fd == doctest::Approx(want).epsilon(1e-4));
    }
}

TEST_CASE("concurrent evaluation is consistent") {
  auto dp = DynamicPenalty::catalog("jensen_shannon");
  auto zs = linspace(-0.8, 3.0, 64);
  std::vector<double> serial(zs.size()), parallel(zs.size());
  for (size_t i = 0; i < zs.size(); ++i) serial[i] = dp.flow(1.0, zs[i]).value;
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&, t]() {
      for (size_t i = t; i < zs.size(); i += 4)
        parallel[i] = dp.flow(1.0, zs[i]).value;
    });
  for (auto& th : pool) th.join();
  for (size_t i = 0; i < zs.size(); ++i) CHECK(parallel[i] == serial[i]);
}
