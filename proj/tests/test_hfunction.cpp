#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hfunction.hpp"
#include "error.hpp"

using namespace ubw1;

TEST_CASE("piecewise evaluation, tails, derivatives") {
  auto h = HFunction::piecewise("demo", {-1.0, 0.0, 2.0}, {-1.0, 0.0, 1.0},
                                TailMode::minus_inf, TailMode::plateau);
  CHECK(h(-2.0) == -kInf);
  CHECK(h(-0.5) == doctest::Approx(-0.5));
  CHECK(h(1.0) == doctest::Approx(0.5));
  CHECK(h(5.0) == doctest::Approx(1.0));
  CHECK(h.domain_lo() == -1.0);
  CHECK(h.plateau_start() == 2.0);
  CHECK(h.sup_value() == 1.0);
  CHECK(h.deriv(1.0, +1) == doctest::Approx(0.5));
  CHECK(h.deriv(0.0, -1) == doctest::Approx(1.0));
  CHECK(h.deriv(0.0, +1) == doctest::Approx(0.5));
  CHECK(h.deriv(3.0, +1) == 0.0);
  CHECK(h.inverse_increasing(0.5) == doctest::Approx(1.0));

  auto e = HFunction::piecewise("ext", {0.0, 1.0}, {0.0, 1.0},
                                TailMode::extend, TailMode::extend);
  CHECK(e(-3.0) == doctest::Approx(-3.0));
  CHECK(e(4.0) == doctest::Approx(4.0));
  CHECK(e.domain_lo() == -kInf);
  CHECK(e.sup_value() == kInf);
}

TEST_CASE("closed-form carrier with finite differences") {
  auto h = HFunction::closed_form(
      "log1p", [](double z) { return z <= -1.0 ? -kInf : std::log1p(z); },
      nullptr, -1.0, kInf, kInf, kInf);
  CHECK(h(-1.5) == -kInf);
  CHECK(h(1.0) == doctest::Approx(std::log(2.0)));
  CHECK(h.deriv(1.0, +1) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(h.inverse_increasing(std::log(3.0)) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("static profile validation accepts and rejects") {
  auto good = HFunction::closed_form(
      "hell", [](double z) { return z <= -1.0 ? -kInf : z / (1.0 + z); },
      nullptr, -1.0, kInf, 1.0, kInf);
  CHECK_NOTHROW(good.validate_static_profile());

  // convex (not concave) profile
  auto convex = HFunction::closed_form(
      "bad", [](double z) { return z < 0 ? z : z * z + z; }, nullptr, -kInf,
      kInf, kInf, kInf);
  CHECK_THROWS_AS(convex.validate_static_profile(), error);

  // wrong slope at the origin
  auto halfslope = HFunction::closed_form(
      "half", [](double z) { return 0.5 * z; }, nullptr, -kInf, kInf, kInf, kInf);
  CHECK_THROWS_AS(halfslope.validate_static_profile(), error);

  // above the diagonal
  auto above = HFunction::closed_form(
      "above", [](double z) { return z + 0.1; }, nullptr, -kInf, kInf, kInf, kInf);
  CHECK_THROWS_AS(above.validate_static_profile(), error);
}

TEST_CASE("dynamic profile validation") {
  auto quad = HFunction::closed_form(
      "quad", [](double z) { return -z * z; },
      [](double z, int) { return -2.0 * z; }, -kInf, kInf, 0.0, 0.0);
  CHECK_NOTHROW(quad.validate_dynamic_profile());

  auto positive = HFunction::closed_form(
      "pos", [](double z) { return std::abs(z); }, nullptr, -kInf, kInf, kInf, kInf);
  CHECK_THROWS_AS(positive.validate_dynamic_profile(), error);

  auto off = HFunction::closed_form(
      "off", [](double z) { return -sqr(z - 1.0) + 0.5; }, nullptr, -kInf, kInf,
      0.5, 1.0);
  CHECK_THROWS_AS(off.validate_dynamic_profile(), error);
}

TEST_CASE("breakpoint construction guards") {
  CHECK_THROWS_AS(HFunction::piecewise("x", {0.0}, {0.0}, TailMode::extend,
                                       TailMode::extend),
                  error);
  CHECK_THROWS_AS(HFunction::piecewise("x", {0.0, 0.0}, {0.0, 1.0},
                                       TailMode::extend, TailMode::extend),
                  error);
  CHECK_THROWS_AS(HFunction::piecewise("x", {0.0, 1.0}, {0.0},
                                       TailMode::extend, TailMode::extend),
                  error);
}
