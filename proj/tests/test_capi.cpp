// Exercises the shared-library C interface end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ubw1/ubw1.h"

TEST_CASE("model handles and evaluation") {
  ubw1_disc* d = nullptr;
  REQUIRE(ubw1_disc_create("hellinger", &d) == UBW1_OK);
  double v = 0;
  CHECK(ubw1_disc_cs(d, 1, 4, &v) == UBW1_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(ubw1_disc_hs(d, 1, &v) == UBW1_OK);
  CHECK(v == doctest::Approx(0.5));
  double L0, L1;
  CHECK(ubw1_disc_max_transport_distances(d, &L0, &L1) == UBW1_OK);
  CHECK(std::isinf(L0));
  ubw1_disc_free(d);

  ubw1_disc* bad = nullptr;
  CHECK(ubw1_disc_create("not-a-model", &bad) == UBW1_ERR_UNKNOWN_NAME);
  CHECK(std::string(ubw1_last_error()).find("not-a-model") != std::string::npos);
}

TEST_CASE("flow and reconstruction through the C surface") {
  ubw1_dyn* dyn = nullptr;
  REQUIRE(ubw1_dyn_create("hellinger", &dyn) == UBW1_OK);
  double v;
  int fp;
  CHECK(ubw1_dyn_flow(dyn, 1.0, 1.0, &v, &fp) == UBW1_OK);
  CHECK(v == doctest::Approx(0.5));
  CHECK(ubw1_dyn_cd(dyn, 1.0, 2.0, &v) == UBW1_OK);
  CHECK(v == doctest::Approx(1.0));
  ubw1_dyn_free(dyn);

  ubw1_disc* d = nullptr;
  REQUIRE(ubw1_disc_create("hellinger", &d) == UBW1_OK);
  std::vector<double> grid = {-0.5, 0.0, 1.0, 2.0};
  ubw1_report* rep = nullptr;
  REQUIRE(ubw1_reconstruct(d, grid.data(), 4, 1e-6, 200000, &rep) == UBW1_OK);
  CHECK(ubw1_report_size(rep) == 4);
  double q;
  CHECK(ubw1_report_q_at(rep, 2.0, &q) == UBW1_OK);
  CHECK(q == doctest::Approx(-4.0).epsilon(1e-4));
  double consts[8];
  CHECK(ubw1_report_constants(rep, consts) == UBW1_OK);
  int exists = 0;
  ubw1_dyn* witness = nullptr;
  CHECK(ubw1_report_decide(rep, 65, &exists, &witness) == UBW1_OK);
  CHECK(exists == 1);
  REQUIRE(witness != nullptr);
  CHECK(ubw1_dyn_hd(witness, 1.0, &v) == UBW1_OK);
  CHECK(v == doctest::Approx(-1.0).epsilon(1e-3));
  ubw1_dyn_free(witness);
  ubw1_report_free(rep);
  ubw1_disc_free(d);
}

TEST_CASE("solve, couplings, serialization, dynamics") {
  double points[4] = {0.0, 0.0, 1.5, 0.0};
  double w0[2] = {1.0, 0.0}, w1[2] = {0.0, 1.0};
  ubw1_measure *r0 = nullptr, *r1 = nullptr;
  REQUIRE(ubw1_measure_create(points, 2, 2, nullptr, w0, &r0) == UBW1_OK);
  REQUIRE(ubw1_measure_create(points, 2, 2, nullptr, w1, &r1) == UBW1_OK);
  double mass;
  CHECK(ubw1_measure_mass(r0, &mass) == UBW1_OK);
  CHECK(mass == 1.0);

  ubw1_disc* d = nullptr;
  REQUIRE(ubw1_disc_create("hellinger", &d) == UBW1_OK);
  ubw1_solution* sol = nullptr;
  REQUIRE(ubw1_solve_static(r0, r1, d, 65, &sol) == UBW1_OK);
  double p, du, g;
  CHECK(ubw1_solution_values(sol, &p, &du, &g) == UBW1_OK);
  CHECK(p == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(g <= 1e-6);

  int nv;
  CHECK(ubw1_solution_verify(sol, &nv, nullptr) == UBW1_OK);
  CHECK(nv == 0);

  char* js = nullptr;
  REQUIRE(ubw1_solution_to_json(sol, &js) == UBW1_OK);
  ubw1_solution* parsed = nullptr;
  REQUIRE(ubw1_solution_from_json(js, &parsed) == UBW1_OK);
  double p2;
  CHECK(ubw1_solution_values(parsed, &p2, nullptr, nullptr) == UBW1_OK);
  CHECK(p2 == p);
  ubw1_string_free(js);

  ubw1_dyn* dyn = nullptr;
  REQUIRE(ubw1_dyn_create("hellinger", &dyn) == UBW1_OK);
  ubw1_dynopt* opt = nullptr;
  REQUIRE(ubw1_assemble_dynamic(sol, d, dyn, 64, &opt) == UBW1_OK);
  double total, res;
  CHECK(ubw1_dynopt_total_cost(opt, &total) == UBW1_OK);
  CHECK(total == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(ubw1_dynopt_residual(opt, 16, &res) == UBW1_OK);
  CHECK(res <= 1e-6);
  CHECK(ubw1_dynopt_points(opt) == 2);
  CHECK(ubw1_dynopt_steps(opt) == 64);

  double a, b, val;
  int regime;
  CHECK(ubw1_dirac_solve(d, 1.5, 1, 0, 0, 1, &a, &b, nullptr, nullptr, nullptr,
                         &regime, &val) == UBW1_OK);
  CHECK(a == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(val == doctest::Approx(total).epsilon(5e-3));

  double scp, scd;
  CHECK(ubw1_semicoupling(d, 1.5, 1.0, 1.0, &scp, &scd) == UBW1_OK);
  CHECK(scp == doctest::Approx(val).epsilon(1e-4));

  ubw1_dynopt_free(opt);
  ubw1_dyn_free(dyn);
  ubw1_solution_free(parsed);
  ubw1_solution_free(sol);
  ubw1_disc_free(d);
  ubw1_measure_free(r0);
  ubw1_measure_free(r1);
}

TEST_CASE("measure JSON and error paths through the C surface") {
  ubw1_measure* m = nullptr;
  CHECK(ubw1_measure_from_json("{oops", &m) == UBW1_ERR_PARSE);
  REQUIRE(ubw1_measure_from_json(
              R"({"points": [[0],[1]], "weights": [1, 2]})", &m) == UBW1_OK);
  char* out = nullptr;
  CHECK(ubw1_measure_to_json(m, &out) == UBW1_OK);
  CHECK(std::string(out).find("weights") != std::string::npos);
  ubw1_string_free(out);
  ubw1_measure_free(m);
}
