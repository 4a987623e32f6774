#include "ubw1/ubw1.h"

#include <cstring>
#include <string>

#include "dirac.hpp"
#include "dynamic.hpp"
#include "error.hpp"
#include "jsonio.hpp"
#include "reconstruct.hpp"
#include "selftest.hpp"

using namespace ubw1;

namespace {

thread_local std::string g_last_error;

ubw1_status map_errc(errc c) {
  switch (c) {
    case errc::invalid_argument: return UBW1_ERR_INVALID_ARGUMENT;
    case errc::unknown_name: return UBW1_ERR_UNKNOWN_NAME;
    case errc::negative_mass: return UBW1_ERR_NEGATIVE_MASS;
    case errc::mass_mismatch: return UBW1_ERR_MASS_MISMATCH;
    case errc::empty_space: return UBW1_ERR_EMPTY_SPACE;
    case errc::space_mismatch: return UBW1_ERR_SPACE_MISMATCH;
    case errc::infeasible_model: return UBW1_ERR_INFEASIBLE_MODEL;
    case errc::infeasible_change: return UBW1_ERR_INFEASIBLE_CHANGE;
    case errc::infeasible_pair: return UBW1_ERR_INFEASIBLE_PAIR;
    case errc::model_mismatch: return UBW1_ERR_MODEL_MISMATCH;
    case errc::non_convergence: return UBW1_ERR_NON_CONVERGENCE;
    case errc::degenerate_slope: return UBW1_ERR_DEGENERATE_SLOPE;
    case errc::cycle_guard: return UBW1_ERR_CYCLE_GUARD;
    case errc::not_optimal: return UBW1_ERR_NOT_OPTIMAL;
    case errc::out_of_range: return UBW1_ERR_OUT_OF_RANGE;
    case errc::inconclusive: return UBW1_ERR_INCONCLUSIVE;
    case errc::parse_error: return UBW1_ERR_PARSE;
    case errc::io_error: return UBW1_ERR_IO;
    case errc::internal: return UBW1_ERR_INTERNAL;
  }
  return UBW1_ERR_INTERNAL;
}

template <typename F>
ubw1_status guarded(F&& f) {
  try {
    f();
    return UBW1_OK;
  } catch (const error& e) {
    g_last_error = e.what();
    return map_errc(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UBW1_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return UBW1_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct ubw1_disc {
  LocalDiscrepancy d;
};
struct ubw1_dyn {
  DynamicPenalty d;
};
struct ubw1_report {
  ReconstructionReport r;
};
struct ubw1_measure {
  DiscreteMeasure m;
};
struct ubw1_solution {
  TransportSolution s;
};
struct ubw1_dynopt {
  DynamicOptimizer o;
};

extern "C" {

const char* ubw1_status_name(ubw1_status s) {
  switch (s) {
    case UBW1_OK: return "ok";
    case UBW1_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case UBW1_ERR_UNKNOWN_NAME: return "UnknownName";
    case UBW1_ERR_NEGATIVE_MASS: return "NegativeMass";
    case UBW1_ERR_MASS_MISMATCH: return "MassMismatch";
    case UBW1_ERR_EMPTY_SPACE: return "EmptySpace";
    case UBW1_ERR_SPACE_MISMATCH: return "SpaceMismatch";
    case UBW1_ERR_INFEASIBLE_MODEL: return "InfeasibleModel";
    case UBW1_ERR_INFEASIBLE_CHANGE: return "InfeasibleChange";
    case UBW1_ERR_INFEASIBLE_PAIR: return "InfeasiblePair";
    case UBW1_ERR_MODEL_MISMATCH: return "ModelMismatch";
    case UBW1_ERR_NON_CONVERGENCE: return "NonConvergence";
    case UBW1_ERR_DEGENERATE_SLOPE: return "DegenerateSlope";
    case UBW1_ERR_CYCLE_GUARD: return "CycleGuardExceeded";
    case UBW1_ERR_NOT_OPTIMAL: return "NotOptimalInput";
    case UBW1_ERR_OUT_OF_RANGE: return "OutOfRange";
    case UBW1_ERR_INCONCLUSIVE: return "Inconclusive";
    case UBW1_ERR_PARSE: return "ParseError";
    case UBW1_ERR_IO: return "IoError";
    case UBW1_ERR_INTERNAL: return "InternalError";
  }
  return "?";
}

const char* ubw1_last_error(void) { return g_last_error.c_str(); }
void ubw1_string_free(char* s) { delete[] s; }

ubw1_status ubw1_disc_create(const char* spec, ubw1_disc** out) {
  return guarded([&] {
    require(spec && out, errc::invalid_argument, "null argument");
    *out = new ubw1_disc{LocalDiscrepancy::catalog(spec)};
  });
}

ubw1_status ubw1_disc_from_json(const char* json_text, ubw1_disc** out) {
  return guarded([&] {
    require(json_text && out, errc::invalid_argument, "null argument");
    *out = new ubw1_disc{model_from_json(json_text)};
  });
}

void ubw1_disc_free(ubw1_disc* d) { delete d; }
const char* ubw1_disc_name(const ubw1_disc* d) { return d->d.name().c_str(); }

ubw1_status ubw1_disc_cs(const ubw1_disc* d, double m0, double m1, double* out) {
  return guarded([&] { *out = d->d.cs(m0, m1); });
}
ubw1_status ubw1_disc_hs(const ubw1_disc* d, double z, double* out) {
  return guarded([&] { *out = d->d.hs(z); });
}
ubw1_status ubw1_disc_hbar(const ubw1_disc* d, double z, double* out) {
  return guarded([&] { *out = d->d.hbar(z); });
}

ubw1_status ubw1_disc_support(const ubw1_disc* d, int k, double* alpha,
                              double* beta) {
  return guarded([&] {
    auto pts = d->d.supporting_points(k);
    for (int i = 0; i < k; ++i) {
      size_t j = std::min<size_t>(i, pts.size() - 1);
      alpha[i] = pts[j].alpha;
      beta[i] = pts[j].beta;
    }
  });
}

ubw1_status ubw1_disc_max_transport_distances(const ubw1_disc* d, double* L0,
                                              double* L1) {
  return guarded([&] {
    auto [l0, l1] = max_transport_distances(d->d);
    *L0 = l0;
    *L1 = l1;
  });
}

ubw1_status ubw1_disc_check_conditions(const ubw1_disc* d, int* necessary_ok,
                                       int* sufficient_ok, char** details) {
  return guarded([&] {
    auto rep = check_conditions(d->d);
    if (necessary_ok) *necessary_ok = rep.necessary_ok ? 1 : 0;
    if (sufficient_ok) *sufficient_ok = rep.sufficient_ok ? 1 : 0;
    if (details) *details = dup_string(rep.details);
  });
}

ubw1_status ubw1_dyn_create(const char* spec, ubw1_dyn** out) {
  return guarded([&] {
    require(spec && out, errc::invalid_argument, "null argument");
    *out = new ubw1_dyn{DynamicPenalty::catalog(spec)};
  });
}

void ubw1_dyn_free(ubw1_dyn* d) { delete d; }

ubw1_status ubw1_dyn_hd(const ubw1_dyn* d, double z, double* out) {
  return guarded([&] { *out = d->d.h_d()(z); });
}
ubw1_status ubw1_dyn_cd(const ubw1_dyn* d, double rho, double zeta, double* out) {
  return guarded([&] { *out = d->d.cd(rho, zeta); });
}
ubw1_status ubw1_dyn_flow(const ubw1_dyn* d, double t, double z, double* value,
                          int* reached_fixed_point) {
  return guarded([&] {
    auto r = d->d.flow(t, z);
    *value = r.value;
    if (reached_fixed_point) *reached_fixed_point = r.reached_fixed_point ? 1 : 0;
  });
}
ubw1_status ubw1_dyn_inverse_flow(const ubw1_dyn* d, double t, double z,
                                  double* value, int* reached_fixed_point) {
  return guarded([&] {
    auto r = d->d.inverse_flow(t, z);
    *value = r.value;
    if (reached_fixed_point) *reached_fixed_point = r.reached_fixed_point ? 1 : 0;
  });
}
ubw1_status ubw1_dyn_static_model(const ubw1_dyn* d, ubw1_disc** out) {
  return guarded([&] { *out = new ubw1_disc{static_model_from_dynamic(d->d)}; });
}

ubw1_status ubw1_reconstruct(const ubw1_disc* d, const double* grid, int n,
                             double tol, int max_iter, ubw1_report** out) {
  return guarded([&] {
    std::vector<double> g(grid, grid + n);
    *out = new ubw1_report{reconstruct(d->d, std::move(g), tol, max_iter)};
  });
}

void ubw1_report_free(ubw1_report* r) { delete r; }
int ubw1_report_size(const ubw1_report* r) {
  return static_cast<int>(r->r.grid.size());
}

ubw1_status ubw1_report_rows(const ubw1_report* r, double* z, double* q,
                             int* iterations, int* converged) {
  return guarded([&] {
    for (size_t i = 0; i < r->r.grid.size(); ++i) {
      if (z) z[i] = r->r.grid[i];
      if (q) q[i] = r->r.q[i];
      if (iterations) iterations[i] = r->r.iterations[i];
      if (converged) converged[i] = r->r.converged[i];
    }
  });
}

ubw1_status ubw1_report_constants(const ubw1_report* r, double out[8]) {
  return guarded([&] {
    out[0] = r->r.d_lo;
    out[1] = r->r.d_hi;
    out[2] = r->r.zeta_lo;
    out[3] = r->r.zeta_hi;
    out[4] = r->r.m_lo;
    out[5] = r->r.m_hi;
    out[6] = r->r.c_lo;
    out[7] = r->r.c_hi;
  });
}

ubw1_status ubw1_report_q_at(const ubw1_report* r, double z, double* out) {
  return guarded([&] { *out = r->r.q_at(z); });
}

ubw1_status ubw1_report_decide(const ubw1_report* r, int concavity_grid,
                               int* exists, ubw1_dyn** witness) {
  return guarded([&] {
    auto dec = decide_dynamic(r->r, concavity_grid);
    *exists = dec.exists ? 1 : 0;
    if (witness) *witness = dec.exists ? new ubw1_dyn{*dec.witness} : nullptr;
  });
}

ubw1_status ubw1_measure_from_json(const char* json_text, ubw1_measure** out) {
  return guarded([&] { *out = new ubw1_measure{measure_from_json(json_text)}; });
}

ubw1_status ubw1_measure_create(const double* points, int n, int dim,
                                const double* matrix, const double* weights,
                                ubw1_measure** out) {
  return guarded([&] {
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < dim; ++j) pts[i][j] = points[i * dim + j];
    SpacePtr sp;
    if (matrix) {
      std::vector<std::vector<double>> m(n, std::vector<double>(n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = matrix[i * n + j];
      sp = MetricSpace::explicit_matrix(std::move(pts), std::move(m));
    } else {
      sp = MetricSpace::euclidean(std::move(pts));
    }
    *out = new ubw1_measure{
        DiscreteMeasure(sp, std::vector<double>(weights, weights + n))};
  });
}

void ubw1_measure_free(ubw1_measure* m) { delete m; }
int ubw1_measure_size(const ubw1_measure* m) { return m->m.size(); }
ubw1_status ubw1_measure_mass(const ubw1_measure* m, double* out) {
  return guarded([&] { *out = m->m.mass(); });
}
ubw1_status ubw1_measure_to_json(const ubw1_measure* m, char** out) {
  return guarded([&] { *out = dup_string(measure_to_json(m->m)); });
}

ubw1_status ubw1_w1(const ubw1_measure* rho0, const ubw1_measure* rho1,
                    double* value, double* plan) {
  return guarded([&] {
    auto r = w1_distance(rho0->m, rho1->m);
    *value = r.value;
    if (plan) {
      int n = rho0->m.size();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) plan[i * n + j] = r.plan.m[i][j];
    }
  });
}

ubw1_status ubw1_solve_static(const ubw1_measure* rho0, const ubw1_measure* rho1,
                              const ubw1_disc* d, int k_cuts,
                              ubw1_solution** out) {
  return guarded([&] {
    *out = new ubw1_solution{solve_static(rho0->m, rho1->m, d->d, k_cuts)};
  });
}

void ubw1_solution_free(ubw1_solution* s) { delete s; }
int ubw1_solution_size(const ubw1_solution* s) { return s->s.rho0.size(); }

ubw1_status ubw1_solution_values(const ubw1_solution* s, double* primal,
                                 double* dual, double* gap) {
  return guarded([&] {
    if (primal) *primal = s->s.primal_value;
    if (dual) *dual = s->s.dual_value;
    if (gap) *gap = s->s.gap;
  });
}

ubw1_status ubw1_solution_data(const ubw1_solution* s, double* pi0, double* pi1,
                               double* alpha, double* beta, int* partition) {
  return guarded([&] {
    int n = s->s.rho0.size();
    for (int i = 0; i < n; ++i) {
      if (alpha) alpha[i] = s->s.alpha[i];
      if (beta) beta[i] = s->s.beta[i];
      if (partition)
        partition[i] = s->s.partition[i] == Region::plus
                           ? 1
                           : (s->s.partition[i] == Region::minus ? -1 : 0);
      for (int j = 0; j < n; ++j) {
        if (pi0) pi0[i * n + j] = s->s.pi0.m[i][j];
        if (pi1) pi1[i * n + j] = s->s.pi1.m[i][j];
      }
    }
  });
}

ubw1_status ubw1_solution_to_json(const ubw1_solution* s, char** out) {
  return guarded([&] { *out = dup_string(solution_to_json(s->s)); });
}

ubw1_status ubw1_solution_from_json(const char* json_text, ubw1_solution** out) {
  return guarded([&] { *out = new ubw1_solution{solution_from_json(json_text)}; });
}

ubw1_status ubw1_solution_verify(const ubw1_solution* s, int* n_violations,
                                 char** details) {
  return guarded([&] {
    auto v = verify_structure(s->s);
    if (n_violations) *n_violations = static_cast<int>(v.size());
    if (details) {
      std::string all;
      for (const auto& line : v) all += line + "\n";
      *details = dup_string(all);
    }
  });
}

ubw1_status ubw1_solution_canonicalize(const ubw1_solution* s, const ubw1_disc* d,
                                       ubw1_solution** out) {
  return guarded([&] { *out = new ubw1_solution{canonicalize(s->s, d->d)}; });
}

ubw1_status ubw1_dirac_solve(const ubw1_disc* d, double L, double m00, double m0L,
                             double m10, double m1L, double* a, double* b,
                             double* alpha, double* beta, double* s, int* regime,
                             double* value) {
  return guarded([&] {
    auto sol = solve_dirac(d->d, DiracInstance{L, m00, m0L, m10, m1L});
    if (a) *a = sol.a;
    if (b) *b = sol.b;
    if (alpha) *alpha = sol.alpha;
    if (beta) *beta = sol.beta;
    if (s) *s = sol.s;
    if (regime) *regime = static_cast<int>(sol.regime);
    if (value) *value = sol.value;
  });
}

ubw1_status ubw1_dirac_tangent(const ubw1_disc* d, double s, double* alpha,
                               double* beta, double* L_of_s) {
  return guarded([&] {
    auto t = tangent_split(d->d, s);
    if (alpha) *alpha = t.alpha;
    if (beta) *beta = t.beta;
    if (L_of_s) *L_of_s = t.L_of_s;
  });
}

ubw1_status ubw1_mass_trajectory(const ubw1_dyn* d, double m0, double m1,
                                 int steps, double* masses, double* rates,
                                 double* cost, double* excess) {
  return guarded([&] {
    auto tr = mass_trajectory(d->d, m0, m1, steps);
    if (masses)
      for (int k = 0; k <= steps; ++k) masses[k] = tr.masses[k];
    if (rates)
      for (int k = 0; k < steps; ++k) rates[k] = tr.rates[k];
    if (cost) *cost = tr.cost;
    if (excess) *excess = tr.excess;
  });
}

ubw1_status ubw1_assemble_dynamic(const ubw1_solution* s, const ubw1_disc* model,
                                  const ubw1_dyn* d, int steps,
                                  ubw1_dynopt** out) {
  return guarded([&] {
    *out = new ubw1_dynopt{assemble_dynamic(s->s, model->d, d->d, steps)};
  });
}

void ubw1_dynopt_free(ubw1_dynopt* o) { delete o; }

ubw1_status ubw1_dynopt_total_cost(const ubw1_dynopt* o, double* out) {
  return guarded([&] { *out = o->o.total_cost; });
}

ubw1_status ubw1_dynopt_residual(const ubw1_dynopt* o, int test_fns, double* out) {
  return guarded([&] { *out = continuity_residual(o->o, test_fns); });
}

int ubw1_dynopt_points(const ubw1_dynopt* o) {
  return static_cast<int>(o->o.trajectories.size());
}
int ubw1_dynopt_steps(const ubw1_dynopt* o) {
  return o->o.trajectories.empty()
             ? 0
             : static_cast<int>(o->o.trajectories[0].rates.size());
}

ubw1_status ubw1_dynopt_trajectory(const ubw1_dynopt* o, int point, double* masses,
                                   double* rates, double* cost) {
  return guarded([&] {
    require(point >= 0 && point < ubw1_dynopt_points(o), errc::invalid_argument,
            "trajectory index out of range");
    const auto& tr = o->o.trajectories[point];
    if (masses)
      for (size_t k = 0; k < tr.masses.size(); ++k) masses[k] = tr.masses[k];
    if (rates)
      for (size_t k = 0; k < tr.rates.size(); ++k) rates[k] = tr.rates[k];
    if (cost) *cost = tr.cost;
  });
}

ubw1_status ubw1_semicoupling(const ubw1_disc* d, double dx, double m0, double m1,
                              double* primal, double* dual) {
  return guarded([&] {
    auto [p, du] = semicoupling_cost(d->d, dx, m0, m1);
    if (primal) *primal = p;
    if (dual) *dual = du;
  });
}

int ubw1_selftest(void) { return run_acceptance(stdout); }

}  // extern "C"
