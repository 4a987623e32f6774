/* ubw1 — unbalanced Wasserstein-1 transport in static and dynamic form.
 *
 * C interface to the solver core: opaque handles, integer status codes,
 * thread-local error messages. All handles are freed with their matching
 * *_free function; output arrays are caller-allocated unless noted.
 */

#ifndef UBW1_H
#define UBW1_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define UBW1_API __declspec(dllexport)
#else
#define UBW1_API __attribute__((visibility("default")))
#endif

typedef enum ubw1_status {
  UBW1_OK = 0,
  UBW1_ERR_INVALID_ARGUMENT,
  UBW1_ERR_UNKNOWN_NAME,
  UBW1_ERR_NEGATIVE_MASS,
  UBW1_ERR_MASS_MISMATCH,
  UBW1_ERR_EMPTY_SPACE,
  UBW1_ERR_SPACE_MISMATCH,
  UBW1_ERR_INFEASIBLE_MODEL,
  UBW1_ERR_INFEASIBLE_CHANGE,
  UBW1_ERR_INFEASIBLE_PAIR,
  UBW1_ERR_MODEL_MISMATCH,
  UBW1_ERR_NON_CONVERGENCE,
  UBW1_ERR_DEGENERATE_SLOPE,
  UBW1_ERR_CYCLE_GUARD,
  UBW1_ERR_NOT_OPTIMAL,
  UBW1_ERR_OUT_OF_RANGE,
  UBW1_ERR_INCONCLUSIVE,
  UBW1_ERR_PARSE,
  UBW1_ERR_IO,
  UBW1_ERR_INTERNAL
} ubw1_status;

UBW1_API const char* ubw1_status_name(ubw1_status s);
/* Message of the most recent failure on this thread. */
UBW1_API const char* ubw1_last_error(void);
/* Free any string returned through a char** out parameter. */
UBW1_API void ubw1_string_free(char* s);

/* ---------- static models (local discrepancies) ---------- */

typedef struct ubw1_disc ubw1_disc;

/* spec: exact | tv | pwl(dlo,slo,a,shi,dhi,b) | hellinger | jensen_shannon |
 * js | chi2 | kl0 | kl1 | power(p) | custom_pwl(x0:y0,x1:y1,...) */
UBW1_API ubw1_status ubw1_disc_create(const char* spec, ubw1_disc** out);
/* {"h_s": {"breakpoints": [...], "values": [...]}} */
UBW1_API ubw1_status ubw1_disc_from_json(const char* json_text, ubw1_disc** out);
UBW1_API void ubw1_disc_free(ubw1_disc* d);
UBW1_API const char* ubw1_disc_name(const ubw1_disc* d);
UBW1_API ubw1_status ubw1_disc_cs(const ubw1_disc* d, double m0, double m1,
                                  double* out);
UBW1_API ubw1_status ubw1_disc_hs(const ubw1_disc* d, double z, double* out);
UBW1_API ubw1_status ubw1_disc_hbar(const ubw1_disc* d, double z, double* out);
/* k boundary points of B_S ordered by alpha; arrays of length k. */
UBW1_API ubw1_status ubw1_disc_support(const ubw1_disc* d, int k, double* alpha,
                                       double* beta);
UBW1_API ubw1_status ubw1_disc_max_transport_distances(const ubw1_disc* d,
                                                       double* L0, double* L1);
UBW1_API ubw1_status ubw1_disc_check_conditions(const ubw1_disc* d,
                                                int* necessary_ok,
                                                int* sufficient_ok,
                                                char** details);

/* ---------- dynamic models and the flow ---------- */

typedef struct ubw1_dyn ubw1_dyn;

/* spec: exact | tv | pwl(dlo,slo,a,shi,dhi,b) | hellinger | jensen_shannon */
UBW1_API ubw1_status ubw1_dyn_create(const char* spec, ubw1_dyn** out);
UBW1_API void ubw1_dyn_free(ubw1_dyn* d);
UBW1_API ubw1_status ubw1_dyn_hd(const ubw1_dyn* d, double z, double* out);
UBW1_API ubw1_status ubw1_dyn_cd(const ubw1_dyn* d, double rho, double zeta,
                                 double* out);
UBW1_API ubw1_status ubw1_dyn_flow(const ubw1_dyn* d, double t, double z,
                                   double* value, int* reached_fixed_point);
UBW1_API ubw1_status ubw1_dyn_inverse_flow(const ubw1_dyn* d, double t, double z,
                                           double* value, int* reached_fixed_point);
/* Static model induced by the time-1 flow. */
UBW1_API ubw1_status ubw1_dyn_static_model(const ubw1_dyn* d, ubw1_disc** out);

/* ---------- reconstruction of h_D from h_S ---------- */

typedef struct ubw1_report ubw1_report;

UBW1_API ubw1_status ubw1_reconstruct(const ubw1_disc* d, const double* grid,
                                      int n, double tol, int max_iter,
                                      ubw1_report** out);
UBW1_API void ubw1_report_free(ubw1_report* r);
UBW1_API int ubw1_report_size(const ubw1_report* r);
/* Arrays of length ubw1_report_size; any pointer may be NULL. */
UBW1_API ubw1_status ubw1_report_rows(const ubw1_report* r, double* z, double* q,
                                      int* iterations, int* converged);
/* order: d_lo, d_hi, zeta_lo, zeta_hi, m_lo, m_hi, c_lo, c_hi */
UBW1_API ubw1_status ubw1_report_constants(const ubw1_report* r, double out[8]);
UBW1_API ubw1_status ubw1_report_q_at(const ubw1_report* r, double z, double* out);
/* witness receives a dynamic model when one exists (else NULL). */
UBW1_API ubw1_status ubw1_report_decide(const ubw1_report* r, int concavity_grid,
                                        int* exists, ubw1_dyn** witness);

/* ---------- measures and the static solver ---------- */

typedef struct ubw1_measure ubw1_measure;
typedef struct ubw1_solution ubw1_solution;

UBW1_API ubw1_status ubw1_measure_from_json(const char* json_text,
                                            ubw1_measure** out);
/* points: n*dim row-major; matrix: n*n explicit distances or NULL for
 * Euclidean; weights: n nonnegative entries. */
UBW1_API ubw1_status ubw1_measure_create(const double* points, int n, int dim,
                                         const double* matrix,
                                         const double* weights,
                                         ubw1_measure** out);
UBW1_API void ubw1_measure_free(ubw1_measure* m);
UBW1_API int ubw1_measure_size(const ubw1_measure* m);
UBW1_API ubw1_status ubw1_measure_mass(const ubw1_measure* m, double* out);
UBW1_API ubw1_status ubw1_measure_to_json(const ubw1_measure* m, char** out);

/* Balanced W1; plan (n*n row-major) may be NULL. */
UBW1_API ubw1_status ubw1_w1(const ubw1_measure* rho0, const ubw1_measure* rho1,
                             double* value, double* plan);

UBW1_API ubw1_status ubw1_solve_static(const ubw1_measure* rho0,
                                       const ubw1_measure* rho1,
                                       const ubw1_disc* d, int k_cuts,
                                       ubw1_solution** out);
UBW1_API void ubw1_solution_free(ubw1_solution* s);
UBW1_API int ubw1_solution_size(const ubw1_solution* s);
UBW1_API ubw1_status ubw1_solution_values(const ubw1_solution* s, double* primal,
                                          double* dual, double* gap);
/* Any pointer may be NULL; couplings are n*n row-major, partition entries
 * are +1 (growth), -1 (shrink), 0 (unchanged). */
UBW1_API ubw1_status ubw1_solution_data(const ubw1_solution* s, double* pi0,
                                        double* pi1, double* alpha, double* beta,
                                        int* partition);
UBW1_API ubw1_status ubw1_solution_to_json(const ubw1_solution* s, char** out);
UBW1_API ubw1_status ubw1_solution_from_json(const char* json_text,
                                             ubw1_solution** out);
UBW1_API ubw1_status ubw1_solution_verify(const ubw1_solution* s,
                                          int* n_violations, char** details);
UBW1_API ubw1_status ubw1_solution_canonicalize(const ubw1_solution* s,
                                                const ubw1_disc* d,
                                                ubw1_solution** out);

/* ---------- two-Dirac analysis ---------- */

/* regimes: 0 interior, 1 boundary_a0, 2 boundary_b0, 3 boundary_other */
UBW1_API ubw1_status ubw1_dirac_solve(const ubw1_disc* d, double L, double m00,
                                      double m0L, double m10, double m1L,
                                      double* a, double* b, double* alpha,
                                      double* beta, double* s, int* regime,
                                      double* value);
UBW1_API ubw1_status ubw1_dirac_tangent(const ubw1_disc* d, double s,
                                        double* alpha, double* beta,
                                        double* L_of_s);

/* ---------- dynamic-side construction ---------- */

typedef struct ubw1_dynopt ubw1_dynopt;

/* masses: steps+1 entries; rates: steps entries; either may be NULL. */
UBW1_API ubw1_status ubw1_mass_trajectory(const ubw1_dyn* d, double m0, double m1,
                                          int steps, double* masses, double* rates,
                                          double* cost, double* excess);
UBW1_API ubw1_status ubw1_assemble_dynamic(const ubw1_solution* s,
                                           const ubw1_disc* model,
                                           const ubw1_dyn* d, int steps,
                                           ubw1_dynopt** out);
UBW1_API void ubw1_dynopt_free(ubw1_dynopt* o);
UBW1_API ubw1_status ubw1_dynopt_total_cost(const ubw1_dynopt* o, double* out);
UBW1_API ubw1_status ubw1_dynopt_residual(const ubw1_dynopt* o, int test_fns,
                                          double* out);
UBW1_API int ubw1_dynopt_points(const ubw1_dynopt* o);
UBW1_API int ubw1_dynopt_steps(const ubw1_dynopt* o);
/* Trajectory of one point: masses steps+1, rates steps. */
UBW1_API ubw1_status ubw1_dynopt_trajectory(const ubw1_dynopt* o, int point,
                                            double* masses, double* rates,
                                            double* cost);

UBW1_API ubw1_status ubw1_semicoupling(const ubw1_disc* d, double dx, double m0,
                                       double m1, double* primal, double* dual);

/* Acceptance suite: prints one pass/fail line per criterion to stdout and
 * returns the number of failures. */
UBW1_API int ubw1_selftest(void);

#ifdef __cplusplus
}
#endif

#endif /* UBW1_H */
