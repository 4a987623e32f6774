#pragma once

// Dynamic mass-change penalties h_D, their conjugate cost c_D, and the
// autonomous scalar flow F_t of dphi/dt = h_D(phi): the bridge between
// dynamic and static models (the static profile is the time-1 flow).

#include <memory>
#include <string>

#include "discrepancy.hpp"
#include "hfunction.hpp"

namespace ubw1 {

struct FlowResult {
  double value = -kInf;            // F_t(z); -inf when infeasible
  bool reached_fixed_point = false;
};

class DynamicPenalty {
 public:
  // Closed-form rows: exact | tv | pwl(dlo,slo,a,shi,dhi,b) | hellinger |
  // jensen_shannon (alias js). Rows without a closed-form dynamic profile
  // (chi2, kl0, kl1, power) must come from the reconstruction module.
  static DynamicPenalty catalog(const std::string& spec);

  // Wrap an arbitrary dynamic profile (e.g. a reconstructed q[h_S]).
  static DynamicPenalty from_profile(HFunction h_d);

  const HFunction& h_d() const { return h_; }
  const std::string& name() const { return h_.name(); }
  double fixed_lo() const { return fix_lo_; }
  double fixed_hi() const { return fix_hi_; }
  double dom_lo() const { return h_.domain_lo(); }
  double dom_hi() const { return h_.domain_hi(); }
  bool polyhedral() const { return poly_; }

  // c_D(rho, zeta) = sup_z rho h_D(z) + zeta z.
  double cd(double rho, double zeta) const;
  // A supergradient (d/d rho, d/d zeta) of c_D at (rho, zeta), rho > 0.
  std::pair<double, double> cd_grad(double rho, double zeta) const;

  FlowResult flow(double t, double z) const;
  FlowResult inverse_flow(double t, double z) const;

  const DynamicPenalty& reflected() const;  // penalty with profile h_D(-.)

  // Total time for the flow started at z < fixed_lo to leave the domain,
  // capped at 'cap' (cap returned when the exit takes at least that long).
  double exit_time(double z, double cap) const;

 private:
  HFunction h_;
  double fix_lo_ = 0.0, fix_hi_ = 0.0;
  enum class Analytic { none, zero, hellinger, js };
  Analytic analytic_ = Analytic::none;
  bool poly_ = false;
  mutable std::shared_ptr<DynamicPenalty> refl_;

  void detect_fixed_interval();
  double segment_time_above(double y_lo, double y_hi) const;  // both > fix_hi
  double segment_time_below(double y_lo, double y_hi) const;  // both < fix_lo
  FlowResult flow_above(double t, double z) const;
  FlowResult flow_below(double t, double z) const;
  // exact descent through the linear pieces of a piecewise profile
  FlowResult flow_piecewise(double t, double z, bool positive_side) const;
  double exit_time_piecewise(double z, double cap) const;
  int argmax_knot(double rho, double zeta) const;
};

// The static profile h_S = F_1 induced by a dynamic penalty, with the
// upper clamp beyond sup dom h_D and -inf below inf dom F_1.
HFunction h_s_profile_from_dynamic(const DynamicPenalty& dp);

// Same, wrapped as a static model.
LocalDiscrepancy static_model_from_dynamic(const DynamicPenalty& dp);

}  // namespace ubw1
