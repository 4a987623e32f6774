#pragma once

// Dynamic-side objects built from static solutions: optimal single-point
// mass-change trajectories, assembled (jump, growth, jump) optimizers,
// weak continuity-equation residuals, feasible dual surfaces from the
// auxiliary flow combinations, and semi-coupling costs.

#include <vector>

#include "flow.hpp"
#include "transport.hpp"

namespace ubw1 {

struct MassTrajectory {
  std::vector<double> times;   // steps+1 nodes on [0, T]
  std::vector<double> masses;  // nonnegative, masses.front()=m0, back()=m1
  std::vector<double> rates;   // difference quotients, one per interval
  double cost = 0.0;
  double excess = 0.0;         // discretization-excess estimate
};

// Minimize the time-discretized growth cost between masses m0 and m1 over
// duration T (damped Newton for smooth penalties, the LP core for
// polyhedral ones).
MassTrajectory mass_trajectory(const DynamicPenalty& dp, double m0, double m1,
                               int steps, double T = 1.0);

struct DynamicOptimizer {
  DiscreteMeasure rho0, rho1;
  Coupling jump0, jump1;                  // instantaneous transports at t=0,1
  std::vector<MassTrajectory> trajectories;  // one per point
  double total_cost = 0.0;
};

DynamicOptimizer assemble_dynamic(const TransportSolution& sol,
                                  const LocalDiscrepancy& disc,
                                  const DynamicPenalty& dp, int steps);

// Max absolute residual of the weak continuity identity against the first
// test_fns members of the (polynomial in t) x (hat in x) family.
double continuity_residual(const DynamicOptimizer& opt, int test_fns = 32);

class DualPotentialSurface {
 public:
  DualPotentialSurface(const DynamicPenalty& dp, std::vector<double> alpha,
                       std::vector<double> beta);
  double phi(double t, int x) const;
  double dphi_dt(double t, int x) const;  // small-step finite difference
  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<double>& beta() const { return beta_; }

 private:
  std::shared_ptr<const DynamicPenalty> dp_;
  std::vector<double> alpha_, beta_;
  std::vector<double> f1_;     // F_1(-alpha(x)) per point
  std::vector<double> finv1_;  // F^inv_1(beta(x)) per point
};

// Clamp potentials into the feasible pre-image set (domains and the
// beta <= F_1(-alpha) ceiling).
void clamp_to_feasible(const DynamicPenalty& dp, std::vector<double>& alpha,
                       std::vector<double>& beta);

// Semi-coupling cost at separation dx: primal infimal-convolution split and
// the sampled dual over the shifted-intersection constraint set.
std::pair<double, double> semicoupling_cost(const LocalDiscrepancy& disc,
                                            double dx, double m0, double m1);

}  // namespace ubw1
