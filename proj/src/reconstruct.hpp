#pragma once

// Recovery of the dynamic profile from a static one: the iterated-composition
// limit q[h_S], the structural constants (d, zeta, m, c), and the decision
// whether a static model admits an equivalent dynamic formulation.

#include <optional>
#include <string>
#include <vector>

#include "discrepancy.hpp"
#include "flow.hpp"

namespace ubw1 {

struct ReconstructionReport {
  std::string model;
  std::vector<double> grid;      // sorted query points
  std::vector<double> q;         // q[h_S] per point (-inf outside [d_lo, d_hi])
  std::vector<int> iterations;   // iterations used per point
  std::vector<char> converged;   // per point
  double d_lo = -kInf, d_hi = kInf;      // domain endpoints of q
  double zeta_lo = 0.0, zeta_hi = 0.0;   // fixed-point endpoints
  double m_lo = 1.0, m_hi = 1.0;         // boundary slopes
  double c_lo = 1.0, c_hi = 1.0;         // scaling constants
  bool necessary_ok = true, sufficient_ok = true;

  double q_at(double z) const;   // linear interpolation on the grid
  double converged_fraction() const;
};

ReconstructionReport reconstruct(const LocalDiscrepancy& disc,
                                 std::vector<double> grid, double tol = 1e-7,
                                 int max_iter = 100000);

struct DynamicDecision {
  bool exists = false;
  std::optional<DynamicPenalty> witness;
  std::string reason;
};

DynamicDecision decide_dynamic(const ReconstructionReport& report,
                               int concavity_grid = 257);

struct ConditionReport {
  bool necessary_ok = true;
  bool sufficient_ok = true;
  std::string details;
};

ConditionReport check_conditions(const LocalDiscrepancy& disc);

struct ProfileRow {
  double z, q, cd1;
};

// Table-2 style numeric profile: (z, q(z), c_D(1, z)) rows.
std::vector<ProfileRow> emit_profile(const ReconstructionReport& report);

// c-constant branch: log(m)/(1 - 1/m) continued by 1 at m = 1 and 0 at m = 0.
double c_constant(double m);

}  // namespace ubw1
