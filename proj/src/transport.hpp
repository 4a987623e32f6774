#pragma once

// The static unbalanced problem on discrete measures: W_S(rho0, rho1) =
// inf { transport + C_S + transport }, solved through the LP core with an
// outer linearization of B_S, plus optimizer-structure checks.

#include <string>
#include <vector>

#include "discrepancy.hpp"
#include "measures.hpp"

namespace ubw1 {

enum class Region { plus, minus, equal };
const char* region_name(Region r);

struct TransportSolution {
  DiscreteMeasure rho0, rho1;
  std::string model;
  int k_cuts = 0;
  Coupling pi0, pi1;
  DiscreteMeasure rho0p, rho1p;      // P_Y pi0 and P_X pi1
  std::vector<double> alpha, beta;   // certified feasible dual potentials
  double primal_value = 0.0;         // exact objective of (pi0, pi1)
  double dual_value = 0.0;           // exact objective of (alpha, beta)
  double gap = 0.0;
  std::vector<Region> partition;
};

// Solve the static problem; k_cuts supporting points seed the linearization
// and instance-adapted tangent cuts refine it until the bracket closes.
TransportSolution solve_static(const DiscreteMeasure& rho0,
                               const DiscreteMeasure& rho1,
                               const LocalDiscrepancy& disc, int k_cuts = 65);

// Necessary optimality conditions I & II on the coupling supports; empty
// result means no violation (each check at mass-weighted tolerance 1e-6).
std::vector<std::string> verify_structure(const TransportSolution& sol);

// Reroute mass (shortcut through the unchanged region, diagonalize the
// second coupling there, move shrink-region chains to the second coupling)
// without increasing the objective.
TransportSolution canonicalize(const TransportSolution& sol,
                               const LocalDiscrepancy& disc);

// (L0, L1) distance thresholds beyond which optimal couplings move no mass.
std::pair<double, double> max_transport_distances(const LocalDiscrepancy& disc);

}  // namespace ubw1
