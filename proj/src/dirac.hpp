#pragma once

// Semi-analytic transport between two two-Dirac configurations at distance L:
// the tangent construction on c_S(1,.), the distance map L(s), the (a,b)
// resolution, and the phase classification.

#include <string>
#include <vector>

#include "discrepancy.hpp"

namespace ubw1 {

struct DiracInstance {
  double L = 1.0;            // site distance
  double m00 = 0.0, m0L = 0.0;  // rho0 masses at sites 0 and L
  double m10 = 0.0, m1L = 0.0;  // rho1 masses
};

enum class DiracRegime { interior, boundary_a0, boundary_b0, boundary_other };
const char* regime_name(DiracRegime r);

struct TangentSplit {
  double alpha;   // relative change at the shrinking site, in [0, 1]
  double beta;    // relative change at the growing site, >= 1 (+inf possible)
  double L_of_s;  // tangent-slope difference
};

// Tangents to c_S(1,.) through the intercept (1, s), s < 0; kinks are handled
// through subgradient-interval endpoints.
TangentSplit tangent_split(const LocalDiscrepancy& disc, double s);

struct DiracSolution {
  double a = 0.0, b = 0.0;      // mass moved before / after the change
  double alpha = kNaN, beta = kNaN;
  double s = kNaN;              // tangent intercept (interior case only)
  DiracRegime regime = DiracRegime::boundary_other;
  double value = 0.0;
  bool swapped = false;         // true when the sites were relabeled
  bool unique_hint = true;      // false when a flat tangent made the optimum a set
};

DiracSolution solve_dirac(const LocalDiscrepancy& disc, const DiracInstance& inst);

struct PhaseRow {
  double L, ratio;
  DiracRegime regime;
};

// Single-Dirac-per-measure sweep (m00 = 1, m1L = ratio).
std::vector<PhaseRow> phase_diagram(const LocalDiscrepancy& disc,
                                    const std::vector<double>& L_grid,
                                    const std::vector<double>& ratio_grid);

// Direct evaluation of the two-Dirac objective P(a, b).
double dirac_objective(const LocalDiscrepancy& disc, const DiracInstance& inst,
                       double a, double b);

}  // namespace ubw1
