#pragma once

// Dense two-phase primal simplex with deterministic pivoting (Dantzig with
// lowest-index tie break, falling back to Bland's rule on degenerate stalls).

#include <vector>

#include "numeric.hpp"

namespace ubw1 {

enum class Sense { le, eq, ge };
enum class LpStatus { optimal, infeasible, unbounded };

struct LinearProgram {
  int n = 0;                           // variables
  std::vector<double> c;               // minimize c.x
  std::vector<std::vector<double>> A;  // rows
  std::vector<double> b;
  std::vector<Sense> sense;
  std::vector<double> lo, hi;          // variable bounds; default [0, inf)

  explicit LinearProgram(int nvars);
  void add_row(std::vector<double> row, Sense s, double rhs);
  int rows() const { return static_cast<int>(A.size()); }
};

struct LpResult {
  LpStatus status = LpStatus::optimal;
  std::vector<double> x;
  std::vector<double> duals;  // one multiplier per row; y.A <= c componentwise
  double objective = 0.0;
  long pivots = 0;
};

// Throws CycleGuardExceeded after 10^6 pivots.
LpResult lp_solve(const LinearProgram& lp);

}  // namespace ubw1
