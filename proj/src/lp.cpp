#include "lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "error.hpp"

namespace ubw1 {

LinearProgram::LinearProgram(int nvars) : n(nvars), c(nvars, 0.0) {
  require(nvars >= 1, errc::invalid_argument, "LP needs at least one variable");
  lo.assign(nvars, 0.0);
  hi.assign(nvars, kInf);
}

void LinearProgram::add_row(std::vector<double> row, Sense s, double rhs) {
  require(static_cast<int>(row.size()) == n, errc::invalid_argument,
          "LP row length mismatch");
  A.push_back(std::move(row));
  sense.push_back(s);
  b.push_back(rhs);
}

namespace {

constexpr double kPivEps = 1e-11;
constexpr double kRcEps = 1e-9;
constexpr long kPivotCap = 1000000;

struct Tableau {
  int m = 0, width = 0;                 // rows, columns (without rhs)
  std::vector<std::vector<double>> T;   // m x (width+1), last col = rhs
  std::vector<double> rc;               // width reduced costs
  std::vector<double> phase_cost;       // cost vector backing rc
  std::vector<int> basis;               // m basic column indices
  std::vector<char> banned;             // columns excluded from entering
  double obj_shift = 0.0;
  long pivots = 0;
  bool bland = false;
  bool perturbed = false;
  int stall = 0;

  // deterministic tiny rhs perturbation; the classical degeneracy breaker
  void perturb_rhs() {
    double scale = 0.0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(T[i][width]));
    scale = 1e-10 * (1.0 + scale);
    for (int i = 0; i < m; ++i) {
      unsigned h = static_cast<unsigned>(i + 1) * 2654435761u;
      T[i][width] += scale * (1.0 + (h % 4096) / 4096.0);
    }
    perturbed = true;
  }

  void pivot(int r, int jin) {
    double piv = T[r][jin];
    double inv = 1.0 / piv;
    auto& Rr = T[r];
    for (int j = 0; j <= width; ++j) Rr[j] *= inv;
    Rr[jin] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double f = T[i][jin];
      if (f == 0.0) continue;
      auto& Ri = T[i];
      for (int j = 0; j <= width; ++j) Ri[j] -= f * Rr[j];
      Ri[jin] = 0.0;
    }
    double f = rc[jin];
    if (f != 0.0) {
      for (int j = 0; j < width; ++j) rc[j] -= f * Rr[j];
      obj_shift -= f * Rr[width];
      rc[jin] = 0.0;
    }
    basis[r] = jin;
    ++pivots;
  }

  enum class Step { moved, optimal, unbounded };

  // Harris-style two-pass ratio test: pass one fixes the admissible ratio
  // ceiling under a small feasibility slack, pass two picks the numerically
  // largest pivot (smallest basis index in Bland mode) under that ceiling.
  int ratio_row(int jin, double piv_tol) const {
    const double delta = 1e-9;
    double ceiling = kInf;
    for (int i = 0; i < m; ++i) {
      double a = T[i][jin];
      if (a <= piv_tol) continue;
      double t = (std::max(T[i][width], 0.0) + delta) / a;
      if (t < ceiling) ceiling = t;
    }
    if (ceiling == kInf) return -1;
    int r = -1;
    for (int i = 0; i < m; ++i) {
      double a = T[i][jin];
      if (a <= piv_tol) continue;
      double t = std::max(T[i][width], 0.0) / a;
      if (t > ceiling) continue;
      if (r < 0 || (bland ? basis[i] < basis[r] : a > T[r][jin])) r = i;
    }
    return r;
  }

  Step iterate() {
    while (true) {
      int jin = -1;
      if (!bland) {
        double best = -kRcEps;
        for (int j = 0; j < width; ++j) {
          if (banned[j]) continue;
          if (rc[j] < best) {
            best = rc[j];
            jin = j;
          }
        }
      } else {
        for (int j = 0; j < width; ++j) {
          if (banned[j]) continue;
          if (rc[j] < -kRcEps) {
            jin = j;
            break;
          }
        }
      }
      if (jin < 0) return Step::optimal;
      int r = ratio_row(jin, kPivEps);
      if (r < 0) {
        double colmax = 0.0;
        for (int i = 0; i < m; ++i)
          colmax = std::max(colmax, std::abs(T[i][jin]));
        if (colmax <= 1e-7) {
          banned[jin] = 1;  // numerically void column, not a true ray
          continue;
        }
        return Step::unbounded;
      }
      double theta = std::max(T[r][width], 0.0) / T[r][jin];
      if (theta <= 1e-13) {
        ++stall;
        if (stall == 256 && !perturbed) {
          perturb_rhs();
        } else if (stall > 4096) {
          bland = true;
        }
      } else {
        stall = 0;
      }
      pivot(r, jin);
      if (pivots % 4096 == 0) set_costs(phase_cost);  // shed drift
      if (pivots % 100000 == 0 && std::getenv("UBW1_LP_TRACE"))
        std::fprintf(stderr,
                     "[simplex] pivots=%ld m=%d width=%d bland=%d stall=%d obj=%.12g theta=%g\n",
                     pivots, m, width, bland ? 1 : 0, stall, -obj_shift, theta);
      if (pivots > kPivotCap)
        fail(errc::cycle_guard, "simplex exceeded the pivot budget");
      return Step::moved;
    }
  }

  void set_costs(const std::vector<double>& cost) {
    if (&cost != &phase_cost) phase_cost = cost;
    rc = phase_cost;
    obj_shift = 0.0;
    for (int i = 0; i < m; ++i) {
      double cb = phase_cost[basis[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j < width; ++j) rc[j] -= cb * T[i][j];
      obj_shift -= cb * T[i][width];
      rc[basis[i]] = 0.0;
    }
    for (int i = 0; i < m; ++i) rc[basis[i]] = 0.0;
  }
};

}  // namespace

LpResult lp_solve(const LinearProgram& lp) {
  for (double cj : lp.c)
    require(is_finite(cj), errc::invalid_argument, "objective must be finite");

  const int m = lp.rows();
  // --- presolve variable bounds into x' >= 0 form ---
  // col_map: for each original var, (mode, first transformed col)
  // mode 0: x = x' + lo ; mode 1: x = hi - x' ; mode 2: x = x'a - x'b (free)
  struct VarMap {
    int mode;
    int col;
    double shift;
  };
  std::vector<VarMap> vmap(lp.n);
  int n2 = 0;
  for (int j = 0; j < lp.n; ++j) {
    if (lp.lo[j] > -kInf) {
      vmap[j] = {0, n2++, lp.lo[j]};
    } else if (lp.hi[j] < kInf) {
      vmap[j] = {1, n2++, lp.hi[j]};
    } else {
      vmap[j] = {2, n2, 0.0};
      n2 += 2;
    }
  }
  std::vector<std::pair<int, double>> ub_rows;  // (transformed col, bound)
  for (int j = 0; j < lp.n; ++j)
    if (lp.lo[j] > -kInf && lp.hi[j] < kInf)
      ub_rows.push_back({vmap[j].col, lp.hi[j] - lp.lo[j]});

  const int mt = m + static_cast<int>(ub_rows.size());
  std::vector<std::vector<double>> A2(mt, std::vector<double>(n2, 0.0));
  std::vector<double> b2(mt, 0.0);
  std::vector<Sense> s2(mt);
  std::vector<double> c2(n2, 0.0);
  double const_obj = 0.0;
  for (int j = 0; j < lp.n; ++j) {
    const auto& vm = vmap[j];
    if (vm.mode == 0) {
      c2[vm.col] = lp.c[j];
      const_obj += lp.c[j] * vm.shift;
    } else if (vm.mode == 1) {
      c2[vm.col] = -lp.c[j];
      const_obj += lp.c[j] * vm.shift;
    } else {
      c2[vm.col] = lp.c[j];
      c2[vm.col + 1] = -lp.c[j];
    }
  }
  for (int i = 0; i < m; ++i) {
    s2[i] = lp.sense[i];
    double rhs = lp.b[i];
    for (int j = 0; j < lp.n; ++j) {
      double a = lp.A[i][j];
      if (a == 0.0) continue;
      const auto& vm = vmap[j];
      if (vm.mode == 0) {
        A2[i][vm.col] += a;
        rhs -= a * vm.shift;
      } else if (vm.mode == 1) {
        A2[i][vm.col] -= a;
        rhs -= a * vm.shift;
      } else {
        A2[i][vm.col] += a;
        A2[i][vm.col + 1] -= a;
      }
    }
    b2[i] = rhs;
  }
  for (size_t k = 0; k < ub_rows.size(); ++k) {
    int i = m + static_cast<int>(k);
    A2[i][ub_rows[k].first] = 1.0;
    b2[i] = ub_rows[k].second;
    s2[i] = Sense::le;
  }

  // --- normalize b >= 0 ---
  std::vector<double> row_flip(mt, 1.0);
  for (int i = 0; i < mt; ++i) {
    if (b2[i] < 0.0) {
      row_flip[i] = -1.0;
      b2[i] = -b2[i];
      for (auto& a : A2[i]) a = -a;
      s2[i] = s2[i] == Sense::le ? Sense::ge : (s2[i] == Sense::ge ? Sense::le : Sense::eq);
    }
  }

  // --- tableau layout: [structural n2][slack/surplus][artificial mt][rhs] ---
  int n_slack = 0;
  for (auto s : s2)
    if (s != Sense::eq) ++n_slack;
  const int width = n2 + n_slack + mt;
  Tableau tb;
  tb.m = mt;
  tb.width = width;
  tb.T.assign(mt, std::vector<double>(width + 1, 0.0));
  tb.basis.assign(mt, -1);
  tb.banned.assign(width, 0);

  int sl = 0;
  for (int i = 0; i < mt; ++i) {
    for (int j = 0; j < n2; ++j) tb.T[i][j] = A2[i][j];
    tb.T[i][width] = b2[i];
    if (s2[i] == Sense::le) {
      tb.T[i][n2 + sl] = 1.0;
      tb.basis[i] = n2 + sl;
      ++sl;
    } else if (s2[i] == Sense::ge) {
      tb.T[i][n2 + sl] = -1.0;
      ++sl;
    }
    tb.T[i][n2 + n_slack + i] = 1.0;  // artificial (basis for eq/ge rows)
    if (tb.basis[i] < 0) tb.basis[i] = n2 + n_slack + i;
  }

  LpResult res;

  // --- phase 1 ---
  {
    std::vector<double> cost(width, 0.0);
    for (int i = 0; i < mt; ++i) cost[n2 + n_slack + i] = 1.0;
    tb.set_costs(cost);
    while (true) {
      auto step = tb.iterate();
      if (step == Tableau::Step::optimal) break;
      if (step == Tableau::Step::unbounded)
        fail(errc::internal, "phase 1 unbounded");
    }
    double scale = 1.0;
    for (double bi : b2) scale = std::max(scale, std::abs(bi));
    double infeas = -tb.obj_shift;  // phase-1 objective value
    if (infeas > 1e-8 * scale) {
      res.status = LpStatus::infeasible;
      res.pivots = tb.pivots;
      return res;
    }
    // drive artificials out of the basis where possible
    for (int i = 0; i < mt; ++i) {
      if (tb.basis[i] < n2 + n_slack) continue;
      int piv = -1;
      for (int j = 0; j < n2 + n_slack; ++j) {
        if (std::abs(tb.T[i][j]) > 1e-9) {
          piv = j;
          break;
        }
      }
      if (piv >= 0) tb.pivot(i, piv);
      // else: redundant row, the artificial stays basic at level zero
    }
    std::fill(tb.banned.begin(), tb.banned.end(), 0);
    for (int i = 0; i < mt; ++i) tb.banned[n2 + n_slack + i] = 1;
  }

  // --- phase 2 ---
  {
    std::vector<double> cost(width, 0.0);
    for (int j = 0; j < n2; ++j) cost[j] = c2[j];
    tb.set_costs(cost);
    tb.bland = false;
    tb.stall = 0;
    while (true) {
      auto step = tb.iterate();
      if (step == Tableau::Step::optimal) break;
      if (step == Tableau::Step::unbounded) {
        res.status = LpStatus::unbounded;
        res.pivots = tb.pivots;
        return res;
      }
    }
  }

  // --- extract primal ---
  std::vector<double> x2(n2, 0.0);
  for (int i = 0; i < mt; ++i)
    if (tb.basis[i] < n2) x2[tb.basis[i]] = tb.T[i][width];
  res.x.assign(lp.n, 0.0);
  for (int j = 0; j < lp.n; ++j) {
    const auto& vm = vmap[j];
    if (vm.mode == 0)
      res.x[j] = x2[vm.col] + vm.shift;
    else if (vm.mode == 1)
      res.x[j] = vm.shift - x2[vm.col];
    else
      res.x[j] = x2[vm.col] - x2[vm.col + 1];
  }
  (void)const_obj;
  double obj = 0.0;
  for (int j = 0; j < lp.n; ++j) obj += lp.c[j] * res.x[j];
  res.objective = obj;

  // --- duals: y_i = -rc(artificial_i), unflipped ---
  res.duals.assign(m, 0.0);
  for (int i = 0; i < m; ++i)
    res.duals[i] = -tb.rc[n2 + n_slack + i] * row_flip[i];
  res.pivots = tb.pivots;
  res.status = LpStatus::optimal;
  return res;
}

}  // namespace ubw1
