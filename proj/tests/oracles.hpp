#pragma once

// Independent oracles used by the test suite: brute-force vertex enumeration
// for small transport problems and generic LPs, and grid minimization for the
// two-Dirac objective. These never touch the solver paths they check.

#include <algorithm>
#include <functional>
#include <limits>
#include <cmath>
#include <vector>

#include "discrepancy.hpp"
#include "measures.hpp"

namespace oracle {

// Exact balanced transport value on <= 4 points by enumerating basic feasible
// supports (forests of the bipartite graph with at most n+m-1 arcs).
inline double w1_bruteforce(const std::vector<std::vector<double>>& d,
                            const std::vector<double>& supply,
                            const std::vector<double>& demand) {
  int n = static_cast<int>(supply.size());
  int m = static_cast<int>(demand.size());
  int arcs = n * m;
  int rows = n + m;
  double best = std::numeric_limits<double>::infinity();

  std::vector<int> sel;
  std::vector<std::vector<double>> A;
  std::vector<double> b(rows);
  for (int i = 0; i < n; ++i) b[i] = supply[i];
  for (int j = 0; j < m; ++j) b[n + j] = demand[j];

  // solve A_S x = b in the least-squares sense via Gaussian elimination on
  // the (rows x k) system; reject when inconsistent
  auto try_support = [&](const std::vector<int>& s) {
    int k = static_cast<int>(s.size());
    std::vector<std::vector<double>> M(rows, std::vector<double>(k + 1, 0.0));
    for (int c = 0; c < k; ++c) {
      int i = s[c] / m, j = s[c] % m;
      M[i][c] = 1.0;
      M[n + j][c] = 1.0;
    }
    for (int r = 0; r < rows; ++r) M[r][k] = b[r];
    int rank = 0;
    for (int c = 0; c < k && rank < rows; ++c) {
      int piv = -1;
      for (int r = rank; r < rows; ++r)
        if (std::abs(M[r][c]) > 1e-12) {
          piv = r;
          break;
        }
      if (piv < 0) return;  // dependent column: skip (covered by subsets)
      std::swap(M[piv], M[rank]);
      double f = M[rank][c];
      for (int cc = 0; cc <= k; ++cc) M[rank][cc] /= f;
      for (int r = 0; r < rows; ++r) {
        if (r == rank) continue;
        double g = M[r][c];
        if (g == 0.0) continue;
        for (int cc = 0; cc <= k; ++cc) M[r][cc] -= g * M[rank][cc];
      }
      ++rank;
    }
    for (int r = rank; r < rows; ++r)
      if (std::abs(M[r][k]) > 1e-9) return;  // inconsistent
    std::vector<double> x(k, 0.0);
    for (int r = 0; r < rank; ++r) {
      int lead = -1;
      for (int c = 0; c < k; ++c)
        if (std::abs(M[r][c] - 1.0) < 1e-12) {
          lead = c;
          break;
        }
      if (lead >= 0) x[lead] = M[r][k];
    }
    double cost = 0.0;
    for (int c = 0; c < k; ++c) {
      if (x[c] < -1e-9) return;  // infeasible vertex
      cost += x[c] * d[s[c] / m][s[c] % m];
    }
    best = std::min(best, cost);
  };

  int cap = n + m - 1;
  std::vector<int> idx;
  std::function<void(int)> rec = [&](int start) {
    if (!idx.empty()) try_support(idx);
    if (static_cast<int>(idx.size()) == cap) return;
    for (int a = start; a < arcs; ++a) {
      idx.push_back(a);
      rec(a + 1);
      idx.pop_back();
    }
  };
  rec(0);
  return best;
}

// Exact optimum of min c.x, A x <= b, x >= 0 by basis enumeration on the
// slack-extended standard form (tiny instances only).
inline double lp_vertex_enumeration(const std::vector<double>& c,
                                    const std::vector<std::vector<double>>& A,
                                    const std::vector<double>& b) {
  int m = static_cast<int>(A.size());
  int n = static_cast<int>(c.size());
  int total = n + m;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> basis;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(basis.size()) == m) {
      // solve B x_B = b
      std::vector<std::vector<double>> M(m, std::vector<double>(m + 1, 0.0));
      for (int r = 0; r < m; ++r) {
        for (int k = 0; k < m; ++k) {
          int col = basis[k];
          M[r][k] = col < n ? A[r][col] : (r == col - n ? 1.0 : 0.0);
        }
        M[r][m] = b[r];
      }
      for (int cidx = 0; cidx < m; ++cidx) {
        int piv = -1;
        double mx = 1e-10;
        for (int r = cidx; r < m; ++r)
          if (std::abs(M[r][cidx]) > mx) {
            mx = std::abs(M[r][cidx]);
            piv = r;
          }
        if (piv < 0) return;
        std::swap(M[piv], M[cidx]);
        double f = M[cidx][cidx];
        for (int k = cidx; k <= m; ++k) M[cidx][k] /= f;
        for (int r = 0; r < m; ++r) {
          if (r == cidx) continue;
          double g = M[r][cidx];
          for (int k = cidx; k <= m; ++k) M[r][k] -= g * M[cidx][k];
        }
      }
      double cost = 0.0;
      for (int k = 0; k < m; ++k) {
        double xv = M[k][m];
        if (xv < -1e-9) return;
        if (basis[k] < n) cost += c[basis[k]] * xv;
      }
      best = std::min(best, cost);
      return;
    }
    for (int j = start; j < total; ++j) {
      basis.push_back(j);
      rec(j + 1);
      basis.pop_back();
    }
  };
  rec(0);
  return best;
}

// Grid minimum of the two-Dirac objective: coarse N x N mesh of the box,
// then one local refinement pass around the winning cell.
inline double dirac_grid_min(const ubw1::LocalDiscrepancy& disc, double L,
                             double m00, double m0L, double m10, double m1L,
                             int N = 200) {
  auto P = [&](double a, double b) {
    a = std::clamp(a, 0.0, m00);
    b = std::clamp(b, 0.0, m1L);
    return L * (a + b) + disc.cs(std::max(m00 - a, 0.0), m10 + b) +
           disc.cs(m0L + a, std::max(m1L - b, 0.0));
  };
  double best = std::numeric_limits<double>::infinity(), ba = 0.0, bb = 0.0;
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) {
      double a = m00 * i / N, b = m1L * j / N;
      double v = P(a, b);
      if (v < best) {
        best = v;
        ba = a;
        bb = b;
      }
    }
  double ha = m00 / N, hb = m1L / N;
  for (int i = -N / 2; i <= N / 2; ++i)
    for (int j = -N / 2; j <= N / 2; ++j)
      best = std::min(best, P(ba + 2.0 * ha * i / N, bb + 2.0 * hb * j / N));
  return best;
}

}  // namespace oracle
