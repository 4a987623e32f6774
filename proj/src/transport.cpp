#include "transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "error.hpp"
#include "lp.hpp"

namespace ubw1 {

const char* region_name(Region r) {
  switch (r) {
    case Region::plus: return "plus";
    case Region::minus: return "minus";
    case Region::equal: return "equal";
  }
  return "?";
}

namespace {

std::vector<Region> label_partition(const DiscreteMeasure& r0p,
                                    const DiscreteMeasure& r1p) {
  std::vector<Region> part(r0p.size());
  for (int i = 0; i < r0p.size(); ++i) {
    if (r0p.weights[i] < r1p.weights[i] - 1e-9)
      part[i] = Region::plus;
    else if (r0p.weights[i] > r1p.weights[i] + 1e-9)
      part[i] = Region::minus;
    else
      part[i] = Region::equal;
  }
  return part;
}

double exact_primal(const Coupling& pi0, const Coupling& pi1,
                    const LocalDiscrepancy& disc) {
  double v = pi0.transport_cost() + pi1.transport_cost();
  auto r0p = pi0.second_marginal();
  auto r1p = pi1.first_marginal();
  for (int i = 0; i < r0p.size(); ++i)
    v += disc.cs(r0p.weights[i], r1p.weights[i]);
  return v;
}

// 1-Lipschitz infimal convolution over the metric
std::vector<double> lip_smooth(const MetricSpace& sp, const std::vector<double>& f) {
  int n = sp.size();
  std::vector<double> out(n);
  for (int x = 0; x < n; ++x) {
    double best = f[x];
    for (int y = 0; y < n; ++y) best = std::min(best, sp.d(x, y) + f[y]);
    out[x] = best;
  }
  return out;
}

TransportSolution solve_exact_model(const DiscreteMeasure& rho0,
                                    const DiscreteMeasure& rho1,
                                    const LocalDiscrepancy& disc) {
  double m0 = rho0.mass(), m1 = rho1.mass();
  require(std::abs(m0 - m1) <= 1e-9 * std::max(1.0, m0), errc::infeasible_model,
          "the exact model forbids any net mass change");
  auto w1 = w1_distance(rho0, rho1);
  TransportSolution sol;
  sol.rho0 = rho0;
  sol.rho1 = rho1;
  sol.model = disc.name();
  sol.pi0 = w1.plan;
  sol.pi1 = Coupling::diagonal(rho1);
  sol.rho0p = sol.pi0.second_marginal();
  sol.rho1p = sol.pi1.first_marginal();
  sol.primal_value = w1.value;
  int n = rho0.size();
  sol.alpha = w1.u;
  sol.beta = w1.v;
  double dv = 0.0;
  for (int i = 0; i < n; ++i)
    dv += w1.u[i] * rho0.weights[i] + w1.v[i] * rho1.weights[i];
  sol.dual_value = dv;
  sol.gap = sol.primal_value - sol.dual_value;
  sol.partition = label_partition(sol.rho0p, sol.rho1p);
  return sol;
}

// one of the measures vanishes: no transport can help, pure growth/shrink
TransportSolution solve_degenerate_mass(const DiscreteMeasure& rho0,
                                        const DiscreteMeasure& rho1,
                                        const LocalDiscrepancy& disc) {
  TransportSolution sol;
  sol.rho0 = rho0;
  sol.rho1 = rho1;
  sol.model = disc.name();
  sol.pi0 = Coupling::diagonal(rho0);
  sol.pi1 = Coupling::diagonal(rho1);
  sol.rho0p = rho0;
  sol.rho1p = rho1;
  int n = rho0.size();
  sol.primal_value = 0.0;
  for (int i = 0; i < n; ++i)
    sol.primal_value += disc.cs(rho0.weights[i], rho1.weights[i]);
  if (rho0.mass() == 0.0) {
    double A = std::min(disc.h_s().plateau_start(), 1e9);
    sol.alpha.assign(n, -A);
    sol.beta.assign(n, disc.hs(A));
  } else {
    double B = std::min(disc.h_bar_s().plateau_start(), 1e9);
    sol.alpha.assign(n, disc.hbar(B));
    sol.beta.assign(n, -B);
  }
  double dv = 0.0;
  for (int i = 0; i < n; ++i)
    dv += sol.alpha[i] * rho0.weights[i] + sol.beta[i] * rho1.weights[i];
  sol.dual_value = dv;
  sol.gap = sol.primal_value - sol.dual_value;
  sol.partition = label_partition(sol.rho0p, sol.rho1p);
  return sol;
}

}  // namespace

TransportSolution solve_static(const DiscreteMeasure& rho0,
                               const DiscreteMeasure& rho1,
                               const LocalDiscrepancy& disc, int k_cuts) {
  require(rho0.space && rho1.space && rho0.space->same_as(*rho1.space),
          errc::space_mismatch, "measures live on different spaces");
  require(k_cuts >= 3, errc::invalid_argument, "k_cuts must be at least 3");
  const int n = rho0.size();
  require(n >= 1, errc::empty_space, "empty metric space");
  if (disc.is_exact()) return solve_exact_model(rho0, rho1, disc);
  if (rho0.mass() == 0.0 || rho1.mass() == 0.0)
    return solve_degenerate_mass(rho0, rho1, disc);

  const MetricSpace& sp = *rho0.space;
  std::vector<SupportPoint> pool = disc.supporting_points(k_cuts);
  std::vector<std::vector<int>> active(n);
  {
    std::vector<int> seed;
    int P = static_cast<int>(pool.size());
    for (int s = 0; s < 9; ++s) seed.push_back((s * (P - 1)) / 8);
    for (int i = 0; i < P; ++i)
      if (pool[i].alpha == 0.0 && pool[i].beta == 0.0) seed.push_back(i);
    std::sort(seed.begin(), seed.end());
    seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
    for (int x = 0; x < n; ++x) active[x] = seed;
  }

  const int ipi1 = n * n, it0 = 2 * n * n;
  auto var_pi0 = [&](int x, int y) { return x * n + y; };
  auto var_pi1 = [&](int x, int y) { return ipi1 + x * n + y; };

  TransportSolution sol;
  sol.rho0 = rho0;
  sol.rho1 = rho1;
  sol.model = disc.name();
  sol.k_cuts = k_cuts;

  std::vector<double> abar(n, 0.0), bbar(n, 0.0);
  double best_key = kInf;
  for (int round = 0; round < 48; ++round) {
    LinearProgram lp(2 * n * n + n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        lp.c[var_pi0(x, y)] = sp.d(x, y);
        lp.c[var_pi1(x, y)] = sp.d(x, y);
      }
    for (int x = 0; x < n; ++x) lp.c[it0 + x] = 1.0;
    for (int x = 0; x < n; ++x) {
      std::vector<double> row(lp.n, 0.0);
      for (int y = 0; y < n; ++y) row[var_pi0(x, y)] = 1.0;
      lp.add_row(std::move(row), Sense::eq, rho0.weights[x]);
    }
    for (int y = 0; y < n; ++y) {
      std::vector<double> row(lp.n, 0.0);
      for (int x = 0; x < n; ++x) row[var_pi1(x, y)] = 1.0;
      lp.add_row(std::move(row), Sense::eq, rho1.weights[y]);
    }
    std::vector<std::pair<int, int>> cut_rows;  // (point x, pool index)
    for (int x = 0; x < n; ++x)
      for (int i : active[x]) {
        std::vector<double> row(lp.n, 0.0);
        row[it0 + x] = 1.0;
        for (int y = 0; y < n; ++y) {
          row[var_pi0(y, x)] -= pool[i].alpha;
          row[var_pi1(x, y)] -= pool[i].beta;
        }
        lp.add_row(std::move(row), Sense::ge, 0.0);
        cut_rows.push_back({x, i});
      }
    LpResult r = lp_solve(lp);
    require(r.status == LpStatus::optimal, errc::internal,
            "static LP did not reach an optimum");

    Coupling pi0 = Coupling::zeros(rho0.space), pi1 = Coupling::zeros(rho0.space);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        pi0.m[x][y] = std::max(0.0, r.x[var_pi0(x, y)]);
        pi1.m[x][y] = std::max(0.0, r.x[var_pi1(x, y)]);
      }
    DiscreteMeasure r0p = pi0.second_marginal();
    DiscreteMeasure r1p = pi1.first_marginal();

    bool changed = false;
    double scale = 1.0 + rho0.mass() + rho1.mass();
    for (int x = 0; x < n; ++x) {
      double t = r.x[it0 + x];
      int best = -1;
      double worst = 1e-10 * scale;
      for (int i = 0; i < static_cast<int>(pool.size()); ++i) {
        double v = pool[i].alpha * r0p.weights[x] + pool[i].beta * r1p.weights[x] - t;
        if (v > worst &&
            std::find(active[x].begin(), active[x].end(), i) == active[x].end()) {
          worst = v;
          best = i;
        }
      }
      if (best >= 0) {
        active[x].push_back(best);
        changed = true;
        continue;
      }
      double exact = disc.cs(r0p.weights[x], r1p.weights[x]);
      if (is_finite(exact) && exact - t > 1e-11 * (1.0 + std::abs(exact))) {
        double m0 = r0p.weights[x], m1 = r1p.weights[x];
        double g = m1 > 1e-300 ? m0 / m1 : 1e18;
        SupportPoint spt = disc.support_at_slope(std::clamp(g, 1e-18, 1e18));
        // a near-duplicate cut adds nothing and degrades the basis
        bool dup = false;
        for (int i : active[x]) {
          if (std::abs(pool[i].alpha - spt.alpha) +
                  std::abs(pool[i].beta - spt.beta) <=
              1e-9 * (1.0 + std::abs(spt.alpha) + std::abs(spt.beta))) {
            dup = true;
            break;
          }
        }
        if (!dup) {
          pool.push_back(spt);
          active[x].push_back(static_cast<int>(pool.size()) - 1);
          changed = true;
        }
      }
    }

    double exact_now = exact_primal(pi0, pi1, disc);
    double key = exact_now - r.objective;  // bracket width before smoothing
    if (std::getenv("UBW1_DEBUG_LP"))
      std::fprintf(stderr, "[lp] round %d lpobj %.10f exact %.10f changed %d rows %zu\n",
                   round, r.objective, exact_now, changed ? 1 : 0, cut_rows.size());
    bool degraded = key < -1e-7 * (1.0 + std::abs(exact_now));
    if (degraded && is_finite(best_key)) break;
    key = std::max(key, 0.0);
    if (key < best_key || !is_finite(best_key)) {
      best_key = key;
      std::fill(abar.begin(), abar.end(), 0.0);
      std::fill(bbar.begin(), bbar.end(), 0.0);
      for (size_t k = 0; k < cut_rows.size(); ++k) {
        double lam = std::max(0.0, r.duals[2 * n + k]);
        int x = cut_rows[k].first, i = cut_rows[k].second;
        abar[x] += lam * pool[i].alpha;
        bbar[x] += lam * pool[i].beta;
      }
      sol.pi0 = std::move(pi0);
      sol.pi1 = std::move(pi1);
      sol.rho0p = std::move(r0p);
      sol.rho1p = std::move(r1p);
    }
    if (degraded || !changed || best_key <= 1e-9 * (1.0 + std::abs(exact_now)))
      break;
  }

  sol.primal_value = exact_primal(sol.pi0, sol.pi1, disc);
  std::vector<double> alpha = lip_smooth(sp, abar);
  std::vector<double> beta = lip_smooth(sp, bbar);
  for (int x = 0; x < n; ++x) {
    // exact feasibility in B_S; guard the open domain edge against float fuzz
    double na = -alpha[x];
    double dlo = disc.h_s().domain_lo();
    if (na < dlo) na = dlo;
    double cap = disc.hs(na);
    int guard = 0;
    while (!(cap > -kInf) && guard++ < 8) {
      na += 1e-12 * (1.0 + std::abs(na));
      cap = disc.hs(na);
    }
    alpha[x] = -na;
    if (beta[x] > cap) beta[x] = cap;
  }
  sol.alpha = std::move(alpha);
  sol.beta = std::move(beta);
  double dv = 0.0;
  for (int x = 0; x < n; ++x)
    dv += mul0(sol.alpha[x], rho0.weights[x]) + mul0(sol.beta[x], rho1.weights[x]);
  sol.dual_value = dv;
  sol.gap = sol.primal_value - sol.dual_value;
  sol.partition = label_partition(sol.rho0p, sol.rho1p);
  return sol;
}

std::vector<std::string> verify_structure(const TransportSolution& sol) {
  std::vector<std::string> out;
  const int n = sol.rho0.size();
  const MetricSpace& sp = *sol.rho0.space;
  const auto& part = sol.partition;
  double tol = 1e-6 * (1.0 + sol.rho0.mass() + sol.rho1.mass());

  double c1a = 0.0, c1b = 0.0, c2a = 0.0, c2b = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (part[y] == Region::minus) c1a += sp.d(x, y) * sol.pi0.m[x][y];
      if (part[x] == Region::plus) c1b += sp.d(x, y) * sol.pi1.m[x][y];
      if (part[x] == Region::plus && part[y] != Region::plus && x != y)
        c2a += sol.pi0.m[x][y];
      if (part[x] != Region::minus && part[y] == Region::minus && x != y)
        c2b += sol.pi1.m[x][y];
    }
  if (c1a > tol)
    out.push_back("condition I: pi0 carries cost into the shrink region (" +
                  std::to_string(c1a) + ")");
  if (c1b > tol)
    out.push_back("condition I: pi1 carries cost out of the growth region (" +
                  std::to_string(c1b) + ")");
  if (c2a > tol)
    out.push_back("condition II: pi0 moves mass out of the growth region (" +
                  std::to_string(c2a) + ")");
  if (c2b > tol)
    out.push_back("condition II: pi1 moves mass into the shrink region (" +
                  std::to_string(c2b) + ")");
  return out;
}

TransportSolution canonicalize(const TransportSolution& sol,
                               const LocalDiscrepancy& disc) {
  require(sol.gap <= 1e-5 * (1.0 + std::abs(sol.primal_value)), errc::not_optimal,
          "canonicalize needs a solution with a closed duality bracket");
  const int n = sol.rho0.size();
  auto part = sol.partition;
  auto pi0 = sol.pi0.m, pi1 = sol.pi1.m;
  const double tiny = 1e-12 * (1.0 + sol.rho0.mass() + sol.rho1.mass());

  auto row_sum = [&](const std::vector<std::vector<double>>& m, int i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += m[i][j];
    return s;
  };
  auto col_sum = [&](const std::vector<std::vector<double>>& m, int j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += m[i][j];
    return s;
  };

  for (int pass = 0; pass < 64; ++pass) {
    bool moved = false;
    // (1) shortcut chains through the unchanged region: pi1 becomes diagonal
    // on equal x equal, the through-traffic moves into pi0
    for (int z = 0; z < n; ++z) {
      if (part[z] != Region::equal) continue;
      double off = 0.0;
      for (int y = 0; y < n; ++y)
        if (y != z) off += pi1[z][y];
      if (off <= tiny) continue;
      double inflow = col_sum(pi0, z);
      double outflow = row_sum(pi1, z);
      if (inflow <= tiny || outflow <= tiny) continue;
      std::vector<double> in(n), share(n), leave(n);
      for (int x = 0; x < n; ++x) in[x] = pi0[x][z];
      for (int y = 0; y < n; ++y) {
        share[y] = pi1[z][y] / outflow;
        leave[y] = pi1[z][y];
      }
      for (int x = 0; x < n; ++x) pi0[x][z] = 0.0;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) pi0[x][y] += in[x] * share[y];
      for (int y = 0; y < n; ++y) pi1[z][y] = 0.0;
      for (int y = 0; y < n; ++y) pi1[y][y] += leave[y];
      moved = true;
    }
    // (2) pi0 carries nothing from shrink into the unchanged region
    for (int x = 0; x < n; ++x) {
      if (part[x] != Region::minus) continue;
      for (int z = 0; z < n; ++z) {
        if (part[z] != Region::equal || z == x) continue;
        double delta = pi0[x][z];
        if (delta <= tiny) continue;
        double outflow = row_sum(pi1, z);
        if (outflow <= delta - 1e-9) continue;
        pi0[x][z] = 0.0;
        pi0[x][x] += delta;
        for (int y = 0; y < n; ++y) {
          double s = pi1[z][y] / outflow;
          pi1[z][y] = std::max(0.0, pi1[z][y] - delta * s);
          pi1[x][y] += delta * s;
        }
        moved = true;
      }
    }
    // (3) pi1 carries nothing from the unchanged region into growth
    for (int z = 0; z < n; ++z) {
      if (part[z] != Region::equal) continue;
      for (int y = 0; y < n; ++y) {
        if (part[y] != Region::plus || y == z) continue;
        double delta = pi1[z][y];
        if (delta <= tiny) continue;
        double inflow = col_sum(pi0, z);
        if (inflow <= delta - 1e-9) continue;
        pi1[z][y] = 0.0;
        pi1[y][y] += delta;
        for (int x = 0; x < n; ++x) {
          double s = pi0[x][z] / inflow;
          pi0[x][z] = std::max(0.0, pi0[x][z] - delta * s);
          pi0[x][y] += delta * s;
        }
        moved = true;
      }
    }
    if (!moved) break;
  }

  TransportSolution out = sol;
  out.pi0 = Coupling(sol.rho0.space, pi0);
  out.pi1 = Coupling(sol.rho0.space, pi1);
  out.rho0p = out.pi0.second_marginal();
  out.rho1p = out.pi1.first_marginal();
  out.partition = label_partition(out.rho0p, out.rho1p);
  out.primal_value = exact_primal(out.pi0, out.pi1, disc);
  require(out.primal_value <= sol.primal_value + 1e-9 * (1.0 + std::abs(sol.primal_value)),
          errc::internal, "canonicalize increased the objective");
  out.gap = out.primal_value - out.dual_value;
  return out;
}

std::pair<double, double> max_transport_distances(const LocalDiscrepancy& disc) {
  auto p1 = disc.partial1_limits();
  auto p2 = disc.partial2_limits();
  double L0 = (p1.second == kInf || p1.first == -kInf) ? kInf : p1.second - p1.first;
  double L1 = (p2.second == kInf || p2.first == -kInf) ? kInf : p2.second - p2.first;
  return {L0, L1};
}

}  // namespace ubw1
