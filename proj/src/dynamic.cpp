#include "dynamic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "error.hpp"
#include "lp.hpp"
#include "parallel.hpp"

namespace ubw1 {

namespace {

bool change_is_infeasible(const DynamicPenalty& dp, double m0, double m1) {
  if (m0 == m1) return false;
  // a nonzero net change needs some admissible nonzero rate
  double probe = dp.cd(std::max(m0, m1) + 1.0, m1 - m0);
  return !is_finite(probe);
}

struct TrajCore {
  std::vector<double> m;  // all nodes including endpoints
  double cost = 0.0;
};

double traj_cost(const DynamicPenalty& dp, const std::vector<double>& m, double dt) {
  double c = 0.0;
  int N = static_cast<int>(m.size()) - 1;
  for (int k = 0; k < N; ++k) {
    double mbar = 0.5 * (m[k] + m[k + 1]);
    double zeta = (m[k + 1] - m[k]) / dt;
    c += dp.cd(mbar, zeta) * dt;
  }
  return c;
}

// gradient of the discretized cost w.r.t. the interior nodes
void traj_grad(const DynamicPenalty& dp, const std::vector<double>& m, double dt,
               std::vector<double>& g) {
  int N = static_cast<int>(m.size()) - 1;
  g.assign(N - 1, 0.0);
  for (int k = 0; k < N; ++k) {
    double mbar = std::max(0.5 * (m[k] + m[k + 1]), 1e-300);
    double zeta = (m[k + 1] - m[k]) / dt;
    auto [dr, dz] = dp.cd_grad(mbar, zeta);
    // node k gets dt*dr/2 - dz ; node k+1 gets dt*dr/2 + dz
    if (k >= 1) g[k - 1] += 0.5 * dt * dr - dz;
    if (k + 1 <= N - 1) g[k] += 0.5 * dt * dr + dz;
  }
}

TrajCore solve_traj_newton(const DynamicPenalty& dp, double m0, double m1, int N,
                           double dt) {
  std::vector<double> m(N + 1);
  for (int k = 0; k <= N; ++k)
    m[k] = m0 + (m1 - m0) * static_cast<double>(k) / N;  // linear start
  if (N == 1) return {m, traj_cost(dp, m, dt)};

  const int nv = N - 1;
  std::vector<double> g, gp, diag(nv), lowr(nv), uppr(nv), d(nv);
  double scale = 1.0 + std::abs(m0) + std::abs(m1);
  double f = traj_cost(dp, m, dt);
  double lambda = 0.0;
  // a fine-grained polyhedral profile has a piecewise-constant gradient; a
  // wider stencil reads the smooth trend across its cells
  double grad_tol = dp.polyhedral() ? 1e-6 : 1e-8;
  for (int iter = 0; iter < 400; ++iter) {
    traj_grad(dp, m, dt, g);
    // projected gradient norm (active lower bounds m >= 0)
    double gn = 0.0;
    for (int i = 0; i < nv; ++i) {
      double gi = g[i];
      if (m[i + 1] <= 1e-14 * scale && gi > 0.0) gi = 0.0;
      gn = std::max(gn, std::abs(gi));
    }
    if (gn <= grad_tol * std::max(1.0, scale)) break;

    // tridiagonal Hessian by three-coloring finite differences on the gradient
    double h = (dp.polyhedral() ? 1e-3 : 1e-6) * scale;
    std::fill(diag.begin(), diag.end(), 0.0);
    std::fill(lowr.begin(), lowr.end(), 0.0);
    std::fill(uppr.begin(), uppr.end(), 0.0);
    for (int color = 0; color < 3; ++color) {
      auto mp = m;
      for (int i = color; i < nv; i += 3) mp[i + 1] += h;
      traj_grad(dp, mp, dt, gp);
      for (int i = color; i < nv; i += 3) {
        diag[i] = (gp[i] - g[i]) / h;
        if (i >= 1) uppr[i - 1] = (gp[i - 1] - g[i - 1]) / h;
        if (i + 1 < nv) lowr[i + 1] = (gp[i + 1] - g[i + 1]) / h;
      }
    }

    bool accepted = false;
    for (int trial = 0; trial < 12 && !accepted; ++trial) {
      // Thomas solve of (H + lambda I) d = -g
      std::vector<double> c1(nv), dd(nv);
      double b0 = diag[0] + lambda;
      if (std::abs(b0) < 1e-300) b0 = 1e-300;
      c1[0] = uppr[0] / b0;
      dd[0] = -g[0] / b0;
      for (int i = 1; i < nv; ++i) {
        double denom = diag[i] + lambda - lowr[i] * c1[i - 1];
        if (std::abs(denom) < 1e-300) denom = 1e-300;
        c1[i] = (i + 1 < nv ? uppr[i] : 0.0) / denom;
        dd[i] = (-g[i] - lowr[i] * dd[i - 1]) / denom;
      }
      d[nv - 1] = dd[nv - 1];
      for (int i = nv - 2; i >= 0; --i) d[i] = dd[i] - c1[i] * d[i + 1];

      // backtracking with projection onto m >= 0
      double step = 1.0;
      for (int bt = 0; bt < 30; ++bt) {
        auto mt = m;
        for (int i = 0; i < nv; ++i) mt[i + 1] = std::max(0.0, m[i + 1] + step * d[i]);
        double ft = traj_cost(dp, mt, dt);
        if (ft < f - 1e-14 * std::max(1.0, std::abs(f))) {
          m = std::move(mt);
          f = ft;
          accepted = true;
          lambda = std::max(lambda * 0.25, 0.0);
          break;
        }
        step *= 0.5;
      }
      if (!accepted) lambda = lambda == 0.0 ? 1e-6 : lambda * 10.0;
      if (lambda > 1e12) break;
    }
    if (!accepted) break;
  }
  return {m, f};
}

TrajCore solve_traj_lp(const DynamicPenalty& dp, double m0, double m1, int N,
                       double dt) {
  // epigraph LP over the supporting planes of the polyhedral c_D
  const auto& X = dp.h_d().knots_x();
  const auto& Y = dp.h_d().knots_y();
  const int nv = N - 1;
  LinearProgram lp(nv + N);  // interior masses, then epigraph values
  for (int k = 0; k < N; ++k) lp.c[nv + k] = dt;
  for (int k = 0; k < N; ++k) {
    for (size_t i = 0; i < X.size(); ++i) {
      // t_k >= y_i*(m_k+m_{k+1})/2 + x_i*(m_{k+1}-m_k)/dt
      std::vector<double> row(lp.n, 0.0);
      row[nv + k] = 1.0;
      double rhs = 0.0;
      auto addm = [&](int node, double coef) {
        if (node == 0)
          rhs += coef * m0;
        else if (node == N)
          rhs += coef * m1;
        else
          row[node - 1] -= coef;
      };
      addm(k, 0.5 * Y[i] - X[i] / dt);
      addm(k + 1, 0.5 * Y[i] + X[i] / dt);
      lp.add_row(std::move(row), Sense::ge, rhs);
    }
  }
  LpResult r = lp_solve(lp);
  require(r.status == LpStatus::optimal, errc::internal, "trajectory LP failed");
  std::vector<double> m(N + 1);
  m[0] = m0;
  m[N] = m1;
  for (int i = 0; i < nv; ++i) m[i + 1] = std::max(0.0, r.x[i]);
  return {m, traj_cost(dp, m, dt)};
}

TrajCore solve_traj(const DynamicPenalty& dp, double m0, double m1, int N, double T) {
  double dt = T / N;
  if (m0 == m1) {
    std::vector<double> m(N + 1, m0);
    return {m, 0.0};
  }
  // coarse polyhedral penalties (tv, pwl) are genuine LPs; finely sampled
  // ones behave like smooth models and go through Newton
  bool lp_sized = dp.polyhedral() && dp.h_d().knots_x().size() <= 64;
  if (lp_sized && N >= 2) return solve_traj_lp(dp, m0, m1, N, dt);
  return solve_traj_newton(dp, m0, m1, N, dt);
}

}  // namespace

MassTrajectory mass_trajectory(const DynamicPenalty& dp, double m0, double m1,
                               int steps, double T) {
  require(steps >= 2, errc::invalid_argument, "mass_trajectory needs steps >= 2");
  require(m0 >= 0.0 && m1 >= 0.0, errc::negative_mass, "masses must be nonnegative");
  require(T > 0.0, errc::invalid_argument, "duration must be positive");
  require(!change_is_infeasible(dp, m0, m1), errc::infeasible_change,
          "the dynamic penalty admits no path between these masses");

  TrajCore coarse = solve_traj(dp, m0, m1, steps, T);
  MassTrajectory out;
  out.times = linspace(0.0, T, steps + 1);
  out.masses = coarse.m;
  out.cost = coarse.cost;
  out.rates.resize(steps);
  double dt = T / steps;
  for (int k = 0; k < steps; ++k)
    out.rates[k] = (out.masses[k + 1] - out.masses[k]) / dt;
  if (m0 != m1) {
    TrajCore fine = solve_traj(dp, m0, m1, 2 * steps, T);
    out.excess = 2.0 * std::abs(coarse.cost - fine.cost);
  }
  return out;
}

DynamicOptimizer assemble_dynamic(const TransportSolution& sol,
                                  const LocalDiscrepancy& disc,
                                  const DynamicPenalty& dp, int steps) {
  // the static counterpart of dp must be the model the solution was built
  // for; above sup dom h_D the induced profile is the clamped flow value
  {
    double tol = dp.h_d().kind() == HKind::closed_form ? 1e-6 : 1e-4;
    for (double z : {-0.5, -0.2, 0.0, 0.3, 0.8, 1.5, 3.0}) {
      double want = disc.hs(z);
      if (!is_finite(want)) continue;
      double zz = std::min(z, dp.dom_hi());
      double got = dp.flow(1.0, zz).value;
      require(std::abs(got - want) <= tol * (1.0 + std::abs(want)),
              errc::model_mismatch,
              "dynamic penalty does not induce the solution's static model");
    }
  }
  DynamicOptimizer opt;
  opt.rho0 = sol.rho0;
  opt.rho1 = sol.rho1;
  opt.jump0 = sol.pi0;
  opt.jump1 = sol.pi1;
  const int n = sol.rho0.size();
  opt.trajectories.resize(n);
  std::vector<std::string> failures(n);
  parallel_for(n, [&](int x) {
    try {
      opt.trajectories[x] =
          mass_trajectory(dp, sol.rho0p.weights[x], sol.rho1p.weights[x], steps);
    } catch (const error& e) {
      failures[x] = e.what();
    }
  });
  for (const auto& f : failures)
    require(f.empty(), errc::infeasible_change, f);
  opt.total_cost = opt.jump0.transport_cost() + opt.jump1.transport_cost();
  for (const auto& tr : opt.trajectories) opt.total_cost += tr.cost;
  return opt;
}

double continuity_residual(const DynamicOptimizer& opt, int test_fns) {
  require(test_fns >= 1, errc::invalid_argument, "need at least one test function");
  const int n = opt.rho0.size();
  double worst = 0.0;
  int used = 0;
  for (int p = 0; p <= 3 && used < test_fns; ++p) {
    for (int x0 = 0; x0 < n && used < test_fns; ++x0, ++used) {
      // phi(t, x) = t^p [x == x0]
      const auto& tr = opt.trajectories[x0];
      double lhs = 0.0;
      int N = static_cast<int>(tr.rates.size());
      for (int k = 0; k < N; ++k) {
        double t0 = tr.times[k], t1 = tr.times[k + 1];
        double a = tr.masses[k], b = tr.masses[k + 1];
        double slope = (b - a) / (t1 - t0);
        // d/dt phi * m: integral of p t^(p-1) (a + slope (t - t0))
        if (p >= 1) {
          double c0 = a - slope * t0;
          // p t^(p-1) (c0 + slope t) integrated exactly
          auto powint = [&](int q) {  // integral of t^q over [t0, t1]
            return (std::pow(t1, q + 1) - std::pow(t0, q + 1)) / (q + 1);
          };
          lhs += p * (c0 * powint(p - 1) + slope * powint(p));
        }
        // zeta * integral of t^p
        double zint = (std::pow(t1, p + 1) - std::pow(t0, p + 1)) / (p + 1);
        lhs += tr.rates[k] * zint;
      }
      // jump contributions: at t=0, phi = [p == 0]; at t=1, phi = 1
      double phi0 = p == 0 ? 1.0 : 0.0;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          double d0 = opt.jump0.m[x][y];
          if (d0 != 0.0) lhs += phi0 * (((y == x0) ? 1.0 : 0.0) - ((x == x0) ? 1.0 : 0.0)) * d0;
          double d1 = opt.jump1.m[x][y];
          if (d1 != 0.0) lhs += (((y == x0) ? 1.0 : 0.0) - ((x == x0) ? 1.0 : 0.0)) * d1;
        }
      double rhs = opt.rho1.weights[x0] - phi0 * opt.rho0.weights[x0];
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

DualPotentialSurface::DualPotentialSurface(const DynamicPenalty& dp,
                                           std::vector<double> alpha,
                                           std::vector<double> beta)
    : dp_(std::make_shared<DynamicPenalty>(dp)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)) {
  require(alpha_.size() == beta_.size(), errc::invalid_argument,
          "potential arrays must have equal length");
  size_t n = alpha_.size();
  f1_.resize(n);
  finv1_.resize(n);
  std::string bad;
  for (size_t x = 0; x < n; ++x) {
    double na = -alpha_[x], b = beta_[x];
    bool ok = na >= dp.dom_lo() && na <= dp.dom_hi() && b >= dp.dom_lo() &&
              b <= dp.dom_hi();
    double cap = ok ? dp.flow(1.0, na).value : -kInf;
    if (!ok || !(b <= cap + 1e-10)) {
      bad += (bad.empty() ? "" : ",") + std::to_string(x);
      continue;
    }
    f1_[x] = cap;
    finv1_[x] = b < 0.0 ? dp.inverse_flow(1.0, b).value : 0.0;
  }
  require(bad.empty(), errc::infeasible_pair,
          "potentials leave the feasible set at points " + bad);
}

double DualPotentialSurface::phi(double t, int x) const {
  require(t >= 0.0 && t <= 1.0, errc::invalid_argument, "time must lie in [0,1]");
  double z = -alpha_[x];
  double g;
  if (z > 0.0)
    g = dp_->flow(t, z).value - t * f1_[x];
  else if (z == 0.0)
    g = 0.0;
  else
    g = (1.0 - t) * z;
  double w = beta_[x];
  double ginv;
  if (w > 0.0)
    ginv = t * w;
  else if (w == 0.0)
    ginv = 0.0;
  else
    ginv = dp_->inverse_flow(1.0 - t, w).value - (1.0 - t) * finv1_[x];
  return g + ginv;
}

double DualPotentialSurface::dphi_dt(double t, int x) const {
  double h = 1e-6;
  double a = std::max(0.0, t - h), b = std::min(1.0, t + h);
  return (phi(b, x) - phi(a, x)) / (b - a);
}

void clamp_to_feasible(const DynamicPenalty& dp, std::vector<double>& alpha,
                       std::vector<double>& beta) {
  for (size_t x = 0; x < alpha.size(); ++x) {
    if (-alpha[x] > dp.dom_hi()) alpha[x] = -dp.dom_hi();
    if (-alpha[x] < dp.dom_lo()) alpha[x] = -dp.dom_lo();
    if (beta[x] < dp.dom_lo()) beta[x] = dp.dom_lo();
    if (beta[x] > dp.dom_hi()) beta[x] = dp.dom_hi();
    double cap = dp.flow(1.0, -alpha[x]).value;
    if (beta[x] > cap) beta[x] = cap;
  }
}

std::pair<double, double> semicoupling_cost(const LocalDiscrepancy& disc,
                                            double dx, double m0, double m1) {
  require(dx >= 0.0, errc::invalid_argument, "separation must be nonnegative");
  require(m0 >= 0.0 && m1 >= 0.0, errc::negative_mass, "masses must be nonnegative");
  auto J = [&](double a0, double a1) {
    return disc.cs(a0, a1) + a0 * dx + disc.cs(m0 - a0, m1 - a1) + (m1 - a1) * dx;
  };
  double ba0 = 0.0, ba1 = 0.0, bv = J(0.0, 0.0);
  for (int i = 0; i <= 64; ++i)
    for (int j = 0; j <= 64; ++j) {
      double a0 = m0 * i / 64.0, a1 = m1 * j / 64.0;
      double v = J(a0, a1);
      if (v < bv) {
        bv = v;
        ba0 = a0;
        ba1 = a1;
      }
    }
  for (int sweep = 0; sweep < 30; ++sweep) {
    if (m0 > 0.0)
      ba0 = golden_min([&](double a0) { return J(a0, ba1); }, 0.0, m0, 1e-12);
    if (m1 > 0.0)
      ba1 = golden_min([&](double a1) { return J(ba0, a1); }, 0.0, m1, 1e-12);
  }
  // Nelder-Mead polish; coordinate sweeps stall in the kinked valleys of
  // piecewise-linear penalties
  {
    auto Jc = [&](double a0, double a1) {
      return J(std::clamp(a0, 0.0, m0), std::clamp(a1, 0.0, m1));
    };
    struct Pt {
      double x, y, v;
    };
    double s0 = 0.05 * (m0 + 1e-12), s1 = 0.05 * (m1 + 1e-12);
    std::array<Pt, 3> simplex{Pt{ba0, ba1, J(ba0, ba1)},
                              Pt{ba0 + s0, ba1, Jc(ba0 + s0, ba1)},
                              Pt{ba0, ba1 + s1, Jc(ba0, ba1 + s1)}};
    for (int it = 0; it < 300; ++it) {
      std::sort(simplex.begin(), simplex.end(),
                [](const Pt& a, const Pt& b) { return a.v < b.v; });
      if (std::abs(simplex[2].v - simplex[0].v) <=
          1e-13 * (1.0 + std::abs(simplex[0].v)))
        break;
      double cx = 0.5 * (simplex[0].x + simplex[1].x);
      double cy = 0.5 * (simplex[0].y + simplex[1].y);
      double rx = cx + (cx - simplex[2].x), ry = cy + (cy - simplex[2].y);
      double rv = Jc(rx, ry);
      if (rv < simplex[0].v) {
        double ex = cx + 2.0 * (cx - simplex[2].x),
               ey = cy + 2.0 * (cy - simplex[2].y);
        double ev = Jc(ex, ey);
        simplex[2] = ev < rv ? Pt{ex, ey, ev} : Pt{rx, ry, rv};
      } else if (rv < simplex[1].v) {
        simplex[2] = {rx, ry, rv};
      } else {
        double kx = cx + 0.5 * (simplex[2].x - cx),
               ky = cy + 0.5 * (simplex[2].y - cy);
        double kv = Jc(kx, ky);
        if (kv < simplex[2].v) {
          simplex[2] = {kx, ky, kv};
        } else {
          for (int i = 1; i < 3; ++i) {
            simplex[i].x = 0.5 * (simplex[i].x + simplex[0].x);
            simplex[i].y = 0.5 * (simplex[i].y + simplex[0].y);
            simplex[i].v = Jc(simplex[i].x, simplex[i].y);
          }
        }
      }
    }
    if (simplex[0].v < J(ba0, ba1)) {
      ba0 = std::clamp(simplex[0].x, 0.0, m0);
      ba1 = std::clamp(simplex[0].y, 0.0, m1);
    }
  }
  double primal = J(ba0, ba1);

  // dual: sup_alpha alpha m0 + min(h_S(-alpha+dx), h_S(-alpha)+dx) m1
  auto Dv = [&](double a) {
    double b = std::min(disc.hs(-a + dx), disc.hs(-a) + dx);
    if (!(b > -kInf)) return -kInf;
    return a * m0 + b * m1;
  };
  double lo = -std::min(disc.h_s().plateau_start(), 1e9);
  double hi = std::min(dx - disc.h_s().domain_lo(), 1e9) - 1e-9;
  double dual = -kInf;
  if (lo < hi) {
    auto neg = [&](double a) {
      double v = Dv(a);
      return v == -kInf ? kInf : -v;
    };
    double fv;
    golden_min(neg, lo, hi, 1e-12, &fv);
    dual = -fv;
    for (double a : linspace(lo, hi, 257)) dual = std::max(dual, Dv(a));
  }
  return {primal, dual};
}

}  // namespace ubw1
