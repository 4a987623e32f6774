#include "reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace ubw1 {

double c_constant(double m) {
  if (m >= 1.0 - 1e-4) return 1.0;  // continuous branch near 1
  if (m <= 0.0) return 0.0;
  return std::log(m) / (1.0 - 1.0 / m);
}

namespace {

// largest fixed point of a static profile: max { z : h(z) = z }, 0 if the
// profile drops below the identity immediately, +inf for exact-like models
double largest_fixed_point(const HFunction& h) {
  if (h.kind() != HKind::closed_form) {
    // exact from the knot data
    const auto& x = h.knots_x();
    const auto& y = h.knots_y();
    double zbar = 0.0;
    bool any = false;
    for (size_t i = 0; i < x.size(); ++i)
      if (std::abs(y[i] - x[i]) <= 1e-12 * std::max(1.0, std::abs(x[i]))) {
        zbar = std::max(zbar, x[i]);
        any = true;
      }
    if (any && zbar >= x.back() && h.domain_hi() == kInf &&
        h.plateau_start() == kInf)
      return kInf;  // identity continues into the right tail
    return any ? std::max(zbar, 0.0) : 0.0;
  }
  auto off = [&](double z) { return z - h(z) > 1e-13 * std::max(1.0, z); };
  double cap = std::min(h.domain_hi(), 1e8);
  if (!off(cap)) return h.domain_hi() == kInf ? kInf : h.domain_hi();
  if (off(1e-9)) return 0.0;
  double lo = 0.0, hi = cap;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (off(mid) ? hi : lo) = mid;
  }
  return lo;
}

// boundary slope of h at its largest fixed point, from the right, by
// difference quotients with Richardson extrapolation (exact for knot data)
double boundary_slope(const HFunction& h, double zbar) {
  if (zbar == kInf) return 1.0;
  if (h.kind() != HKind::closed_form) {
    double m = h.deriv(zbar, +1);
    if (!is_finite(m)) return 0.0;
    return std::clamp(m, 0.0, 1.0);
  }
  double qs[3];
  double eps[3] = {1e-4, 1e-5, 1e-6};
  for (int i = 0; i < 3; ++i) {
    double v = h(zbar + eps[i]);
    if (!(v > -kInf)) return 0.0;  // profile plateaus/ends right at zbar
    qs[i] = (v - zbar) / eps[i];
  }
  double m = qs[2] + (qs[2] - qs[1]) / 9.0;  // first-order Richardson
  (void)qs[0];
  m = std::min(m, 1.0);
  if (m >= 1.0 - 1e-4) return 1.0;
  return std::max(m, 0.0);
}

struct PointResult {
  double q = 0.0;
  int iters = 0;
  bool converged = true;
};

// q-limit at z > zeta (strictly contracting side) for a profile h with
// constant cc; Richardson acceleration in 1/j on power-of-two checkpoints.
PointResult q_limit(const HFunction& h, double z, double cc, double tol,
                    int max_iter) {
  PointResult out;
  double y = z;
  double logP = 0.0;
  double q_prev = kNaN;
  double rich_prev = kNaN;
  int exact_hits = 0;
  std::vector<double> cp;  // q at j = 1, 2, 4, 8, ...
  int next_cp = 1;
  for (int j = 1; j <= max_iter; ++j) {
    double hy = h(y);
    double dl = h.deriv(y, -1);
    if (!(dl > 0.0) || !is_finite(dl)) {
      // zero left-slope (plateau boundary); nudge toward the interior once
      if (j == 1) {
        double zn = z - 1e-9 * std::max(1.0, std::abs(z));
        if (zn > 0.0) return q_limit(h, zn, cc, tol, max_iter);
      }
      fail(errc::degenerate_slope, "profile slope vanished during the q iteration");
    }
    logP += std::log(dl);
    if (logP < -650.0) {
      // derivative product underflow; accept the last value if stable
      if (exact_hits >= 1 || (is_finite(q_prev) && is_finite(rich_prev)))
        break;
      fail(errc::degenerate_slope, "derivative product underflow before convergence");
    }
    double q = (hy - y) * std::exp(-logP);
    out.iters = j;
    y = hy;
    if (is_finite(q_prev)) {
      if (std::abs(q - q_prev) <= 1e-14 * std::max(1.0, std::abs(q))) {
        if (++exact_hits >= 2) {
          out.q = cc * q;
          return out;
        }
      } else {
        exact_hits = 0;
      }
    }
    q_prev = q;
    if (j == next_cp) {
      cp.push_back(q);
      next_cp *= 2;
      size_t n = cp.size();
      if (n >= 3) {
        double rich = (8.0 * cp[n - 1] - 6.0 * cp[n - 2] + cp[n - 3]) / 3.0;
        if (is_finite(rich_prev) &&
            std::abs(rich - rich_prev) <= tol * std::max(1.0, std::abs(rich))) {
          out.q = cc * rich;
          return out;
        }
        rich_prev = rich;
      }
    }
  }
  size_t n = cp.size();
  double best = q_prev;
  if (n >= 3) best = (8.0 * cp[n - 1] - 6.0 * cp[n - 2] + cp[n - 3]) / 3.0;
  out.q = cc * best;
  out.converged = !(is_finite(rich_prev) &&
                    std::abs(best - rich_prev) > 10.0 * tol * std::max(1.0, std::abs(best)));
  if (n < 3 && !is_finite(q_prev)) out.converged = false;
  return out;
}

}  // namespace

double ReconstructionReport::q_at(double z) const {
  if (z < d_lo || z > d_hi) return -kInf;
  auto it = std::lower_bound(grid.begin(), grid.end(), z);
  if (it == grid.end()) return q.back();
  size_t i = static_cast<size_t>(it - grid.begin());
  if (grid[i] == z || i == 0) return q[i];
  double za = grid[i - 1], zb = grid[i];
  double qa = q[i - 1], qb = q[i];
  if (!(qa > -kInf) || !(qb > -kInf)) return std::max(qa, qb) > -kInf ? std::min(qa, qb) : -kInf;
  double t = (z - za) / (zb - za);
  return qa + t * (qb - qa);
}

double ReconstructionReport::converged_fraction() const {
  if (converged.empty()) return 0.0;
  double s = 0.0;
  for (char c : converged) s += c ? 1.0 : 0.0;
  return s / static_cast<double>(converged.size());
}

ReconstructionReport reconstruct(const LocalDiscrepancy& disc,
                                 std::vector<double> grid, double tol,
                                 int max_iter) {
  require(tol > 0.0, errc::invalid_argument, "tolerance must be positive");
  require(max_iter >= 2, errc::invalid_argument, "max_iter must be at least 2");
  require(!grid.empty(), errc::invalid_argument, "reconstruction grid is empty");
  std::sort(grid.begin(), grid.end());

  ReconstructionReport rep;
  rep.model = disc.name();
  rep.grid = std::move(grid);

  const HFunction& hs = disc.h_s();
  const HFunction& hb = disc.h_bar_s();
  rep.d_hi = hs.plateau_start();
  rep.d_lo = -hb.plateau_start();
  rep.zeta_hi = largest_fixed_point(hs);
  double zbar_b = largest_fixed_point(hb);
  rep.zeta_lo = zbar_b == kInf ? -kInf : -zbar_b;
  rep.m_hi = boundary_slope(hs, rep.zeta_hi);
  rep.m_lo = boundary_slope(hb, zbar_b);
  rep.c_hi = c_constant(rep.m_hi);
  rep.c_lo = c_constant(rep.m_lo);

  const int n = static_cast<int>(rep.grid.size());
  rep.q.assign(n, 0.0);
  rep.iterations.assign(n, 0);
  rep.converged.assign(n, 1);

  double zhi = rep.zeta_hi, zlo_b = zbar_b;
  double chi = rep.c_hi, clo = rep.c_lo;
  double dlo = rep.d_lo, dhi = rep.d_hi;
  parallel_for(n, [&](int i) {
    double z = rep.grid[i];
    if (z < dlo || z > dhi) {
      rep.q[i] = -kInf;
      return;
    }
    try {
      if (z >= 0.0) {
        if (z <= zhi) {
          rep.q[i] = 0.0;
        } else {
          auto pr = q_limit(hs, z, chi, tol, max_iter);
          rep.q[i] = std::min(pr.q, 0.0);
          rep.iterations[i] = pr.iters;
          rep.converged[i] = pr.converged ? 1 : 0;
        }
      } else {
        double w = -z;
        if (w <= zlo_b) {
          rep.q[i] = 0.0;
        } else {
          auto pr = q_limit(hb, w, clo, tol, max_iter);
          rep.q[i] = std::min(pr.q, 0.0);
          rep.iterations[i] = pr.iters;
          rep.converged[i] = pr.converged ? 1 : 0;
        }
      }
    } catch (const error&) {
      rep.q[i] = -kInf;
      rep.converged[i] = 0;
    }
  });
  auto cond = check_conditions(disc);
  rep.necessary_ok = cond.necessary_ok;
  rep.sufficient_ok = cond.sufficient_ok;
  return rep;
}

DynamicDecision decide_dynamic(const ReconstructionReport& report,
                               int concavity_grid) {
  require(concavity_grid >= 5, errc::invalid_argument, "concavity grid too small");
  require(report.converged_fraction() >= 0.9, errc::inconclusive,
          "reconstruction converged on fewer than 90% of grid points");

  // mesh over the finite part of q inside the report's grid range
  double lo = std::max(report.d_lo, report.grid.front());
  double hi = std::min(report.d_hi, report.grid.back());
  auto mesh = linspace(lo, hi, concavity_grid);
  std::vector<double> qv(mesh.size());
  double scale = 0.0;
  for (size_t i = 0; i < mesh.size(); ++i) {
    qv[i] = report.q_at(mesh[i]);
    if (qv[i] > -kInf) scale = std::max(scale, std::abs(qv[i]));
  }
  double tol_c = 1e-6 * (1.0 + scale);

  DynamicDecision dec;
  dec.exists = true;
  for (size_t i = 0; i < mesh.size() && dec.exists; ++i) {
    if (!(qv[i] > -kInf)) continue;
    for (size_t j = i + 2; j < mesh.size(); j += 1) {
      if ((i + j) % 2 != 0) continue;
      if (!(qv[j] > -kInf)) break;  // -inf boundary: exclude pairs across it
      size_t mid = (i + j) / 2;
      if (!(qv[mid] > -kInf)) continue;
      if (qv[mid] < 0.5 * (qv[i] + qv[j]) - tol_c) {
        dec.exists = false;
        dec.reason = "q[h_S] not concave";
        break;
      }
    }
  }
  if (!dec.exists) return dec;

  // witness: wrap the reconstructed profile
  std::vector<double> xs, ys;
  bool saw_zero = false;
  for (size_t i = 0; i < report.grid.size(); ++i) {
    if (!(report.q[i] > -kInf)) continue;
    double z = report.grid[i];
    if (!saw_zero && z > 0.0) {
      xs.push_back(0.0);
      ys.push_back(0.0);
      saw_zero = true;
    }
    if (z == 0.0) saw_zero = true;
    if (!xs.empty() && z <= xs.back() + 1e-13 * (1.0 + std::abs(z))) continue;
    xs.push_back(z);
    ys.push_back(std::min(report.q[i], 0.0));
  }
  require(xs.size() >= 2, errc::inconclusive, "too few finite q values for a witness");
  TailMode left = report.d_lo >= xs.front() - 1e-9 * (1.0 + std::abs(xs.front()))
                      ? TailMode::minus_inf
                      : TailMode::extend;
  TailMode right = report.d_hi <= xs.back() + 1e-9 * (1.0 + std::abs(xs.back()))
                       ? TailMode::minus_inf
                       : TailMode::extend;
  HFunction hd = HFunction::sampled("q_" + report.model, xs, ys, left, right);
  dec.witness = DynamicPenalty::from_profile(std::move(hd));
  dec.reason = "q[h_S] concave";
  return dec;
}

ConditionReport check_conditions(const LocalDiscrepancy& disc) {
  ConditionReport rep;
  struct Side {
    const HFunction* h;
    const char* label;
  };
  const HFunction hs = disc.h_s();
  const HFunction hb = disc.h_bar_s();
  for (const auto& side : {Side{&hs, "h_S"}, Side{&hb, "h_bar_S"}}) {
    const HFunction& h = *side.h;
    double zbar = largest_fixed_point(h);
    double dbar = h.plateau_start();
    double lo = zbar == kInf ? kInf : zbar;
    double hi = std::min(dbar, 10.0);
    if (lo >= hi) continue;  // empty contraction interval, nothing to check
    if (h.kind() != HKind::closed_form) {
      const auto& x = h.knots_x();
      for (size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] <= lo + 1e-9 || x[i] >= hi - 1e-9) continue;
        double dl = h.deriv(x[i], -1), dr = h.deriv(x[i], +1);
        if (std::abs(dl - dr) > 1e-3 * std::max(1.0, std::abs(dl))) {
          rep.necessary_ok = false;
          rep.details += std::string(side.label) + " has a derivative jump at z=" +
                         std::to_string(x[i]) + "; ";
        }
      }
    } else {
      auto grid = linspace(lo + 1e-6 * (1.0 + std::abs(lo)), hi - 1e-6, 128);
      for (double z : grid) {
        double dl = h.deriv(z, -1), dr = h.deriv(z, +1);
        if (!is_finite(dl) || !is_finite(dr)) continue;
        if (std::abs(dl - dr) > 1e-3 * std::max(1.0, std::abs(dl))) {
          rep.necessary_ok = false;
          rep.details += std::string(side.label) + " has a derivative jump near z=" +
                         std::to_string(z) + "; ";
          break;
        }
      }
    }
    // sufficient: 1/h' convex on [0, min(dbar, 10))
    double shi = std::min(dbar, 10.0);
    if (shi > 0.1) {
      auto grid = linspace(1e-4, shi * (1.0 - 1e-6), 128);
      double step = grid[1] - grid[0];
      for (size_t i = 1; i + 1 < grid.size(); ++i) {
        auto w = [&](double z) {
          double d = h.deriv(z, +1);
          return d > 0.0 ? 1.0 / d : kInf;
        };
        double a = w(grid[i] - step), b = w(grid[i]), c = w(grid[i] + step);
        if (!is_finite(a) || !is_finite(b) || !is_finite(c)) continue;
        double scale = std::max(1.0, std::abs(a) + std::abs(c));
        if (a + c - 2.0 * b < -1e-8 * scale) {
          rep.sufficient_ok = false;
          rep.details += std::string("1/") + side.label + "' not convex near z=" +
                         std::to_string(grid[i]) + "; ";
          break;
        }
      }
    }
  }
  if (rep.details.empty()) rep.details = "conditions hold on the sampled grids";
  return rep;
}

std::vector<ProfileRow> emit_profile(const ReconstructionReport& report) {
  std::vector<ProfileRow> rows;
  rows.reserve(report.grid.size());
  // rebuild the witness if the profile is concave; otherwise cd column is NaN
  std::optional<DynamicPenalty> witness;
  try {
    auto dec = decide_dynamic(report, 129);
    if (dec.exists) witness = dec.witness;
  } catch (const error&) {
  }
  for (size_t i = 0; i < report.grid.size(); ++i) {
    double z = report.grid[i];
    double cd1 = kNaN;
    if (witness) {
      try {
        cd1 = witness->cd(1.0, z);
      } catch (const error&) {
      }
    }
    rows.push_back({z, report.q[i], cd1});
  }
  return rows;
}

}  // namespace ubw1
