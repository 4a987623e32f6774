#include "dirac.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace ubw1 {

const char* regime_name(DiracRegime r) {
  switch (r) {
    case DiracRegime::interior: return "interior";
    case DiracRegime::boundary_a0: return "boundary_a0";
    case DiracRegime::boundary_b0: return "boundary_b0";
    case DiracRegime::boundary_other: return "boundary_other";
  }
  return "?";
}

double dirac_objective(const LocalDiscrepancy& disc, const DiracInstance& inst,
                       double a, double b) {
  double v0 = disc.cs(std::max(0.0, inst.m00 - a), std::max(0.0, inst.m10 + b));
  double v1 = disc.cs(std::max(0.0, inst.m0L + a), std::max(0.0, inst.m1L - b));
  return inst.L * (a + b) + v0 + v1;
}

TangentSplit tangent_split(const LocalDiscrepancy& disc, double s) {
  require(s < 0.0, errc::invalid_argument, "tangent intercept must be negative");
  require(!disc.is_exact(), errc::invalid_argument,
          "the exact model has no finite tangent system");
  auto c1 = [&](double g) { return disc.cs(1.0, g); };

  // left side: gamma in [0, 1]; the achievable-intercept interval rises with
  // gamma, its lower end using the left subgradient
  auto lower_intercept = [&](double g) -> double {
    if (g <= 0.0) return -kInf;  // the subdifferential at 0 extends to -inf
    double c = c1(g);
    if (!is_finite(c)) return -kInf;
    return c + disc.d2_cs1(g, -1) * (1.0 - g);
  };
  double alo = 0.0, ahi = 1.0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (alo + ahi);
    (lower_intercept(mid) <= s ? alo : ahi) = mid;
  }
  double alpha = alo;
  double g_alpha = disc.d2_cs1(std::max(alpha, 1e-300), +1);

  // right side: gamma in [1, inf); the interval's upper end uses the left
  // subgradient and falls with gamma
  auto upper_intercept = [&](double g) -> double {
    double c = c1(g);
    if (!is_finite(c)) return -kInf;
    return c + disc.d2_cs1(g, -1) * (1.0 - g);
  };
  double beta, g_beta;
  double hi = 2.0;
  int guard = 0;
  while (upper_intercept(hi) > s && hi < 1e15 && guard++ < 120) hi *= 2.0;
  if (upper_intercept(hi) > s) {
    // linear tail: the touching point escapes to infinity
    beta = kInf;
    g_beta = disc.d2_cs1(hi, -1);
  } else {
    double blo = 1.0, bhi = hi;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (blo + bhi);
      (upper_intercept(mid) > s ? blo : bhi) = mid;
    }
    beta = bhi;
    g_beta = disc.d2_cs1(beta, -1);
  }
  double Ls = g_beta - g_alpha;
  require(Ls > 0.0, errc::out_of_range, "tangent slopes collapsed; intercept out of range");
  return {alpha, beta, Ls};
}

namespace {

struct Candidate {
  double a = 0.0, b = 0.0, value = kInf;
  DiracRegime regime = DiracRegime::boundary_other;
  double alpha = kNaN, beta = kNaN, s = kNaN;
};

Candidate solve_oriented(const LocalDiscrepancy& disc, const DiracInstance& in) {
  std::vector<Candidate> cands;
  auto P = [&](double a, double b) { return dirac_objective(disc, in, a, b); };

  auto consider = [&](double a, double b, DiracRegime reg, double alpha, double beta,
                      double s) {
    a = std::clamp(a, 0.0, in.m00);
    b = std::clamp(b, 0.0, in.m1L);
    cands.push_back({a, b, P(a, b), reg, alpha, beta, s});
  };

  // interior attempt via the tangent system
  bool oriented = in.m10 < in.m00 && in.m1L > in.m0L;
  if (oriented && !disc.is_exact()) {
    try {
      // bracket s with L(s) around the requested distance; L(s) increases
      // with |s|
      double s_lo = -1e-9, s_hi = -1e8;
      double L_lo = tangent_split(disc, s_lo).L_of_s;
      double L_hi = tangent_split(disc, s_hi).L_of_s;
      if (in.L >= L_lo - 1e-12 && in.L <= L_hi + 1e-12 && L_hi > L_lo + 1e-12) {
        double a_s = s_lo, b_s = s_hi;
        for (int it = 0; it < 140; ++it) {
          double mid = -std::sqrt((-a_s) * (-b_s));  // geometric mean in |s|
          (tangent_split(disc, mid).L_of_s < in.L ? a_s : b_s) = mid;
          if (std::abs(a_s - b_s) <= 1e-14 * std::abs(a_s)) break;
        }
        double s = 0.5 * (a_s + b_s);
        auto tg = tangent_split(disc, s);
        if (is_finite(tg.beta) && tg.beta > tg.alpha + 1e-12) {
          double va = tg.alpha * in.m00 - in.m10;
          double vb = tg.beta * in.m0L - in.m1L;
          double den = tg.beta - tg.alpha;
          double a = (-va - vb) / den;
          double b = (tg.beta * va + tg.alpha * vb) / den;
          double tolbox = 1e-10 * (1.0 + in.m00 + in.m1L);
          bool ok = a >= -tolbox && a <= in.m00 + tolbox && b >= -tolbox &&
                    b <= in.m1L + tolbox;
          if (ok && in.m00 > 0.0 && tg.alpha < in.m10 / in.m00 - 1e-10) ok = false;
          if (ok && in.m0L > 0.0 && tg.beta > in.m1L / in.m0L + 1e-10) ok = false;
          if (ok) consider(a, b, DiracRegime::interior, tg.alpha, tg.beta, s);
        }
      }
    } catch (const error&) {
      // tangent system unavailable; the box search below covers it
    }
  }

  // box edges by golden section
  auto edge = [&](bool fix_a, double fixed, DiracRegime reg) {
    double span = fix_a ? in.m1L : in.m00;
    if (span <= 0.0) {
      consider(fix_a ? fixed : 0.0, fix_a ? 0.0 : fixed, reg, kNaN, kNaN, kNaN);
      return;
    }
    auto f = [&](double u) { return fix_a ? P(fixed, u) : P(u, fixed); };
    double u = golden_min(f, 0.0, span, 1e-12);
    consider(fix_a ? fixed : u, fix_a ? u : fixed, reg, kNaN, kNaN, kNaN);
  };
  edge(true, 0.0, DiracRegime::boundary_a0);
  edge(false, 0.0, DiracRegime::boundary_b0);
  if (in.m00 > 0.0) edge(true, in.m00, DiracRegime::boundary_other);
  if (in.m1L > 0.0) edge(false, in.m1L, DiracRegime::boundary_other);

  // coarse grid + coordinate refinement (guards non-tangent interior optima)
  if (in.m00 > 0.0 && in.m1L > 0.0) {
    double ga = 0.0, gb = 0.0, gv = P(0.0, 0.0);
    for (int i = 0; i <= 32; ++i)
      for (int j = 0; j <= 32; ++j) {
        double a = in.m00 * i / 32.0, b = in.m1L * j / 32.0;
        double v = P(a, b);
        if (v < gv) {
          gv = v;
          ga = a;
          gb = b;
        }
      }
    for (int sweep = 0; sweep < 24; ++sweep) {
      ga = golden_min([&](double a) { return P(a, gb); }, 0.0, in.m00, 1e-13);
      gb = golden_min([&](double b) { return P(ga, b); }, 0.0, in.m1L, 1e-13);
    }
    double eps = 1e-9 * (1.0 + in.m00 + in.m1L);
    DiracRegime reg = DiracRegime::interior;
    if (ga <= eps)
      reg = DiracRegime::boundary_a0;
    else if (gb <= eps)
      reg = DiracRegime::boundary_b0;
    else if (ga >= in.m00 - eps || gb >= in.m1L - eps)
      reg = DiracRegime::boundary_other;
    consider(ga, gb, reg, kNaN, kNaN, kNaN);
  }

  // lowest value wins; within the value tie band an interior candidate is
  // preferred only when it sits strictly inside the box (exact boundary hits
  // classify as boundary)
  double vmin = kInf;
  for (const auto& c : cands) vmin = std::min(vmin, c.value);
  double tie = 1e-12 * (1.0 + std::abs(vmin));
  double margin = 1e-10 * (1.0 + in.m00 + in.m1L);
  Candidate best;
  bool have = false;
  for (const auto& c : cands) {
    if (c.value > vmin + tie) continue;
    bool strict_interior = c.regime == DiracRegime::interior &&
                           c.a > margin && c.a < in.m00 - margin &&
                           c.b > margin && c.b < in.m1L - margin;
    if (!have) {
      best = c;
      have = true;
      continue;
    }
    bool best_strict = best.regime == DiracRegime::interior &&
                       best.a > margin && best.a < in.m00 - margin &&
                       best.b > margin && best.b < in.m1L - margin;
    if (strict_interior && !best_strict)
      best = c;
    else if (!strict_interior && best.regime == DiracRegime::interior && !best_strict)
      best = c;  // boundary replaces a non-strict interior label
  }
  return best;
}

}  // namespace

DiracSolution solve_dirac(const LocalDiscrepancy& disc, const DiracInstance& inst) {
  require(inst.L > 0.0, errc::invalid_argument, "site distance must be positive");
  for (double m : {inst.m00, inst.m0L, inst.m10, inst.m1L})
    require(m >= 0.0, errc::negative_mass, "site masses must be nonnegative");
  if (disc.is_exact()) {
    double t0 = inst.m00 + inst.m0L, t1 = inst.m10 + inst.m1L;
    require(std::abs(t0 - t1) <= 1e-9 * std::max(1.0, t0), errc::infeasible_model,
            "the exact model forbids any net mass change");
  }

  // balanced short-circuit
  if (inst.m00 == inst.m10 && inst.m0L == inst.m1L) {
    DiracSolution out;
    out.regime = DiracRegime::boundary_a0;
    out.value = 0.0;
    out.a = out.b = 0.0;
    return out;
  }

  // normalized orientation: site 0 shrinks, site L grows; otherwise try both
  DiracInstance fwd = inst;
  DiracInstance rev{inst.L, inst.m0L, inst.m00, inst.m1L, inst.m10};
  Candidate cf = solve_oriented(disc, fwd);
  Candidate cr = solve_oriented(disc, rev);
  bool use_rev = cr.value < cf.value - 1e-12 * (1.0 + std::abs(cf.value));
  const Candidate& c = use_rev ? cr : cf;

  DiracSolution out;
  out.a = c.a;
  out.b = c.b;
  out.value = c.value;
  out.regime = c.regime;
  out.alpha = c.alpha;
  out.beta = c.beta;
  out.s = c.s;
  out.swapped = use_rev;
  if (c.regime == DiracRegime::interior && is_finite(c.alpha)) {
    double jump = std::abs(disc.d2_cs1(std::max(c.alpha, 1e-12), +1) -
                           disc.d2_cs1(std::max(c.alpha, 1e-12), -1));
    out.unique_hint = jump <= 1e-9;
  }
  // infinite objective means the model forbids the required change
  require(is_finite(out.value), errc::infeasible_model,
          "the model assigns infinite cost to every admissible split");
  return out;
}

std::vector<PhaseRow> phase_diagram(const LocalDiscrepancy& disc,
                                    const std::vector<double>& L_grid,
                                    const std::vector<double>& ratio_grid) {
  std::vector<PhaseRow> rows;
  rows.reserve(L_grid.size() * ratio_grid.size());
  for (double L : L_grid)
    for (double r : ratio_grid) {
      DiracInstance inst{L, 1.0, 0.0, 0.0, r};
      auto sol = solve_dirac(disc, inst);
      rows.push_back({L, r, sol.regime});
    }
  return rows;
}

}  // namespace ubw1
