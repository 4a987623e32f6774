#include "flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "error.hpp"

namespace ubw1 {

namespace {

std::vector<double> split_args(const std::string& inner) {
  std::vector<double> out;
  std::stringstream ss(inner);
  std::string tok;
  while (std::getline(ss, tok, ','))
    out.push_back(std::stod(tok));
  return out;
}

constexpr double kSegTol = 1e-12;

}  // namespace

void DynamicPenalty::detect_fixed_interval() {
  // largest / smallest zeros of h_d around 0, bisection tolerance 1e-12
  auto nonzero = [&](double z) { return h_(z) < -1e-300; };
  double hi_cap = std::min(h_.domain_hi(), 1e8);
  if (!nonzero(hi_cap)) {
    fix_hi_ = h_.domain_hi();
  } else {
    double lo = 0.0, hi = hi_cap;
    // h(lo) == 0, h(hi) < 0
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
      double mid = 0.5 * (lo + hi);
      (nonzero(mid) ? hi : lo) = mid;
    }
    fix_hi_ = hi;  // tie toward the wider interval
  }
  double lo_cap = std::max(h_.domain_lo(), -1e8);
  if (!nonzero(lo_cap)) {
    fix_lo_ = h_.domain_lo();
  } else {
    double lo = lo_cap, hi = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
      double mid = 0.5 * (lo + hi);
      (nonzero(mid) ? lo : hi) = mid;
    }
    fix_lo_ = lo;
  }
}

DynamicPenalty DynamicPenalty::from_profile(HFunction h_d) {
  DynamicPenalty dp;
  dp.h_ = std::move(h_d);
  dp.poly_ = dp.h_.kind() != HKind::closed_form;
  dp.detect_fixed_interval();
  return dp;
}

DynamicPenalty DynamicPenalty::catalog(const std::string& spec) {
  std::string name = spec;
  std::string inner;
  auto lp = spec.find('(');
  if (lp != std::string::npos) {
    require(spec.back() == ')', errc::parse_error, "unbalanced parentheses in '" + spec + "'");
    name = spec.substr(0, lp);
    inner = spec.substr(lp + 1, spec.size() - lp - 2);
  }
  if (name == "js") name = "jensen_shannon";

  DynamicPenalty dp;
  if (name == "exact") {
    dp.h_ = HFunction::closed_form(
        "exact", [](double) { return 0.0; }, [](double, int) { return 0.0; },
        -kInf, kInf, 0.0, -kInf);
    dp.analytic_ = Analytic::zero;
  } else if (name == "tv") {
    dp.h_ = HFunction::piecewise("tv", {-1.0, 1.0}, {0.0, 0.0},
                                 TailMode::minus_inf, TailMode::minus_inf);
    dp.poly_ = true;
  } else if (name == "pwl") {
    auto a = split_args(inner);
    require(a.size() == 6, errc::invalid_argument,
            "pwl needs 6 parameters (dlo,slo,a,shi,dhi,b)");
    double dlo = a[0], slo = a[1], sa = a[2], shi = a[3], dhi = a[4], sb = a[5];
    require(0.0 < sb && sb <= 1.0 && 1.0 <= sa, errc::invalid_argument,
            "pwl slopes must satisfy 0 < b <= 1 <= a");
    require(dlo <= slo && slo <= 0.0 && 0.0 <= shi && shi <= dhi,
            errc::invalid_argument, "pwl knots must satisfy dlo <= slo <= 0 <= shi <= dhi");
    std::vector<double> xs, ys;
    auto push = [&](double x, double y) {
      if (!xs.empty() && x <= xs.back() + 1e-15 * (1.0 + std::abs(x))) return;
      xs.push_back(x);
      ys.push_back(y);
    };
    push(dlo, (dlo - slo) * std::log(sa));
    push(slo, 0.0);
    push(shi, 0.0);
    push(dhi, (dhi - shi) * std::log(sb));
    dp.h_ = HFunction::piecewise("pwl", xs, ys, TailMode::minus_inf, TailMode::minus_inf);
    dp.poly_ = true;
  } else if (name == "hellinger") {
    dp.h_ = HFunction::closed_form(
        "hellinger", [](double z) { return -z * z; },
        [](double z, int) { return -2.0 * z; }, -kInf, kInf, 0.0, 0.0);
    dp.analytic_ = Analytic::hellinger;
  } else if (name == "jensen_shannon") {
    dp.h_ = HFunction::closed_form(
        "jensen_shannon",
        [](double z) {
          double w = std::exp2(0.5 * z) - std::exp2(-0.5 * z);
          return -w * w / std::log(2.0);
        },
        [](double z, int) { return -(std::exp2(z) - std::exp2(-z)); },
        -kInf, kInf, 0.0, 0.0);
    dp.analytic_ = Analytic::js;
  } else {
    fail(errc::unknown_name,
         "no closed-form dynamic profile named '" + name +
             "' (chi2/kl0/kl1/power require reconstruction)");
  }
  dp.h_.validate_dynamic_profile();
  dp.detect_fixed_interval();
  return dp;
}

int DynamicPenalty::argmax_knot(double rho, double zeta) const {
  // the knot sequence rho*y_i + zeta*x_i is concave in i; ternary search
  const auto& x = h_.knots_x();
  const auto& y = h_.knots_y();
  int lo = 0, hi = static_cast<int>(x.size()) - 1;
  auto v = [&](int i) { return rho * y[i] + zeta * x[i]; };
  while (hi - lo > 2) {
    int m1 = lo + (hi - lo) / 3;
    int m2 = hi - (hi - lo) / 3;
    if (v(m1) < v(m2))
      lo = m1 + 1;
    else
      hi = m2;
  }
  int best = lo;
  for (int i = lo + 1; i <= hi; ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

double DynamicPenalty::cd(double rho, double zeta) const {
  require(rho >= 0.0, errc::negative_mass, "c_D density must be nonnegative");
  if (rho == 0.0) {
    if (zeta == 0.0) return 0.0;
    if (zeta > 0.0) return dom_hi() == kInf ? kInf : zeta * dom_hi();
    return dom_lo() == -kInf ? kInf : zeta * dom_lo();
  }
  if (zeta == 0.0) return 0.0;
  switch (analytic_) {
    case Analytic::zero:
      return zeta == 0.0 ? 0.0 : kInf;
    case Analytic::hellinger:
      return zeta * zeta / (4.0 * rho);
    case Analytic::js: {
      double g = zeta / (2.0 * rho) + std::sqrt(sqr(zeta / (2.0 * rho)) + 1.0);
      double w = std::sqrt(g) - 1.0 / std::sqrt(g);
      return zeta * std::log2(g) - rho * w * w / std::log(2.0);
    }
    case Analytic::none:
      break;
  }
  if (poly_) {
    int i = argmax_knot(rho, zeta);
    double best = rho * h_.knots_y()[i] + zeta * h_.knots_x()[i];
    return std::max(best, 0.0);  // z = 0 is always feasible with value 0
  }
  double zlo = std::max(dom_lo(), -1e8), zhi = std::min(dom_hi(), 1e8);
  auto neg = [&](double z) {
    double v = h_(z);
    return v == -kInf ? kInf : -(rho * v + zeta * z);
  };
  double fv;
  golden_min(neg, zlo, zhi, 1e-12, &fv);
  double best = -fv;
  for (double ze : {zlo, zhi}) {
    double v = h_(ze);
    if (v > -kInf) best = std::max(best, rho * v + zeta * ze);
  }
  return std::max(best, 0.0);
}

std::pair<double, double> DynamicPenalty::cd_grad(double rho, double zeta) const {
  require(rho > 0.0, errc::invalid_argument, "cd_grad needs rho > 0");
  double zstar;
  switch (analytic_) {
    case Analytic::zero:
      return {0.0, 0.0};
    case Analytic::hellinger:
      zstar = zeta / (2.0 * rho);
      break;
    case Analytic::js: {
      double g = zeta / (2.0 * rho) + std::sqrt(sqr(zeta / (2.0 * rho)) + 1.0);
      zstar = std::log2(g);
      break;
    }
    case Analytic::none: {
      if (poly_) {
        int bi = argmax_knot(rho, zeta);
        double best = rho * h_.knots_y()[bi] + zeta * h_.knots_x()[bi];
        if (best < 0.0) return {0.0, 0.0};  // z = 0 wins
        return {h_.knots_y()[bi], h_.knots_x()[bi]};
      }
      double zlo = std::max(dom_lo(), -1e8), zhi = std::min(dom_hi(), 1e8);
      auto neg = [&](double z) {
        double v = h_(z);
        return v == -kInf ? kInf : -(rho * v + zeta * z);
      };
      zstar = golden_min(neg, zlo, zhi, 1e-12);
      break;
    }
    default:
      zstar = 0.0;
  }
  return {h_(zstar), zstar};
}

namespace {

// time for the flow to descend from level a to level b along one linear piece
// h(x) = ylo + s (x - xlo), h < 0 on (b, a]; +inf when h vanishes at b
double linear_piece_time(double a, double b, double xlo, double ylo, double s) {
  double ha = ylo + s * (a - xlo);
  double hb = ylo + s * (b - xlo);
  if (!(ha < 0.0)) return kInf;
  if (s == 0.0) return (a - b) / (-ha);
  if (!(hb < 0.0)) return kInf;
  return std::log(hb / ha) / s;
}

// level reached after descending for time 'rem' inside the same piece
double linear_piece_descend(double a, double rem, double xlo, double ylo, double s,
                            bool* snapped) {
  double ha = ylo + s * (a - xlo);
  if (s == 0.0) return a + rem * ha;  // ha < 0
  double hy = ha * std::exp(s * rem);
  if (std::abs(hy) < 1e-300) {
    if (snapped) *snapped = true;
    return xlo - ylo / s;  // the zero level of this piece
  }
  return xlo + (hy - ylo) / s;
}

}  // namespace

FlowResult DynamicPenalty::flow_piecewise(double t, double z, bool positive_side) const {
  const auto& X = h_.knots_x();
  const auto& Y = h_.knots_y();
  const int n = static_cast<int>(X.size());
  double c = z, rem = t;
  // walk downward piece by piece
  while (true) {
    // piece containing (just below) c: [X[i], X[i+1]]; i = -1 left tail,
    // i = n-1 right tail
    int i;
    if (c > X[n - 1]) {
      i = n - 1;
    } else {
      i = static_cast<int>(std::upper_bound(X.begin(), X.end(), c) - X.begin()) - 1;
      if (i >= 0 && X[i] == c) --i;  // at a knot: continue into the piece below
      if (i >= n - 1) i = n - 2;
    }
    double xlo, ylo, s, lower;
    if (i < 0) {  // left tail
      if (h_.domain_lo() > -kInf) return {-kInf, false};  // past the floor
      s = (Y[1] - Y[0]) / (X[1] - X[0]);
      xlo = X[0];
      ylo = Y[0];
      lower = -kInf;
    } else if (i == n - 1) {  // right tail, anchored at the last knot
      s = (Y[n - 1] - Y[n - 2]) / (X[n - 1] - X[n - 2]);
      xlo = X[n - 1];
      ylo = Y[n - 1];
      lower = X[n - 1];
    } else {
      s = (Y[i + 1] - Y[i]) / (X[i + 1] - X[i]);
      xlo = X[i];
      ylo = Y[i];
      lower = X[i];
    }
    if (positive_side) lower = std::max(lower, fix_hi_);
    double hc = ylo + s * (c - xlo);
    if (!(hc < 0.0)) {
      // numerically at the fixed boundary
      return {positive_side ? fix_hi_ : c, positive_side};
    }
    double seg = lower == -kInf ? kInf : linear_piece_time(c, lower, xlo, ylo, s);
    if (seg >= rem) {
      bool snapped = false;
      double y = linear_piece_descend(c, rem, xlo, ylo, s, &snapped);
      y = std::max(y, lower == -kInf ? -kInf : lower);
      return {y, snapped};
    }
    rem -= seg;
    c = lower;
    if (!positive_side) {
      // exiting the domain?
      bool left_tail_open = h_.domain_lo() == -kInf;
      if (i <= 0 && !left_tail_open && c <= X[0]) return {-kInf, false};
      if (c == -kInf) return {-kInf, false};
    } else if (c <= fix_hi_) {
      return {fix_hi_, true};
    }
  }
}

double DynamicPenalty::exit_time_piecewise(double z, double cap) const {
  double acc = 0.0;
  const auto& X = h_.knots_x();
  const auto& Y = h_.knots_y();
  const int n = static_cast<int>(X.size());
  double c = z;
  while (true) {
    int i = static_cast<int>(std::upper_bound(X.begin(), X.end(), c) - X.begin()) - 1;
    if (i >= 0 && X[i] == c) --i;
    if (i >= n - 1) i = n - 2;
    double xlo, ylo, s, lower;
    if (i < 0) {
      if (h_.domain_lo() > -kInf) return acc;  // already at the floor
      s = (Y[1] - Y[0]) / (X[1] - X[0]);
      xlo = X[0];
      ylo = Y[0];
      lower = -kInf;
    } else {
      s = (Y[i + 1] - Y[i]) / (X[i + 1] - X[i]);
      xlo = X[i];
      ylo = Y[i];
      lower = X[i];
    }
    if (lower == -kInf) return cap;  // extend tail: never truly exits
    double seg = linear_piece_time(c, lower, xlo, ylo, s);
    acc += seg;
    if (acc >= cap || !is_finite(acc)) return cap;
    c = lower;
    if (i <= 0 && h_.domain_lo() > -kInf && c <= X[0] + 0.0) return acc;
  }
}

// travel time of the descending flow between two levels strictly above the
// fixed interval, via the substitution x = fix_hi + e^u
double DynamicPenalty::segment_time_above(double y_lo, double y_hi) const {
  double ulo = std::log(y_lo - fix_hi_), uhi = std::log(y_hi - fix_hi_);
  auto f = [&](double u) {
    double x = fix_hi_ + std::exp(u);
    double hv = h_(x);
    if (!(hv < 0.0)) return 0.0;  // boundary fuzz
    return std::exp(u) / (-hv);
  };
  return quad_adaptive(f, ulo, uhi, kSegTol, 1 << 14);
}

double DynamicPenalty::segment_time_below(double y_lo, double y_hi) const {
  // levels below fix_lo; substitution x = fix_lo - e^u
  double ulo = std::log(fix_lo_ - y_hi), uhi = std::log(fix_lo_ - y_lo);
  auto f = [&](double u) {
    double eu = std::exp(u);
    double x = fix_lo_ - eu;
    double hv = h_(x);
    if (!(hv < 0.0) || hv == -kInf) return 0.0;
    double v = eu / (-hv);
    return is_finite(v) ? v : 0.0;
  };
  return quad_adaptive(f, ulo, uhi, kSegTol, 1 << 14);
}

FlowResult DynamicPenalty::flow_above(double t, double z) const {
  double D = z - fix_hi_;
  double rem = t, y_prev = z;
  for (int k = 1; k <= 1080; ++k) {
    double dist = D * std::ldexp(1.0, -k);
    if (dist < 1e-300) break;
    double y_next = fix_hi_ + dist;
    if (y_next >= y_prev) continue;
    double seg = segment_time_above(y_next, y_prev);
    if (seg >= rem) {
      double cap = y_prev;
      double y = bisect(
          [&](double yy) { return segment_time_above(yy, cap) - rem; }, y_next,
          y_prev, 1e-14);
      return {y, false};
    }
    rem -= seg;
    y_prev = y_next;
  }
  return {fix_hi_, true};
}

FlowResult DynamicPenalty::flow_below(double t, double z) const {
  double D = fix_lo_ - z;  // > 0
  double rem = t, y_prev = z;
  double floor = std::max(dom_lo(), -1e30);
  for (int k = 1; k <= 160; ++k) {
    double dist = D * std::ldexp(1.0, k);
    double y_next = fix_lo_ - dist;
    bool at_floor = false;
    if (!(y_next > floor)) {
      y_next = floor;
      at_floor = true;
    }
    if (y_next >= y_prev) {
      if (at_floor) return {-kInf, false};
      continue;
    }
    double seg = segment_time_below(y_next, y_prev);
    if (seg >= rem) {
      double cap = y_prev;
      double y = bisect(
          [&](double yy) { return rem - segment_time_below(yy, cap); }, y_next,
          y_prev, 1e-14);
      return {y, false};
    }
    rem -= seg;
    y_prev = y_next;
    if (at_floor || y_next < -1e30) return {-kInf, false};
  }
  return {-kInf, false};
}

FlowResult DynamicPenalty::flow(double t, double z) const {
  require(t >= 0.0, errc::invalid_argument, "flow time must be nonnegative");
  if (z < dom_lo() || z > dom_hi() || !(h_(z) > -kInf)) {
    if (!(z >= fix_lo_ && z <= fix_hi_)) return {-kInf, false};
  }
  if (z >= fix_lo_ && z <= fix_hi_) return {z, true};
  if (t == 0.0) return {z, false};
  if (poly_) return flow_piecewise(t, z, z > fix_hi_);
  if (z > fix_hi_) return flow_above(t, z);
  return flow_below(t, z);
}

FlowResult DynamicPenalty::inverse_flow(double t, double z) const {
  require(t >= 0.0, errc::invalid_argument, "flow time must be nonnegative");
  FlowResult r = reflected().flow(t, -z);
  return {r.value == -kInf ? -kInf : -r.value, r.reached_fixed_point};
}

const DynamicPenalty& DynamicPenalty::reflected() const {
  if (refl_) return *refl_;
  auto r = std::make_shared<DynamicPenalty>();
  if (h_.kind() == HKind::closed_form) {
    auto base = std::make_shared<HFunction>(h_);
    r->h_ = HFunction::closed_form(
        h_.name() + "_reflected", [base](double z) { return (*base)(-z); },
        [base](double z, int side) { return -base->deriv(-z, -side); },
        h_.domain_hi() == kInf ? -kInf : -h_.domain_hi(),
        h_.domain_lo() == -kInf ? kInf : -h_.domain_lo(), h_.sup_value(),
        -kInf);
  } else {
    const auto& x = h_.knots_x();
    const auto& y = h_.knots_y();
    size_t n = x.size();
    std::vector<double> mx(n), my(n);
    for (size_t i = 0; i < n; ++i) {
      mx[i] = -x[n - 1 - i];
      my[i] = y[n - 1 - i];
    }
    TailMode left = h_.domain_hi() == kInf ? TailMode::extend : TailMode::minus_inf;
    TailMode right = h_.domain_lo() == -kInf ? TailMode::extend : TailMode::minus_inf;
    r->h_ = HFunction::piecewise(h_.name() + "_reflected", mx, my, left, right);
  }
  r->analytic_ = analytic_;  // all closed-form rows are symmetric
  r->poly_ = poly_;
  r->fix_lo_ = -fix_hi_;
  r->fix_hi_ = -fix_lo_;
  refl_ = std::move(r);
  return *refl_;
}

double DynamicPenalty::exit_time(double z, double cap) const {
  require(z < fix_lo_, errc::invalid_argument, "exit_time needs z below the fixed interval");
  if (poly_) return exit_time_piecewise(z, cap);
  double D = fix_lo_ - z;
  double acc = 0.0, y_prev = z;
  double floor = std::max(dom_lo(), -1e30);
  for (int k = 1; k <= 160; ++k) {
    double y_next = fix_lo_ - D * std::ldexp(1.0, k);
    bool at_floor = false;
    if (!(y_next > floor)) {
      y_next = floor;
      at_floor = true;
    }
    if (y_next < y_prev) {
      acc += segment_time_below(y_next, y_prev);
      y_prev = y_next;
    }
    if (acc >= cap) return cap;
    if (at_floor || y_next < -1e30) return acc;
  }
  return acc;
}

HFunction h_s_profile_from_dynamic(const DynamicPenalty& dp) {
  auto dpp = std::make_shared<DynamicPenalty>(dp);
  // left end of dom F_1: the level from which the flow exits the domain in
  // time exactly 1 (never exits for levels in [fix_lo, ...])
  double z_crit;
  if (dp.fixed_lo() <= dp.dom_lo() || dp.fixed_lo() == -kInf) {
    z_crit = dp.dom_lo();
  } else {
    double lo = dp.dom_lo();
    if (lo == -kInf) {
      lo = std::min(dp.fixed_lo() - 1.0, -1.0);
      int guard = 0;
      while (dp.exit_time(lo, 2.0) > 1.0 && guard++ < 120) {
        lo = dp.fixed_lo() + 2.0 * (lo - dp.fixed_lo());
        if (lo < -1e30) break;
      }
    }
    if (lo < -1e30 || (lo == dp.dom_lo() && lo == -kInf)) {
      z_crit = -kInf;
    } else {
      double a = std::max(lo, dp.dom_lo());
      double b = dp.fixed_lo();
      double pad = 1e-12 * (1.0 + std::abs(a) + std::abs(b));
      auto f = [&](double z) { return dpp->exit_time(z, 4.0) - 1.0; };
      double aa = a + pad, bb = b - pad;
      double fa = f(aa), fb = f(bb);
      // quadrature fuzz can leave the nominal bracket one-sided; widen it
      int guard2 = 0;
      while (fa > 0.0 && guard2++ < 60 && aa > -1e29 && aa > dp.dom_lo()) {
        aa = std::max(dp.dom_lo(), b + 2.0 * (aa - b));
        fa = f(aa);
      }
      if (fa > 0.0)
        z_crit = aa;  // the flow survives everywhere we can reach
      else if (fb <= 0.0)
        z_crit = b;
      else
        z_crit = bisect(f, aa, bb, 1e-13);
    }
  }
  double hi_cap;
  if (dp.dom_hi() < kInf) {
    double probe = dp.dom_hi();
    FlowResult r = dp.flow(1.0, probe);
    if (r.value == -kInf) {
      probe = std::nextafter(probe, dp.fixed_hi());
      r = dp.flow(1.0, probe);
    }
    hi_cap = r.value;
  } else {
    hi_cap = kInf;
  }

  auto cache = std::make_shared<std::map<double, double>>();
  auto mtx = std::make_shared<std::mutex>();
  double zc = z_crit, dh = dp.dom_hi();
  auto fn = [dpp, cache, mtx, zc, dh, hi_cap](double z) -> double {
    if (z < zc) return -kInf;
    if (z > dh) return hi_cap;
    {
      std::lock_guard<std::mutex> lock(*mtx);
      auto it = cache->find(z);
      if (it != cache->end()) return it->second;
    }
    double v = dpp->flow(1.0, z).value;
    std::lock_guard<std::mutex> lock(*mtx);
    (*cache)[z] = v;
    return v;
  };
  double supv = hi_cap == kInf ? (dp.fixed_hi() == kInf ? kInf : kNaN) : hi_cap;
  if (hi_cap == kInf) {
    // unbounded domain: sup F_1 = lim_{z->inf} F_1(z); probe a large level
    supv = dp.flow(1.0, 1e9).value;
    if (!(supv > -kInf)) supv = kInf;
  }
  return HFunction::closed_form("flow_of_" + dp.name(), fn, nullptr, z_crit,
                                kInf, supv, dh);
}

LocalDiscrepancy static_model_from_dynamic(const DynamicPenalty& dp) {
  return LocalDiscrepancy::from_profile("static_of_" + dp.name(),
                                        h_s_profile_from_dynamic(dp));
}

}  // namespace ubw1
