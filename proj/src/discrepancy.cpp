#include "discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "error.hpp"

namespace ubw1 {

namespace {

double xlog2x_ratio(double m, double total) {
  // m * log2(2m/total) with the 0*log0 = 0 convention
  if (m == 0.0) return 0.0;
  return m * std::log2(2.0 * m / total);
}

std::vector<double> split_args(const std::string& inner) {
  std::vector<double> out;
  std::stringstream ss(inner);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      fail(errc::parse_error, "bad numeric argument '" + tok + "'");
    }
  }
  return out;
}

// Conjugate of a piecewise-linear profile: c(m0,m1) = sup_z -z*m0 + h(z)*m1.
double conjugate_pw(const HFunction& h, double m0, double m1) {
  if (m0 == 0.0 && m1 == 0.0) return 0.0;
  const auto& x = h.knots_x();
  const auto& y = h.knots_y();
  size_t n = x.size();
  // unbounded directions from the end segments
  double sL = (y[1] - y[0]) / (x[1] - x[0]);
  double sR = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  if (h.domain_lo() == -kInf && m0 > sL * m1 + 1e-15 * (m0 + m1)) return kInf;
  if (h.plateau_start() == kInf && h.domain_hi() == kInf && sR > 0.0 &&
      sR * m1 > m0 + 1e-15 * (m0 + m1))
    return kInf;
  if (m0 == 0.0 && h.sup_value() == kInf) return kInf;
  double best = -kInf;
  for (size_t i = 0; i < n; ++i) best = std::max(best, -x[i] * m0 + y[i] * m1);
  return std::max(best, 0.0);
}

}  // namespace

HFunction LocalDiscrepancy::mirror_profile(const HFunction& h) {
  if (h.kind() != HKind::closed_form) {
    const auto& x = h.knots_x();
    const auto& y = h.knots_y();
    size_t n = x.size();
    std::vector<double> mx(n), my(n);
    for (size_t i = 0; i < n; ++i) {
      mx[i] = -y[n - 1 - i];
      my[i] = -x[n - 1 - i];
    }
    // degenerate flat segments would give duplicate knots after mirroring
    std::vector<double> fx, fy;
    for (size_t i = 0; i < n; ++i) {
      if (!fx.empty() && mx[i] <= fx.back() + 1e-14 * (1.0 + std::abs(mx[i]))) continue;
      fx.push_back(mx[i]);
      fy.push_back(my[i]);
    }
    auto mirror_mode = [](TailMode m) {
      switch (m) {
        case TailMode::extend: return TailMode::extend;
        case TailMode::plateau: return TailMode::minus_inf;
        case TailMode::minus_inf: return TailMode::plateau;
      }
      return TailMode::extend;
    };
    // figure out original tail modes from the domain/plateau data
    TailMode left = h.domain_lo() == -kInf ? TailMode::extend : TailMode::minus_inf;
    TailMode right = h.plateau_start() <= h.knots_x().back()
                         ? TailMode::plateau
                         : (h.domain_hi() == kInf ? TailMode::extend : TailMode::minus_inf);
    if (fx.size() < 2) {  // fully flat profile cannot occur for a valid h
      fx = {my.front() - 1.0, my.front()};
      fy = {fx[0], fx[1]};
    }
    return HFunction::piecewise(h.name() + "_bar", fx, fy, mirror_mode(right),
                                mirror_mode(left));
  }
  // generic mirror of a closed-form profile, via the inverse
  double sup = h.sup_value();
  double plateau = h.plateau_start();
  double dlo = h.domain_lo();
  double inf_val;
  {
    double probe = std::max(dlo, -1e12);
    inf_val = h(probe);
    int guard = 0;
    while (!(inf_val > -kInf) && guard++ < 60) {
      probe += std::max(1e-12, 1e-9 * std::abs(probe));
      inf_val = h(probe);
    }
    if (dlo == -kInf) inf_val = -kInf;
  }
  auto hp = std::make_shared<HFunction>(h);
  double mirror_sup = -dlo;
  double mirror_plateau = inf_val == -kInf ? kInf : -inf_val;
  auto fn = [hp, sup, plateau](double z) -> double {
    double target = -z;
    if (target > sup) return -kInf;
    if (target == sup) return plateau < kInf ? -plateau : -kInf;
    double lo_val;
    double probe = std::max(hp->domain_lo(), -1e12);
    lo_val = (*hp)(probe);
    int guard = 0;
    while (!(lo_val > -kInf) && guard++ < 60) {
      probe += std::max(1e-12, 1e-9 * std::abs(probe));
      lo_val = (*hp)(probe);
    }
    if (target <= lo_val) return -probe;
    return -hp->inverse_increasing(target);
  };
  return HFunction::closed_form(h.name() + "_bar", fn, nullptr, -sup, kInf,
                                mirror_sup, mirror_plateau);
}

void LocalDiscrepancy::derive_limits() {
  p1_ = {-h_s_.plateau_start(), -h_s_.domain_lo()};
  p2_ = {-h_bar_s_.plateau_start(), -h_bar_s_.domain_lo()};
}

double LocalDiscrepancy::cs(double m0, double m1) const {
  require(m0 >= 0.0 && m1 >= 0.0, errc::negative_mass,
          "c_S arguments must be nonnegative");
  return c_fn_(m0, m1);
}

LocalDiscrepancy LocalDiscrepancy::from_profile(const std::string& name, HFunction hs) {
  LocalDiscrepancy d;
  d.name_ = name;
  d.h_s_ = std::move(hs);
  d.h_bar_s_ = mirror_profile(d.h_s_);
  auto hp = std::make_shared<HFunction>(d.h_s_);
  d.c_fn_ = [hp](double m0, double m1) -> double {
    // generic conjugate by maximizing the concave z -> -z m0 + h(z) m1
    if (m0 == 0.0 && m1 == 0.0) return 0.0;
    double zlo = std::max(hp->domain_lo(), -1e8);
    double zhi = std::min(hp->plateau_start(), 1e8);
    if (m0 == 0.0 && hp->sup_value() == kInf) return kInf;
    auto neg = [&](double z) {
      double v = (*hp)(z);
      return v == -kInf ? kInf : -(-z * m0 + v * m1);
    };
    double fv;
    double z = golden_min(neg, zlo, zhi, 1e-12, &fv);
    (void)z;
    double best = -fv;
    // domain edges
    for (double ze : {zlo, zhi}) {
      double v = (*hp)(ze);
      if (v > -kInf) best = std::max(best, -ze * m0 + v * m1);
    }
    return std::max(best, 0.0);
  };
  d.derive_limits();
  return d;
}

LocalDiscrepancy LocalDiscrepancy::from_hs_breakpoints(const std::string& name,
                                                       std::vector<double> x,
                                                       std::vector<double> y) {
  LocalDiscrepancy d;
  d.name_ = name;
  d.h_s_ = HFunction::piecewise(name, std::move(x), std::move(y),
                                TailMode::extend, TailMode::extend);
  d.h_s_.validate_static_profile();
  d.h_bar_s_ = mirror_profile(d.h_s_);
  HFunction hs = d.h_s_;
  d.c_fn_ = [hs](double m0, double m1) { return conjugate_pw(hs, m0, m1); };
  d.derive_limits();
  return d;
}

LocalDiscrepancy LocalDiscrepancy::catalog(const std::string& spec) {
  std::string name = spec;
  std::string inner;
  auto lp = spec.find('(');
  if (lp != std::string::npos) {
    require(spec.back() == ')', errc::parse_error, "unbalanced parentheses in '" + spec + "'");
    name = spec.substr(0, lp);
    inner = spec.substr(lp + 1, spec.size() - lp - 2);
  }
  if (name == "js") name = "jensen_shannon";

  LocalDiscrepancy d;
  d.name_ = name;

  if (name == "exact") {
    d.exact_ = true;
    d.symmetric_ = true;
    d.h_s_ = HFunction::closed_form(
        "exact", [](double z) { return z; },
        [](double, int) { return 1.0; }, -kInf, kInf, kInf, kInf);
    d.h_bar_s_ = d.h_s_;
    d.c_fn_ = [](double m0, double m1) { return m0 == m1 ? 0.0 : kInf; };
  } else if (name == "tv") {
    d.symmetric_ = true;
    d.h_s_ = HFunction::piecewise("tv", {-1.0, 1.0}, {-1.0, 1.0},
                                  TailMode::minus_inf, TailMode::plateau);
    d.h_bar_s_ = mirror_profile(d.h_s_);
    d.c_fn_ = [](double m0, double m1) { return std::abs(m1 - m0); };
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
    push(dlo, slo + sa * (dlo - slo));
    push(slo, slo);
    push(shi, shi);
    push(dhi, shi + sb * (dhi - shi));
    require(xs.size() >= 2, errc::invalid_argument, "pwl model is degenerate");
    d.h_s_ = HFunction::piecewise("pwl", xs, ys, TailMode::minus_inf, TailMode::plateau);
    d.h_bar_s_ = mirror_profile(d.h_s_);
    double hi_val = shi + sb * (dhi - shi);
    double lo_val = slo + sa * (dlo - slo);
    d.c_fn_ = [=](double m0, double m1) -> double {
      if (m0 == 0.0) return hi_val * m1;
      if (m1 == 0.0) return -dlo * m0;
      double r = m1 / m0;
      if (r * sb >= 1.0) return hi_val * m1 - dhi * m0;
      if (r >= 1.0) return shi * (m1 - m0);
      if (r * sa >= 1.0) return slo * (m1 - m0);
      return lo_val * m1 - dlo * m0;
    };
  } else if (name == "hellinger") {
    d.symmetric_ = true;
    d.h_s_ = HFunction::closed_form(
        "hellinger",
        [](double z) { return z <= -1.0 ? -kInf : z / (1.0 + z); },
        [](double z, int) { return 1.0 / sqr(1.0 + z); }, -1.0, kInf, 1.0, kInf);
    d.h_bar_s_ = d.h_s_;
    d.c_fn_ = [](double m0, double m1) { return sqr(std::sqrt(m1) - std::sqrt(m0)); };
  } else if (name == "jensen_shannon") {
    d.symmetric_ = true;
    d.h_s_ = HFunction::closed_form(
        "jensen_shannon",
        [](double z) {
          if (z <= -1.0) return -kInf;
          return std::log2(2.0 - std::exp2(-z));
        },
        [](double z, int) {
          double w = std::exp2(-z);
          return w / (2.0 - w);
        },
        -1.0, kInf, 1.0, kInf);
    d.h_bar_s_ = d.h_s_;
    d.c_fn_ = [](double m0, double m1) -> double {
      double total = m0 + m1;
      if (total == 0.0) return 0.0;
      return xlog2x_ratio(m0, total) + xlog2x_ratio(m1, total);
    };
  } else if (name == "chi2") {
    d.symmetric_ = true;
    d.h_s_ = HFunction::closed_form(
        "chi2",
        [](double z) -> double {
          if (z < -1.0) return -kInf;
          if (z > 3.0) return 1.0;
          return 1.0 - sqr(2.0 - std::sqrt(1.0 + z));
        },
        [](double z, int side) -> double {
          if (z < -1.0 || (z == -1.0 && side < 0)) return kInf;
          if (z > 3.0 || (z == 3.0 && side > 0)) return 0.0;
          if (z == -1.0) return kInf;
          return 2.0 / std::sqrt(1.0 + z) - 1.0;
        },
        -1.0, kInf, 1.0, 3.0);
    d.h_bar_s_ = d.h_s_;
    d.c_fn_ = [](double m0, double m1) -> double {
      if (m0 + m1 == 0.0) return 0.0;
      return sqr(m1 - m0) / (m1 + m0);
    };
  } else if (name == "kl0") {
    d.h_s_ = HFunction::closed_form(
        "kl0", [](double z) { return z <= -1.0 ? -kInf : std::log1p(z); },
        [](double z, int) { return 1.0 / (1.0 + z); }, -1.0, kInf, kInf, kInf);
    d.h_bar_s_ = HFunction::closed_form(
        "kl0_bar", [](double z) { return 1.0 - std::exp(-z); },
        [](double z, int) { return std::exp(-z); }, -kInf, kInf, 1.0, kInf);
    d.c_fn_ = [](double m0, double m1) -> double {
      if (m1 == 0.0) return m0;
      if (m0 == 0.0) return kInf;
      return m1 * std::log(m1 / m0) - m1 + m0;
    };
  } else if (name == "kl1") {
    d.h_s_ = HFunction::closed_form(
        "kl1", [](double z) { return 1.0 - std::exp(-z); },
        [](double z, int) { return std::exp(-z); }, -kInf, kInf, 1.0, kInf);
    d.h_bar_s_ = HFunction::closed_form(
        "kl1_bar", [](double z) { return z <= -1.0 ? -kInf : std::log1p(z); },
        [](double z, int) { return 1.0 / (1.0 + z); }, -1.0, kInf, kInf, kInf);
    d.c_fn_ = [](double m0, double m1) -> double {
      if (m0 == 0.0) return m1;
      if (m1 == 0.0) return kInf;
      return m0 * std::log(m0 / m1) - m0 + m1;
    };
  } else if (name == "power") {
    auto a = split_args(inner);
    require(a.size() == 1, errc::invalid_argument, "power needs one parameter p");
    double p = a[0];
    require(p != 0.0 && p != 1.0, errc::invalid_argument, "power requires p not in {0,1}");
    double q = 1.0 - p;
    // literal Table form: h(z) = (1 - (1+(1-p)z)^(p/(p-1)))/p on (1-p)z >= -1
    double dom_lo = -1.0 / q;  // q > 0 for p < 1; p > 1 is rejected by validation
    double e = p / (p - 1.0);
    double supv = p > 0.0 ? 1.0 / p : kInf;
    d.h_s_ = HFunction::closed_form(
        "power", [p, q, e](double z) -> double {
          double base = 1.0 + q * z;
          if (base <= 0.0) return -kInf;
          return (1.0 - std::pow(base, e)) / p;
        },
        [q](double z, int) -> double {
          double base = 1.0 + q * z;
          if (base <= 0.0) return kInf;
          return std::pow(base, -1.0 / q);
        },
        q > 0.0 ? dom_lo : -kInf, q > 0.0 ? kInf : -dom_lo, supv, kInf);
    // mirror: hbar(z) = ((1+pz)^((p-1)/p) - 1)/(p-1) on 1+pz > 0
    double me = (p - 1.0) / p;
    double msup = 1.0 / (1.0 - p);
    double mdlo = p > 0.0 ? -1.0 / p : -kInf;
    double mplateau = p < 0.0 ? -1.0 / p : kInf;
    d.h_bar_s_ = HFunction::closed_form(
        "power_bar", [p, me, msup, mplateau](double z) -> double {
          double base = 1.0 + p * z;
          if (base <= 0.0) return p > 0.0 ? -kInf : msup;
          if (p < 0.0 && z >= mplateau) return msup;
          return (std::pow(base, me) - 1.0) / (p - 1.0);
        },
        [p](double z, int) -> double {
          double base = 1.0 + p * z;
          if (base <= 0.0) return p > 0.0 ? kInf : 0.0;
          return std::pow(base, -1.0 / p);
        },
        mdlo, kInf, msup, mplateau);
    d.c_fn_ = [p, q, supv](double m0, double m1) -> double {
      if (m0 == 0.0 && m1 == 0.0) return 0.0;
      if (m0 == 0.0) return supv == kInf ? kInf : supv * m1;
      if (m1 == 0.0) return m0 / q;
      double r = m1 / m0;
      return m0 * (std::pow(r, q) - q * (r - 1.0) - 1.0) / (q * (q - 1.0));
    };
  } else if (name == "custom_pwl") {
    std::vector<double> xs, ys;
    std::stringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      auto colon = tok.find(':');
      require(colon != std::string::npos, errc::parse_error,
              "custom_pwl points must be x:y pairs");
      xs.push_back(std::stod(tok.substr(0, colon)));
      ys.push_back(std::stod(tok.substr(colon + 1)));
    }
    return from_hs_breakpoints("custom_pwl", std::move(xs), std::move(ys));
  } else {
    fail(errc::unknown_name, "no catalog entry named '" + name + "'");
  }

  d.h_s_.validate_static_profile();
  d.derive_limits();
  return d;
}

namespace {
// range cap for boundary samples; extreme-ratio tangents enter through the
// instance-adapted refinement, not the base pool, so LP coefficients stay sane
constexpr double kSupportCap = 1e4;
}  // namespace

double LocalDiscrepancy::capped_left_end() const {
  double zlo = std::max(h_s_.domain_lo(), -kSupportCap);
  // nudge inside an open or infinite-valued left end
  int guard = 0;
  while (!(h_s_(zlo) > -kInf) && guard++ < 200)
    zlo += std::max(1e-9, 1e-9 * std::abs(zlo));
  if (h_s_(zlo) < -kSupportCap)
    zlo = bisect([&](double z) { return h_s_(z) + kSupportCap; }, zlo, 0.0, 1e-14);
  return zlo;
}

std::vector<SupportPoint> LocalDiscrepancy::supporting_points(int k) const {
  require(k >= 3, errc::invalid_argument, "supporting_points needs k >= 3");
  double zlo = capped_left_end();
  double zhi = std::min(h_s_.plateau_start(), kSupportCap);

  std::vector<double> zs = {0.0, zlo, zhi};
  int extra = k - 3;
  if (extra > 0) {
    // slope-targeted boundary samples; the density around moderate mass
    // ratios carries the approximation quality
    auto gs = linspace(std::log(1e-3), std::log(1e3), extra);
    for (double lg : gs) zs.push_back(support_at_slope(std::exp(lg)).alpha * -1.0);
  }
  std::sort(zs.begin(), zs.end());
  std::vector<double> uniq;
  for (double z : zs) {
    if (!uniq.empty() && std::abs(z - uniq.back()) <= 1e-11 * (1.0 + std::abs(z))) continue;
    uniq.push_back(z);
  }
  // pad with midpoints of the largest gaps
  while (static_cast<int>(uniq.size()) < k) {
    size_t gi = 0;
    double gap = -1.0;
    for (size_t i = 0; i + 1 < uniq.size(); ++i)
      if (uniq[i + 1] - uniq[i] > gap) {
        gap = uniq[i + 1] - uniq[i];
        gi = i;
      }
    if (gap <= 1e-10) break;
    uniq.insert(uniq.begin() + gi + 1, 0.5 * (uniq[gi] + uniq[gi + 1]));
  }
  // trim smallest-gap interior points if oversized
  while (static_cast<int>(uniq.size()) > k) {
    size_t worst = 1;
    double gap = kInf;
    for (size_t i = 1; i + 1 < uniq.size(); ++i) {
      if (uniq[i] == 0.0) continue;
      double g = std::min(uniq[i] - uniq[i - 1], uniq[i + 1] - uniq[i]);
      if (g < gap) {
        gap = g;
        worst = i;
      }
    }
    uniq.erase(uniq.begin() + worst);
  }
  std::vector<SupportPoint> pts;
  pts.reserve(uniq.size());
  for (auto it = uniq.rbegin(); it != uniq.rend(); ++it) {
    double z = *it;
    double beta = z == 0.0 ? 0.0 : h_s_(z);
    if (!(beta > -kInf)) continue;
    pts.push_back({-z, beta});
  }
  return pts;
}

SupportPoint LocalDiscrepancy::support_at_slope(double g) const {
  double zlo = capped_left_end();
  double zhi = std::min(h_s_.plateau_start(), kSupportCap);
  auto f = [&](double z) { return h_s_.deriv(z, +1) - g; };
  double z;
  if (f(zlo) <= 0.0)
    z = zlo;
  else if (f(zhi) >= 0.0)
    z = zhi;
  else
    z = bisect(f, zlo, zhi, 1e-13);
  return {-z, z == 0.0 ? 0.0 : h_s_(z)};
}

double LocalDiscrepancy::d2_cs1(double gamma, int side) const {
  require(gamma >= 0.0, errc::negative_mass, "tangent point must be nonnegative");
  double h = 1e-6 * std::max(1.0, gamma);
  if (side < 0) {
    if (gamma <= 4.0 * h) {
      // too close to zero for a left stencil
      side = +1;
    } else {
      h = std::min(h, gamma / 4.0);
    }
  }
  auto f = [&](double t) { return c_fn_(1.0, t); };
  return one_sided_derivative(f, gamma, side, h);
}

}  // namespace ubw1
