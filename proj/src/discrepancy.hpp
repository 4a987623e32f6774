#pragma once

// Local mass-change discrepancies c_S together with their dual profiles
// h_S / h_bar_S, the built-in catalog, and supporting points of the dual
// constraint set B_S = { (alpha, beta) : beta <= h_S(-alpha) }.

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hfunction.hpp"

namespace ubw1 {

struct SupportPoint {
  double alpha;
  double beta;
};

class LocalDiscrepancy {
 public:
  // Parse a catalog spec: exact | tv | pwl(dlo,slo,a,shi,dhi,b) | hellinger |
  // jensen_shannon (alias js) | chi2 | kl0 | kl1 | power(p) |
  // custom_pwl(x0:y0,x1:y1,...)
  static LocalDiscrepancy catalog(const std::string& spec);

  // Custom model from a piecewise-linear h_S (breakpoints strictly
  // increasing); the end segments extend linearly.
  static LocalDiscrepancy from_hs_breakpoints(const std::string& name,
                                              std::vector<double> x,
                                              std::vector<double> y);

  // Model backed by an arbitrary profile (used for flow-derived h_S).
  static LocalDiscrepancy from_profile(const std::string& name, HFunction hs);

  const std::string& name() const { return name_; }
  const HFunction& h_s() const { return h_s_; }
  const HFunction& h_bar_s() const { return h_bar_s_; }
  bool is_exact() const { return exact_; }
  bool symmetric() const { return symmetric_; }

  // c_S(m0, m1); throws NegativeMass for negative arguments. +inf allowed.
  double cs(double m0, double m1) const;

  double hs(double z) const { return h_s_(z); }
  double hbar(double z) const { return h_bar_s_(z); }

  // One-sided derivative limits of the partial derivatives:
  // partial1 = (lim_{a->0} d1 c_S(a,1), lim_{a->inf} d1 c_S(a,1)),
  // partial2 analogously for d2 c_S(1,.).
  std::pair<double, double> partial1_limits() const { return p1_; }
  std::pair<double, double> partial2_limits() const { return p2_; }

  // k >= 3 points on the boundary beta = h_S(-alpha), ordered by alpha,
  // containing (0,0), spanning the domain.
  std::vector<SupportPoint> supporting_points(int k) const;

  // Boundary point whose supergradient matches mass ratio m0/m1 = g (the
  // tangency point used for instance-adapted cuts).
  SupportPoint support_at_slope(double g) const;

  // One-sided derivative of z -> c_S(1, z) (the Dirac-lab tangent slope).
  double d2_cs1(double gamma, int side) const;

 private:
  std::string name_;
  HFunction h_s_, h_bar_s_;
  std::function<double(double, double)> c_fn_;  // nonnegative args
  std::pair<double, double> p1_{-kInf, kInf}, p2_{-kInf, kInf};
  bool exact_ = false;
  bool symmetric_ = false;

  void derive_limits();
  double capped_left_end() const;
  static HFunction mirror_profile(const HFunction& h);
};

}  // namespace ubw1
