#include "hfunction.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace ubw1 {

HFunction HFunction::closed_form(std::string name, std::function<double(double)> f,
                                 std::function<double(double, int)> deriv,
                                 double dom_lo, double dom_hi, double sup_value,
                                 double plateau_start) {
  HFunction h;
  h.name_ = std::move(name);
  h.kind_ = HKind::closed_form;
  h.f_ = std::move(f);
  h.dfn_ = std::move(deriv);
  h.dom_lo_ = dom_lo;
  h.dom_hi_ = dom_hi;
  h.sup_ = sup_value;
  h.plateau_start_ = plateau_start;
  return h;
}

HFunction HFunction::piecewise(std::string name, std::vector<double> x,
                               std::vector<double> y, TailMode left, TailMode right) {
  require(x.size() == y.size() && x.size() >= 2, errc::invalid_argument,
          "piecewise profile needs >= 2 breakpoints with matching values");
  for (size_t i = 1; i < x.size(); ++i)
    require(x[i] > x[i - 1], errc::invalid_argument,
            "piecewise breakpoints must be strictly increasing");
  HFunction h;
  h.name_ = std::move(name);
  h.kind_ = HKind::piecewise_linear;
  h.px_ = std::move(x);
  h.py_ = std::move(y);
  h.left_ = left;
  h.right_ = right;
  h.finish_piecewise();
  return h;
}

HFunction HFunction::sampled(std::string name, std::vector<double> x,
                             std::vector<double> y, TailMode left, TailMode right) {
  HFunction h = piecewise(std::move(name), std::move(x), std::move(y), left, right);
  h.kind_ = HKind::sampled;
  return h;
}

void HFunction::finish_piecewise() {
  dom_lo_ = left_ == TailMode::extend ? -kInf : px_.front();
  dom_hi_ = right_ == TailMode::minus_inf ? px_.back() : kInf;
  // sup and plateau start
  if (right_ == TailMode::extend) {
    double slope = (py_.back() - py_[py_.size() - 2]) / (px_.back() - px_[px_.size() - 2]);
    if (slope > 0) {
      sup_ = kInf;
      plateau_start_ = kInf;
    } else {
      sup_ = py_.back();
      plateau_start_ = px_.back();
    }
  } else {
    sup_ = *std::max_element(py_.begin(), py_.end());
    plateau_start_ = kInf;
    for (size_t i = 0; i < px_.size(); ++i)
      if (py_[i] >= sup_) {
        plateau_start_ = px_[i];
        break;
      }
    if (right_ == TailMode::minus_inf && plateau_start_ >= px_.back())
      plateau_start_ = px_.back();
  }
}

double HFunction::piecewise_eval(double z) const {
  if (z < px_.front()) {
    switch (left_) {
      case TailMode::extend: {
        double slope = (py_[1] - py_[0]) / (px_[1] - px_[0]);
        return py_[0] + slope * (z - px_[0]);
      }
      case TailMode::plateau: return py_.front();
      case TailMode::minus_inf: return -kInf;
    }
  }
  if (z > px_.back()) {
    switch (right_) {
      case TailMode::extend: {
        size_t n = px_.size();
        double slope = (py_[n - 1] - py_[n - 2]) / (px_[n - 1] - px_[n - 2]);
        return py_[n - 1] + slope * (z - px_[n - 1]);
      }
      case TailMode::plateau: return py_.back();
      case TailMode::minus_inf: return -kInf;
    }
  }
  auto it = std::upper_bound(px_.begin(), px_.end(), z);
  size_t i = it == px_.begin() ? 0 : static_cast<size_t>(it - px_.begin()) - 1;
  if (i + 1 >= px_.size()) return py_.back();
  double t = (z - px_[i]) / (px_[i + 1] - px_[i]);
  return py_[i] + t * (py_[i + 1] - py_[i]);
}

double HFunction::piecewise_deriv(double z, int side) const {
  auto seg_slope = [&](size_t i) {
    return (py_[i + 1] - py_[i]) / (px_[i + 1] - px_[i]);
  };
  size_t n = px_.size();
  if (z < px_.front() || (z == px_.front() && side < 0)) {
    if (left_ == TailMode::extend) return seg_slope(0);
    if (left_ == TailMode::plateau) return 0.0;
    return kInf;  // -inf region: treat the rise into the domain as +inf slope
  }
  if (z > px_.back() || (z == px_.back() && side > 0)) {
    if (right_ == TailMode::extend) return seg_slope(n - 2);
    return 0.0;  // plateau or the usc cap at the last knot
  }
  auto it = std::lower_bound(px_.begin(), px_.end(), z);
  size_t i = static_cast<size_t>(it - px_.begin());
  bool at_knot = (i < n && px_[i] == z);
  if (at_knot) {
    if (side < 0) return i == 0 ? piecewise_deriv(z - 1.0, -1) : seg_slope(i - 1);
    return i + 1 < n ? seg_slope(i) : piecewise_deriv(z + 1.0, +1);
  }
  return seg_slope(i - 1);
}

double HFunction::operator()(double z) const {
  if (kind_ == HKind::closed_form) {
    if (z < dom_lo_ || z > dom_hi_) return -kInf;
    return f_(z);
  }
  return piecewise_eval(z);
}

double HFunction::deriv(double z, int side) const {
  if (kind_ != HKind::closed_form) return piecewise_deriv(z, side);
  if (dfn_) return dfn_(z, side);
  double h = 1e-6 * std::max(1.0, std::abs(z));
  // keep the stencil inside the domain
  if (side > 0 && z + 2.5 * h > dom_hi_) h = std::max(1e-12, (dom_hi_ - z) / 3.0);
  if (side < 0 && z - 2.5 * h < dom_lo_) h = std::max(1e-12, (z - dom_lo_) / 3.0);
  return one_sided_derivative([this](double u) { return (*this)(u); }, z, side, h);
}

double HFunction::inverse_increasing(double y) const {
  double lo = std::max(dom_lo_, -1e12), hi = std::min(plateau_start_, 1e12);
  // nudge an open left endpoint inward
  if (!((*this)(lo) > -kInf)) lo = std::nextafter(lo, hi);
  double flo = (*this)(lo);
  int guard = 0;
  while (!(flo > -kInf) && guard++ < 200) {
    lo += std::max(1e-12, 1e-12 * std::abs(lo));
    flo = (*this)(lo);
  }
  require(flo > -kInf, errc::internal, "inverse_increasing: empty domain");
  if (y <= flo) return lo;
  double fhi = (*this)(hi);
  require(y <= fhi + 1e-12 * std::max(1.0, std::abs(fhi)), errc::out_of_range,
          "inverse_increasing: value above the profile's range");
  if (y >= fhi) return hi;
  return bisect([&](double z) { return (*this)(z) - y; }, lo, hi, 1e-14);
}

std::vector<double> HFunction::validation_grid() const {
  double lo = std::max(dom_lo_, -16.0), hi = std::min(dom_hi_, 16.0);
  double pad = 1e-7 * std::max(1.0, std::abs(lo) + std::abs(hi));
  lo += pad;
  hi -= pad;
  return linspace(lo, hi, 512);
}

void HFunction::validate_static_profile() const {
  auto grid = validation_grid();
  const double tol = 1e-10;
  double prev = -kInf;
  for (size_t i = 0; i < grid.size(); ++i) {
    double v = (*this)(grid[i]);
    require(v <= grid[i] + tol, errc::invalid_argument,
            name_ + ": profile must satisfy h(z) <= z");
    require(v >= prev - tol * std::max(1.0, std::abs(v)), errc::invalid_argument,
            name_ + ": profile must be nondecreasing");
    prev = v;
    if (i >= 2) {
      double a = (*this)(grid[i - 2]), b = (*this)(grid[i - 1]);
      if (is_finite(a) && is_finite(v))
        require(b >= 0.5 * (a + v) - tol * std::max(1.0, std::abs(b)),
                errc::invalid_argument, name_ + ": profile must be concave");
    }
  }
  require(std::abs((*this)(0.0)) <= 1e-12, errc::invalid_argument,
          name_ + ": profile must vanish at 0");
  // symmetric difference quotient at 0 -> 1
  double s3 = kNaN, s4 = kNaN, s5 = kNaN;
  auto sym = [&](double h) { return ((*this)(h) - (*this)(-h)) / (2.0 * h); };
  if (dom_lo_ < -1e-3) s3 = sym(1e-3);
  if (dom_lo_ < -1e-4) s4 = sym(1e-4);
  if (dom_lo_ < -1e-5) s5 = sym(1e-5);
  if (is_finite(s4) && is_finite(s5)) {
    double extrap = s5 + (s5 - s4) / 9.0;  // h^2 Richardson
    if (is_finite(s3)) extrap = s5 + (s5 - s4) / 9.0;
    require(std::abs(extrap - 1.0) <= 1e-3, errc::invalid_argument,
            name_ + ": profile slope at 0 must be 1");
  }
}

void HFunction::validate_dynamic_profile() const {
  auto grid = validation_grid();
  const double tol = 1e-10;
  require(std::abs((*this)(0.0)) <= 1e-12, errc::invalid_argument,
          name_ + ": dynamic profile must vanish at 0");
  for (size_t i = 0; i < grid.size(); ++i) {
    double v = (*this)(grid[i]);
    require(v <= tol, errc::invalid_argument,
            name_ + ": dynamic profile must be nonpositive");
    if (i >= 2) {
      double a = (*this)(grid[i - 2]), b = (*this)(grid[i - 1]);
      if (is_finite(a) && is_finite(v))
        require(b >= 0.5 * (a + v) - tol * std::max(1.0, std::abs(b)),
                errc::invalid_argument, name_ + ": dynamic profile must be concave");
    }
  }
  // unimodal around 0: nondecreasing left of 0, nonincreasing right of 0
  double prev = -kInf;
  for (double z : grid) {
    if (z > 0.0) break;
    double v = (*this)(z);
    require(v >= prev - tol, errc::invalid_argument,
            name_ + ": dynamic profile must be nondecreasing on (-inf,0]");
    prev = v;
  }
  prev = kInf;
  for (double z : grid) {
    if (z < 0.0) continue;
    double v = (*this)(z);
    require(v <= prev + tol, errc::invalid_argument,
            name_ + ": dynamic profile must be nonincreasing on [0,inf)");
    if (is_finite(v)) prev = v;
  }
}

}  // namespace ubw1
