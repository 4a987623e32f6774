#pragma once

// Carrier for concave monotone scalar profiles: the static profiles h_S and
// h_bar_S, the dynamic profile h_D, and reconstructed q-profiles all live in
// this type. Values of -inf encode points outside the effective domain.

#include <functional>
#include <string>
#include <vector>

#include "numeric.hpp"

namespace ubw1 {

enum class HKind { closed_form, piecewise_linear, sampled };

// Behavior beyond the last / before the first breakpoint of a piecewise
// representation.
enum class TailMode { extend, plateau, minus_inf };

class HFunction {
 public:
  HFunction() = default;

  // Closed-form profile backed by callables. deriv may be null (finite
  // differences are used). plateau_start is the smallest z with f(z) = sup f
  // (+inf when the sup is never attained).
  static HFunction closed_form(std::string name,
                               std::function<double(double)> f,
                               std::function<double(double, int)> deriv,
                               double dom_lo, double dom_hi,
                               double sup_value, double plateau_start);

  // Piecewise-linear profile through (x_k, y_k), x strictly increasing.
  static HFunction piecewise(std::string name, std::vector<double> x,
                             std::vector<double> y, TailMode left,
                             TailMode right);

  // Densely sampled profile, interpolated linearly (a concave monotone
  // function is approximated from below by its chords).
  static HFunction sampled(std::string name, std::vector<double> x,
                           std::vector<double> y, TailMode left, TailMode right);

  double operator()(double z) const;
  // One-sided derivative, side = -1 left, +1 right.
  double deriv(double z, int side) const;

  double domain_lo() const { return dom_lo_; }
  double domain_hi() const { return dom_hi_; }
  double sup_value() const { return sup_; }
  double plateau_start() const { return plateau_start_; }
  HKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  // Inverse on the strictly increasing part (values in (inf f, sup f)).
  double inverse_increasing(double y) const;

  const std::vector<double>& knots_x() const { return px_; }
  const std::vector<double>& knots_y() const { return py_; }

  // Invariant checks; throw ubw1::error(invalid_argument) on failure.
  // Static profile: concave, nondecreasing, f(0)=0, f(z)<=z, f'(0)=1.
  void validate_static_profile() const;
  // Dynamic profile: concave, nonpositive, f(0)=0, unimodal around 0.
  void validate_dynamic_profile() const;

 private:
  std::string name_;
  HKind kind_ = HKind::closed_form;
  std::function<double(double)> f_;
  std::function<double(double, int)> dfn_;
  std::vector<double> px_, py_;  // piecewise / sampled data
  TailMode left_ = TailMode::minus_inf, right_ = TailMode::plateau;
  double dom_lo_ = -kInf, dom_hi_ = kInf;
  double sup_ = kInf, plateau_start_ = kInf;

  double piecewise_eval(double z) const;
  double piecewise_deriv(double z, int side) const;
  void finish_piecewise();
  std::vector<double> validation_grid() const;
};

}  // namespace ubw1
