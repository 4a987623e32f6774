#pragma once

// Scalar numeric utilities shared across modules: extended reals with
// convex-analysis conventions, bracketing searches, and adaptive quadrature.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "error.hpp"

namespace ubw1 {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline bool is_finite(double x) { return std::isfinite(x); }

// 0 * inf = 0, the 1-homogeneous extension convention.
inline double mul0(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

inline double sqr(double x) { return x * x; }

std::vector<double> linspace(double a, double b, int n);

// Root of a continuous monotone (or at least sign-changing) function on [lo, hi].
// Plain bisection; f(lo) and f(hi) must have opposite signs (zero allowed).
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol = 1e-13, int max_iter = 200);

// Minimum of a unimodal function on [lo, hi] by golden-section search.
// Returns argmin; assigns the value if fval != nullptr.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol = 1e-11, double* fval = nullptr);

// Adaptive Gauss-Kronrod style quadrature (7-15 pair) of f over [a, b].
// abs_tol is the absolute tolerance; panels caps the subdivision count.
// If the budget is exceeded the best estimate is returned and *accurate is
// set to false when provided.
double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-10, int max_panels = 1 << 16,
                     bool* accurate = nullptr);

// One-sided derivative by 3-point forward/backward differences with one
// Richardson step (step h, side +1 right / -1 left).
double one_sided_derivative(const std::function<double(double)>& f, double x,
                            int side, double h = 1e-6);

// Parse "a:b:n" into n equally spaced values from a to b inclusive.
std::vector<double> parse_range(const std::string& text);

struct Xoshiro {
  // splitmix-seeded xoshiro256**; deterministic across platforms.
  unsigned long long s[4];
  explicit Xoshiro(unsigned long long seed);
  unsigned long long next_u64();
  double next_unit();  // [0,1)
  double uniform(double a, double b) { return a + (b - a) * next_unit(); }
  int next_int(int n);  // [0,n)
};

}  // namespace ubw1
