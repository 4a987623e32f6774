#include "numeric.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ubw1 {

std::vector<double> linspace(double a, double b, int n) {
  require(n >= 1, errc::invalid_argument, "linspace needs n >= 1");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  out.back() = b;
  return out;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  require(std::signbit(flo) != std::signbit(fhi), errc::invalid_argument,
          "bisect: endpoints do not bracket a root");
  for (int it = 0; it < max_iter; ++it) {
    double mid = 0.5 * (lo + hi);
    if (hi - lo <= xtol * std::max(1.0, std::abs(mid))) return mid;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol, double* fval) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 400 && (b - a) > xtol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  if (fval) *fval = f(xm);
  return xm;
}

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
  double kronrod;
  double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) resk += kWgk[i] * (fv[i] + fv[14 - i]);
  for (int i = 0; i < 3; ++i) resg += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  resk *= h;
  resg *= h;
  return {resk, std::abs(resk - resg)};
}

}  // namespace

double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_panels, bool* accurate) {
  if (accurate) *accurate = true;
  if (a == b) return 0.0;
  struct Seg {
    double a, b, val, err;
  };
  PanelResult first = gk15(f, a, b);
  std::vector<Seg> heap{{a, b, first.kronrod, first.err}};
  int panels = 1;
  double total_err = first.err, total_val = first.kronrod;
  while (total_err > abs_tol && panels < max_panels) {
    // split the worst segment
    size_t worst = 0;
    for (size_t i = 1; i < heap.size(); ++i)
      if (heap[i].err > heap[worst].err) worst = i;
    Seg seg = heap[worst];
    if (seg.b - seg.a < 1e-15 * std::max(1.0, std::abs(seg.a))) break;
    double mid = 0.5 * (seg.a + seg.b);
    PanelResult l = gk15(f, seg.a, mid), r = gk15(f, mid, seg.b);
    total_val += l.kronrod + r.kronrod - seg.val;
    total_err += l.err + r.err - seg.err;
    heap[worst] = {seg.a, mid, l.kronrod, l.err};
    heap.push_back({mid, seg.b, r.kronrod, r.err});
    ++panels;
  }
  if (total_err > abs_tol && accurate) *accurate = false;
  return total_val;
}

double one_sided_derivative(const std::function<double(double)>& f, double x,
                            int side, double h) {
  double s = side >= 0 ? 1.0 : -1.0;
  auto fd3 = [&](double step) {
    // 3-point one-sided difference, O(step^2)
    double f0 = f(x), f1 = f(x + s * step), f2 = f(x + 2.0 * s * step);
    return s * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * step);
  };
  double d1 = fd3(h), d2 = fd3(h / 2.0);
  return d2 + (d2 - d1) / 3.0;  // one Richardson step
}

std::vector<double> parse_range(const std::string& text) {
  double a, b;
  int n;
  char c1, c2;
  std::istringstream in(text);
  if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
    fail(errc::parse_error, "range must be a:b:n with n >= 1, got '" + text + "'");
  return linspace(a, b, n);
}

Xoshiro::Xoshiro(unsigned long long seed) {
  // splitmix64 expansion
  unsigned long long x = seed;
  for (int i = 0; i < 4; ++i) {
    x += 0x9e3779b97f4a7c15ULL;
    unsigned long long z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    s[i] = z ^ (z >> 31);
  }
}

static inline unsigned long long rotl64(unsigned long long v, int k) {
  return (v << k) | (v >> (64 - k));
}

unsigned long long Xoshiro::next_u64() {
  unsigned long long result = rotl64(s[1] * 5, 7) * 9;
  unsigned long long t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl64(s[3], 45);
  return result;
}

double Xoshiro::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Xoshiro::next_int(int n) {
  return static_cast<int>(next_unit() * n) % n;
}

const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::unknown_name: return "UnknownName";
    case errc::negative_mass: return "NegativeMass";
    case errc::mass_mismatch: return "MassMismatch";
    case errc::empty_space: return "EmptySpace";
    case errc::space_mismatch: return "SpaceMismatch";
    case errc::infeasible_model: return "InfeasibleModel";
    case errc::infeasible_change: return "InfeasibleChange";
    case errc::infeasible_pair: return "InfeasiblePair";
    case errc::model_mismatch: return "ModelMismatch";
    case errc::non_convergence: return "NonConvergence";
    case errc::degenerate_slope: return "DegenerateSlope";
    case errc::cycle_guard: return "CycleGuardExceeded";
    case errc::not_optimal: return "NotOptimalInput";
    case errc::out_of_range: return "OutOfRange";
    case errc::inconclusive: return "Inconclusive";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IoError";
    case errc::internal: return "InternalError";
  }
  return "UnknownError";
}

}  // namespace ubw1
