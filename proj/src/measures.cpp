#include "measures.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "lp.hpp"

namespace ubw1 {

std::shared_ptr<const MetricSpace> MetricSpace::euclidean(
    std::vector<std::vector<double>> points) {
  require(!points.empty(), errc::empty_space, "metric space has no points");
  size_t dim = points[0].size();
  require(dim >= 1, errc::invalid_argument, "points need dimension >= 1");
  for (const auto& p : points)
    require(p.size() == dim, errc::invalid_argument, "inconsistent point dimensions");
  auto sp = std::shared_ptr<MetricSpace>(new MetricSpace());
  size_t n = points.size();
  sp->dist_.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < dim; ++k) s += sqr(points[i][k] - points[j][k]);
      sp->dist_[i][j] = sp->dist_[j][i] = std::sqrt(s);
    }
  sp->points_ = std::move(points);
  sp->euclidean_ = true;
  return sp;
}

std::shared_ptr<const MetricSpace> MetricSpace::explicit_matrix(
    std::vector<std::vector<double>> points,
    std::vector<std::vector<double>> matrix) {
  size_t n = matrix.size();
  require(n >= 1, errc::empty_space, "metric space has no points");
  if (points.empty()) {
    // synthetic 1-d labels so the space always carries coordinates
    points.assign(n, std::vector<double>(1, 0.0));
    for (size_t i = 0; i < n; ++i) points[i][0] = static_cast<double>(i);
  }
  require(points.size() == n, errc::invalid_argument,
          "distance matrix size must match point count");
  const double tol = 1e-12;
  for (size_t i = 0; i < n; ++i) {
    require(matrix[i].size() == n, errc::invalid_argument, "distance matrix not square");
    require(std::abs(matrix[i][i]) <= tol, errc::invalid_argument,
            "distance matrix diagonal must vanish");
    for (size_t j = 0; j < n; ++j) {
      require(matrix[i][j] >= -tol, errc::invalid_argument, "distances must be nonnegative");
      require(std::abs(matrix[i][j] - matrix[j][i]) <= tol, errc::invalid_argument,
              "distance matrix must be symmetric");
    }
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k)
        require(matrix[i][j] <= matrix[i][k] + matrix[k][j] + tol,
                errc::invalid_argument, "triangle inequality violated");
  auto sp = std::shared_ptr<MetricSpace>(new MetricSpace());
  sp->points_ = std::move(points);
  sp->dist_ = std::move(matrix);
  sp->euclidean_ = false;
  return sp;
}

bool MetricSpace::same_as(const MetricSpace& o, double tol) const {
  if (this == &o) return true;
  if (size() != o.size()) return false;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      if (std::abs(dist_[i][j] - o.dist_[i][j]) > tol) return false;
  return true;
}

DiscreteMeasure::DiscreteMeasure(SpacePtr s, std::vector<double> w)
    : space(std::move(s)), weights(std::move(w)) {
  require(space != nullptr, errc::invalid_argument, "measure needs a space");
  require(static_cast<int>(weights.size()) == space->size(), errc::invalid_argument,
          "weight count must match point count");
  for (double v : weights)
    require(v >= 0.0 && is_finite(v), errc::negative_mass,
            "measure weights must be nonnegative and finite");
}

double DiscreteMeasure::mass() const {
  double s = 0.0;
  for (double v : weights) s += v;
  return s;
}

Coupling::Coupling(SpacePtr s, std::vector<std::vector<double>> mat)
    : space(std::move(s)), m(std::move(mat)) {
  require(space != nullptr, errc::invalid_argument, "coupling needs a space");
  size_t n = space->size();
  require(m.size() == n, errc::invalid_argument, "coupling size mismatch");
  for (const auto& row : m) {
    require(row.size() == n, errc::invalid_argument, "coupling must be square");
    for (double v : row)
      require(v >= -1e-12, errc::negative_mass, "coupling entries must be nonnegative");
  }
}

Coupling Coupling::zeros(SpacePtr s) {
  size_t n = s->size();
  return Coupling(std::move(s), std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
}

Coupling Coupling::diagonal(const DiscreteMeasure& rho) {
  Coupling c = zeros(rho.space);
  for (int i = 0; i < rho.size(); ++i) c.m[i][i] = rho.weights[i];
  return c;
}

DiscreteMeasure Coupling::first_marginal() const {
  std::vector<double> w(space->size(), 0.0);
  for (int i = 0; i < space->size(); ++i)
    for (int j = 0; j < space->size(); ++j) w[i] += m[i][j];
  for (double& v : w) v = std::max(v, 0.0);
  return DiscreteMeasure(space, w);
}

DiscreteMeasure Coupling::second_marginal() const {
  std::vector<double> w(space->size(), 0.0);
  for (int i = 0; i < space->size(); ++i)
    for (int j = 0; j < space->size(); ++j) w[j] += m[i][j];
  for (double& v : w) v = std::max(v, 0.0);
  return DiscreteMeasure(space, w);
}

double Coupling::transport_cost() const {
  double s = 0.0;
  for (int i = 0; i < space->size(); ++i)
    for (int j = 0; j < space->size(); ++j) s += space->d(i, j) * m[i][j];
  return s;
}

double Coupling::total() const {
  double s = 0.0;
  for (const auto& row : m)
    for (double v : row) s += v;
  return s;
}

std::pair<DiscreteMeasure, DiscreteMeasure> marginals(const Coupling& pi) {
  return {pi.first_marginal(), pi.second_marginal()};
}

W1Result w1_distance(const DiscreteMeasure& rho0, const DiscreteMeasure& rho1) {
  require(rho0.space && rho1.space && rho0.space->same_as(*rho1.space),
          errc::space_mismatch, "W1 requires measures on the same space");
  const int n = rho0.size();
  require(n >= 1, errc::empty_space, "W1 on an empty space");
  double m0 = rho0.mass(), m1 = rho1.mass();
  require(std::abs(m0 - m1) <= 1e-9 * std::max(1.0, m0), errc::mass_mismatch,
          "W1 requires equal total masses");

  LinearProgram lp(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lp.c[i * n + j] = rho0.space->d(i, j);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(n * n, 0.0);
    for (int j = 0; j < n; ++j) row[i * n + j] = 1.0;
    lp.add_row(std::move(row), Sense::eq, rho0.weights[i]);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> row(n * n, 0.0);
    for (int i = 0; i < n; ++i) row[i * n + j] = 1.0;
    lp.add_row(std::move(row), Sense::eq, rho1.weights[j]);
  }
  LpResult r = lp_solve(lp);
  require(r.status == LpStatus::optimal, errc::internal,
          "balanced transport LP failed to solve");
  Coupling plan = Coupling::zeros(rho0.space);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) plan.m[i][j] = std::max(0.0, r.x[i * n + j]);
  W1Result out{r.objective, std::move(plan), {}, {}};
  out.u.assign(r.duals.begin(), r.duals.begin() + n);
  out.v.assign(r.duals.begin() + n, r.duals.begin() + 2 * n);
  // tighten into exact c-transforms (1-Lipschitz, preserves the objective)
  for (int x = 0; x < n; ++x) {
    double best = kInf;
    for (int y = 0; y < n; ++y) best = std::min(best, rho0.space->d(x, y) - out.v[y]);
    out.u[x] = best;
  }
  for (int y = 0; y < n; ++y) {
    double best = kInf;
    for (int x = 0; x < n; ++x) best = std::min(best, rho0.space->d(x, y) - out.u[x]);
    out.v[y] = best;
  }
  return out;
}

}  // namespace ubw1
