#pragma once

// Finite metric spaces, discrete measures, couplings, and exact W1.

#include <memory>
#include <vector>

#include "numeric.hpp"

namespace ubw1 {

class MetricSpace {
 public:
  // Euclidean distances between the given coordinate rows.
  static std::shared_ptr<const MetricSpace> euclidean(
      std::vector<std::vector<double>> points);
  // Explicit distance matrix; validated (symmetry, zero diagonal, triangle
  // inequality, tolerance 1e-12).
  static std::shared_ptr<const MetricSpace> explicit_matrix(
      std::vector<std::vector<double>> points,
      std::vector<std::vector<double>> matrix);

  int size() const { return static_cast<int>(dist_.size()); }
  double d(int i, int j) const { return dist_[i][j]; }
  bool euclidean_mode() const { return euclidean_; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<std::vector<double>>& matrix() const { return dist_; }

  bool same_as(const MetricSpace& o, double tol = 1e-12) const;

 private:
  MetricSpace() = default;
  std::vector<std::vector<double>> points_;
  std::vector<std::vector<double>> dist_;
  bool euclidean_ = true;
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

struct DiscreteMeasure {
  SpacePtr space;
  std::vector<double> weights;

  DiscreteMeasure() = default;
  DiscreteMeasure(SpacePtr s, std::vector<double> w);
  double mass() const;
  int size() const { return static_cast<int>(weights.size()); }
};

struct Coupling {
  SpacePtr space;
  std::vector<std::vector<double>> m;  // m[i][j] >= 0, source i -> target j

  Coupling() = default;
  Coupling(SpacePtr s, std::vector<std::vector<double>> mat);
  static Coupling zeros(SpacePtr s);
  static Coupling diagonal(const DiscreteMeasure& rho);

  DiscreteMeasure first_marginal() const;   // row sums
  DiscreteMeasure second_marginal() const;  // column sums
  double transport_cost() const;            // sum d(i,j) m[i][j]
  double total() const;
};

std::pair<DiscreteMeasure, DiscreteMeasure> marginals(const Coupling& pi);

struct W1Result {
  double value;
  Coupling plan;
  std::vector<double> u, v;  // Kantorovich potentials, u(x)+v(y) <= d(x,y)
};

// Exact balanced W1 via the LP core on the full bipartite formulation.
W1Result w1_distance(const DiscreteMeasure& rho0, const DiscreteMeasure& rho1);

}  // namespace ubw1
