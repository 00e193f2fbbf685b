#pragma once

#include <memory>
#include <vector>

#include "lgo/grid.hpp"
#include "lgo/vec.hpp"

namespace lgo {

enum class MetricKind { EuclideanWeighted, Ell1Weighted, Riemannian };

// Position-dependent norm phi(x, xi) sampled per grid cell, together with its
// dual norm, direction gradient, and Euclidean projection onto the dual unit
// ball. Immutable after construction; all evaluations are pure.
//
// Families:
//   euclidean-weighted  phi = a(x)|xi|            dual = |p|/a(x)
//   ell1-weighted       phi = a(x)(|xi1|+|xi2|)   dual = max(|p1|,|p2|)/a(x)
//   riemannian          phi = sqrt(xi' M(x) xi)   dual = sqrt(p' M(x)^-1 p)
class MetricField {
 public:
  static MetricField euclidean_weighted(GridPtr grid, std::vector<double> a);
  static MetricField ell1_weighted(GridPtr grid, std::vector<double> a);
  static MetricField riemannian(GridPtr grid, std::vector<double> m11,
                                std::vector<double> m12,
                                std::vector<double> m22);

  MetricKind kind() const { return kind_; }
  const GridPtr& grid() const { return grid_; }

  // Certified ellipticity constant: alpha*|xi| <= phi(x,xi) <= |xi|/alpha,
  // tightest value over the sampled cells.
  double alpha() const { return alpha_; }

  double eval(int cell, Vec2 xi) const;
  double dual_eval(int cell, Vec2 p) const;

  // Direction gradient phi_xi(x, xi); 0-homogeneous, xi.grad = phi(x,xi).
  // Throws std::domain_error when |xi| < eps_grad (degenerate direction).
  Vec2 grad_xi(int cell, Vec2 xi) const;
  double eps_grad() const { return eps_grad_; }

  // argmin over {q : dual_eval(cell,q) <= 1} of |q - p|.
  Vec2 project_dual_ball(int cell, Vec2 p) const;

  // phi(cell, e_dir) for a unit axis vector; the interface-edge weight.
  double axis_weight(int cell, int dir) const;

  // Per-cell weight access (file round trips, cut graphs).
  const std::vector<double>& weight() const { return w_; }
  const std::vector<double>& m11() const { return m11_; }
  const std::vector<double>& m12() const { return m12_; }
  const std::vector<double>& m22() const { return m22_; }

 private:
  MetricField() = default;
  void check_cell(int cell) const;

  MetricKind kind_ = MetricKind::EuclideanWeighted;
  GridPtr grid_;
  std::vector<double> w_;                 // weighted families
  std::vector<double> m11_, m12_, m22_;   // riemannian
  double alpha_ = 1.0;
  double eps_grad_ = 1e-12;
};

}  // namespace lgo
