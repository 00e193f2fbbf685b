#include "lgo/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lgo {

namespace {

constexpr double kCondCap = 1e6;

void check_weight(const GridPtr& grid, const std::vector<double>& a) {
  if (static_cast<int>(a.size()) != grid->size())
    throw std::invalid_argument("metric: weight size does not match grid");
  for (double v : a)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("metric: weight must be positive and finite");
}

// Eigenvalues of a symmetric 2x2 [[m11, m12], [m12, m22]].
void sym_eigenvalues(double m11, double m12, double m22, double& lo,
                     double& hi) {
  double tr = m11 + m22;
  double det = m11 * m22 - m12 * m12;
  double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  lo = 0.5 * tr - disc;
  hi = 0.5 * tr + disc;
}

}  // namespace

MetricField MetricField::euclidean_weighted(GridPtr grid,
                                            std::vector<double> a) {
  check_weight(grid, a);
  MetricField m;
  m.kind_ = MetricKind::EuclideanWeighted;
  m.grid_ = std::move(grid);
  m.w_ = std::move(a);
  double amin = *std::min_element(m.w_.begin(), m.w_.end());
  double amax = *std::max_element(m.w_.begin(), m.w_.end());
  m.alpha_ = std::min(amin, 1.0 / amax);
  return m;
}

MetricField MetricField::ell1_weighted(GridPtr grid, std::vector<double> a) {
  check_weight(grid, a);
  MetricField m;
  m.kind_ = MetricKind::Ell1Weighted;
  m.grid_ = std::move(grid);
  m.w_ = std::move(a);
  double amin = *std::min_element(m.w_.begin(), m.w_.end());
  double amax = *std::max_element(m.w_.begin(), m.w_.end());
  // a|xi| <= a(|x1|+|x2|) <= a sqrt(2) |xi|
  m.alpha_ = std::min(amin, 1.0 / (std::sqrt(2.0) * amax));
  return m;
}

MetricField MetricField::riemannian(GridPtr grid, std::vector<double> m11,
                                    std::vector<double> m12,
                                    std::vector<double> m22) {
  const int n = grid->size();
  if (static_cast<int>(m11.size()) != n || static_cast<int>(m12.size()) != n ||
      static_cast<int>(m22.size()) != n)
    throw std::invalid_argument("metric: tensor field size does not match grid");

  double lo_all = std::numeric_limits<double>::infinity();
  double hi_all = 0.0;
  for (int c = 0; c < n; ++c) {
    if (!std::isfinite(m11[c]) || !std::isfinite(m12[c]) ||
        !std::isfinite(m22[c]))
      throw std::invalid_argument("metric: non-finite tensor entry");
    double lo, hi;
    sym_eigenvalues(m11[c], m12[c], m22[c], lo, hi);
    if (!(lo > 0.0))
      throw std::invalid_argument("metric: tensor is not positive definite");
    if (hi / lo > kCondCap)
      throw std::invalid_argument("metric: tensor condition number exceeds 1e6");
    lo_all = std::min(lo_all, lo);
    hi_all = std::max(hi_all, hi);
  }

  MetricField m;
  m.kind_ = MetricKind::Riemannian;
  m.grid_ = std::move(grid);
  m.m11_ = std::move(m11);
  m.m12_ = std::move(m12);
  m.m22_ = std::move(m22);
  m.alpha_ = std::min(std::sqrt(lo_all), 1.0 / std::sqrt(hi_all));
  return m;
}

void MetricField::check_cell(int cell) const {
  if (cell < 0 || cell >= grid_->size())
    throw std::out_of_range("metric: cell index outside grid");
}

double MetricField::eval(int cell, Vec2 xi) const {
  check_cell(cell);
  if (!finite(xi)) throw std::invalid_argument("metric: non-finite direction");
  switch (kind_) {
    case MetricKind::EuclideanWeighted:
      return w_[cell] * norm(xi);
    case MetricKind::Ell1Weighted:
      return w_[cell] * (std::abs(xi.x) + std::abs(xi.y));
    case MetricKind::Riemannian: {
      double q = m11_[cell] * xi.x * xi.x + 2.0 * m12_[cell] * xi.x * xi.y +
                 m22_[cell] * xi.y * xi.y;
      return std::sqrt(std::max(0.0, q));
    }
  }
  return 0.0;
}

double MetricField::dual_eval(int cell, Vec2 p) const {
  check_cell(cell);
  if (!finite(p)) throw std::invalid_argument("metric: non-finite covector");
  switch (kind_) {
    case MetricKind::EuclideanWeighted:
      return norm(p) / w_[cell];
    case MetricKind::Ell1Weighted:
      return std::max(std::abs(p.x), std::abs(p.y)) / w_[cell];
    case MetricKind::Riemannian: {
      double det = m11_[cell] * m22_[cell] - m12_[cell] * m12_[cell];
      double q = (m22_[cell] * p.x * p.x - 2.0 * m12_[cell] * p.x * p.y +
                  m11_[cell] * p.y * p.y) /
                 det;
      return std::sqrt(std::max(0.0, q));
    }
  }
  return 0.0;
}

Vec2 MetricField::grad_xi(int cell, Vec2 xi) const {
  check_cell(cell);
  if (!finite(xi)) throw std::invalid_argument("metric: non-finite direction");
  if (norm(xi) < eps_grad_)
    throw std::domain_error("metric: gradient undefined near xi = 0");
  switch (kind_) {
    case MetricKind::EuclideanWeighted:
      return (w_[cell] / norm(xi)) * xi;
    case MetricKind::Ell1Weighted: {
      auto sgn = [](double v) { return v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0; };
      return {w_[cell] * sgn(xi.x), w_[cell] * sgn(xi.y)};
    }
    case MetricKind::Riemannian: {
      double phi = eval(cell, xi);
      Vec2 mxi{m11_[cell] * xi.x + m12_[cell] * xi.y,
               m12_[cell] * xi.x + m22_[cell] * xi.y};
      return (1.0 / phi) * mxi;
    }
  }
  return {};
}

Vec2 MetricField::project_dual_ball(int cell, Vec2 p) const {
  check_cell(cell);
  if (!finite(p)) throw std::invalid_argument("metric: non-finite covector");
  switch (kind_) {
    case MetricKind::EuclideanWeighted: {
      double r = w_[cell];
      double n = norm(p);
      return n <= r ? p : (r / n) * p;
    }
    case MetricKind::Ell1Weighted: {
      double r = w_[cell];
      return {std::clamp(p.x, -r, r), std::clamp(p.y, -r, r)};
    }
    case MetricKind::Riemannian: {
      if (dual_eval(cell, p) <= 1.0) return p;
      // Dual ball {p' M^-1 p <= 1} is the ellipse with semi-axes sqrt(eig M)
      // along the eigenvectors of M. Project in eigencoordinates by solving
      // the secular equation for the multiplier.
      double m11 = m11_[cell], m12 = m12_[cell], m22 = m22_[cell];
      double lo, hi;
      sym_eigenvalues(m11, m12, m22, lo, hi);
      // Eigenvector for `hi`.
      Vec2 e1 = std::abs(m12) > 1e-300 * (std::abs(m11) + std::abs(m22))
                    ? Vec2{m12, hi - m11}
                    : (m11 >= m22 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0});
      double en = norm(e1);
      e1 = (1.0 / en) * e1;
      Vec2 e2{-e1.y, e1.x};
      double y1 = dot(p, e1), y2 = dot(p, e2);
      double a1 = hi, a2 = lo;  // squared semi-axes
      auto residual = [&](double mu) {
        double z1 = a1 * y1 / (a1 + mu);
        double z2 = a2 * y2 / (a2 + mu);
        return z1 * z1 / a1 + z2 * z2 / a2 - 1.0;
      };
      double mu_lo = 0.0;
      double mu_hi = std::max(a1, a2) + std::sqrt(a1 * y1 * y1 + a2 * y2 * y2);
      while (residual(mu_hi) > 0.0) mu_hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (mu_lo + mu_hi);
        if (residual(mid) > 0.0)
          mu_lo = mid;
        else
          mu_hi = mid;
        if (mu_hi - mu_lo <= 1e-16 * (1.0 + mu_hi)) break;
      }
      double mu = 0.5 * (mu_lo + mu_hi);
      Vec2 z = (a1 * y1 / (a1 + mu)) * e1 + (a2 * y2 / (a2 + mu)) * e2;
      double d = dual_eval(cell, z);
      if (d > 1.0) z = (1.0 / d) * z;
      return z;
    }
  }
  return {};
}

double MetricField::axis_weight(int cell, int dir) const {
  switch (kind_) {
    case MetricKind::EuclideanWeighted:
    case MetricKind::Ell1Weighted:
      return w_[cell];
    case MetricKind::Riemannian:
      return std::sqrt(dir == 0 ? m11_[cell] : m22_[cell]);
  }
  return 0.0;
}

}  // namespace lgo
