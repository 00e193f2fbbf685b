#include "lgo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lgo/metric.hpp"

namespace lgo {

std::shared_ptr<const Grid2> Grid2::create(int nx, int ny, double h,
                                           std::vector<std::uint8_t> interior) {
  if (nx < 3 || ny < 3) throw std::invalid_argument("grid: nx, ny must be >= 3");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("grid: spacing must be positive and finite");
  if (static_cast<int>(interior.size()) != nx * ny)
    throw std::invalid_argument("grid: mask size does not match nx*ny");

  auto g = std::shared_ptr<Grid2>(new Grid2());
  g->nx_ = nx;
  g->ny_ = ny;
  g->h_ = h;
  g->build(std::move(interior));
  return g;
}

void Grid2::build(std::vector<std::uint8_t> interior) {
  const int n = nx_ * ny_;
  labels_.assign(n, Cell::Exterior);
  for (int c = 0; c < n; ++c)
    if (interior[c]) labels_[c] = Cell::Interior;

  auto inside = [&](int i, int j) {
    return i >= 0 && i < nx_ && j >= 0 && j < ny_ &&
           labels_[index(i, j)] == Cell::Interior;
  };

  // No interior cell may touch the lattice edge: every interface edge must
  // exist as a difference pair and the far-edge Neumann closure must only see
  // exterior data.
  for (int c = 0; c < n; ++c) {
    if (labels_[c] != Cell::Interior) continue;
    int i = ci(c), j = cj(c);
    if (i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1)
      throw std::invalid_argument("grid: interior cell on the lattice edge");
    interior_cells_.push_back(c);
  }
  if (interior_cells_.empty())
    throw std::invalid_argument("grid: no interior cells");

  // Boundary band: exterior cells 4-adjacent to the interior.
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      int c = index(i, j);
      if (labels_[c] == Cell::Interior) continue;
      if (inside(i - 1, j) || inside(i + 1, j) || inside(i, j - 1) ||
          inside(i, j + 1))
        labels_[c] = Cell::Boundary;
    }

  // Single 4-connected interior component.
  {
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<int> stack{interior_cells_.front()};
    seen[stack.back()] = 1;
    std::size_t count = 0;
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      ++count;
      int i = ci(c), j = cj(c);
      const int nb[4] = {index(i - 1, j), index(i + 1, j), index(i, j - 1),
                         index(i, j + 1)};
      for (int b : nb)
        if (labels_[b] == Cell::Interior && !seen[b]) {
          seen[b] = 1;
          stack.push_back(b);
        }
    }
    if (count != interior_cells_.size())
      throw std::invalid_argument("grid: interior is not 4-connected");
  }

  // Active forward-difference pairs and the interface edge list.
  active_.assign(n, 0);
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      int c = index(i, j);
      if (i + 1 < nx_) {
        int r = index(i + 1, j);
        bool ci_ = labels_[c] == Cell::Interior;
        bool ri = labels_[r] == Cell::Interior;
        if (ci_ || ri) {
          active_[c] |= 1;
          if (ci_ != ri)
            edges_.push_back({c, ci_ ? c : r, ci_ ? r : c, 0, ci_ ? 1 : -1});
        }
      }
      if (j + 1 < ny_) {
        int t = index(i, j + 1);
        bool ci_ = labels_[c] == Cell::Interior;
        bool ti = labels_[t] == Cell::Interior;
        if (ci_ || ti) {
          active_[c] |= 2;
          if (ci_ != ti)
            edges_.push_back({c, ci_ ? c : t, ci_ ? t : c, 1, ci_ ? 1 : -1});
        }
      }
    }

  compute_signed_distance();
}

// Rouy-Tourin eikonal update: smallest d with (d-a)+^2 + (d-b)+^2 = h^2 for
// the upwind neighbor values a, b.
static double eikonal_update(double a, double b, double h) {
  double lo = std::min(a, b), hi = std::max(a, b);
  if (hi - lo >= h) return lo + h;
  double s = lo + hi;
  double disc = 2.0 * h * h - (hi - lo) * (hi - lo);
  return 0.5 * (s + std::sqrt(disc));
}

void Grid2::compute_signed_distance() {
  const int n = nx_ * ny_;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);

  // Seed the interface: cells with an opposite-side 4-neighbor start at h/2
  // (the interface passes between cell centers).
  for (const auto& e : edges_) {
    dist[e.in_cell] = 0.5 * h_;
    dist[e.out_cell] = 0.5 * h_;
  }

  // Alternating-order sweeps of the unsigned distance.
  for (int sweep = 0; sweep < 8; ++sweep) {
    bool xf = sweep & 1, yf = sweep & 2;
    for (int jj = 0; jj < ny_; ++jj)
      for (int ii = 0; ii < nx_; ++ii) {
        int i = xf ? nx_ - 1 - ii : ii;
        int j = yf ? ny_ - 1 - jj : jj;
        int c = index(i, j);
        double a = std::min(i > 0 ? dist[index(i - 1, j)] : inf,
                            i + 1 < nx_ ? dist[index(i + 1, j)] : inf);
        double b = std::min(j > 0 ? dist[index(i, j - 1)] : inf,
                            j + 1 < ny_ ? dist[index(i, j + 1)] : inf);
        if (!std::isfinite(a) && !std::isfinite(b)) continue;
        double cand;
        if (!std::isfinite(a))
          cand = b + h_;
        else if (!std::isfinite(b))
          cand = a + h_;
        else
          cand = eikonal_update(a, b, h_);
        if (cand < dist[c]) dist[c] = cand;
      }
  }

  sdist_.assign(n, 0.0);
  for (int c = 0; c < n; ++c) {
    double d = std::isfinite(dist[c]) ? dist[c] : (nx_ + ny_) * h_;
    sdist_[c] = labels_[c] == Cell::Interior ? d : -d;
  }
}

VectorField grad(const ScalarField& u) {
  const Grid2& g = *u.grid;
  VectorField out(u.grid);
  const int nx = g.nx(), ny = g.ny();
  const double inv_h = 1.0 / g.h();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int c = g.index(i, j);
      out.x[c] = i + 1 < nx ? (u.v[c + 1] - u.v[c]) * inv_h : 0.0;
      out.y[c] = j + 1 < ny ? (u.v[c + nx] - u.v[c]) * inv_h : 0.0;
    }
  return out;
}

ScalarField div(const VectorField& p) {
  const Grid2& g = *p.grid;
  ScalarField out(p.grid);
  const int nx = g.nx(), ny = g.ny();
  const double inv_h = 1.0 / g.h();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int c = g.index(i, j);
      double dx = (i + 1 < nx ? p.x[c] : 0.0) - (i > 0 ? p.x[c - 1] : 0.0);
      double dy = (j + 1 < ny ? p.y[c] : 0.0) - (j > 0 ? p.y[c - nx] : 0.0);
      out.v[c] = (dx + dy) * inv_h;
    }
  return out;
}

double total_variation(const MetricField& metric, const ScalarField& u,
                       Region region) {
  const Grid2& g = *u.grid;
  VectorField du = grad(u);
  const double h2 = g.h() * g.h();
  double sum = 0.0;
  if (region == Region::Interior) {
    for (int c : g.interior_cells()) sum += metric.eval(c, du.at(c));
  } else {
    for (int c = 0; c < g.size(); ++c) sum += metric.eval(c, du.at(c));
  }
  return h2 * sum;
}

double perimeter(const MetricField& metric, const ScalarField& indicator,
                 Region region) {
  for (double v : indicator.v)
    if (v != 0.0 && v != 1.0)
      throw std::invalid_argument("perimeter: field is not binary");
  return total_variation(metric, indicator, region);
}

double boundary_term(const MetricField& metric, const ScalarField& u,
                     const ScalarField& f) {
  const Grid2& g = *u.grid;
  double sum = 0.0;
  for (const auto& e : g.interface_edges())
    sum += metric.axis_weight(e.home, e.dir) *
           std::abs(u.v[e.in_cell] - f.v[e.out_cell]);
  return g.h() * sum;
}

}  // namespace lgo
