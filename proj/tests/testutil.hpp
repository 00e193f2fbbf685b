#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "lgo/problem.hpp"

namespace lgo::testutil {

// Square domain: n_int x n_int interior cells inside a `band`-cell exterior
// margin, spacing h (defaults to side length 1).
inline GridPtr box_grid(int n_int, int band = 2, double h = 0.0) {
  if (h <= 0.0) h = 1.0 / n_int;
  const int n = n_int + 2 * band;
  std::vector<std::uint8_t> interior(n * n, 0);
  for (int j = band; j < band + n_int; ++j)
    for (int i = band; i < band + n_int; ++i) interior[j * n + i] = 1;
  return Grid2::create(n, n, h, std::move(interior));
}

// Disk of radius R centered in an N x N lattice.
inline GridPtr disk_grid(int n_lattice, double h, double radius) {
  const double cx = 0.5 * n_lattice * h, cy = cx;
  std::vector<std::uint8_t> interior(n_lattice * n_lattice, 0);
  for (int j = 0; j < n_lattice; ++j)
    for (int i = 0; i < n_lattice; ++i) {
      double x = (i + 0.5) * h - cx, y = (j + 0.5) * h - cy;
      interior[j * n_lattice + i] = x * x + y * y < radius * radius;
    }
  return Grid2::create(n_lattice, n_lattice, h, std::move(interior));
}

inline MetricField unit_metric(const GridPtr& g, MetricKind kind,
                               double weight = 1.0) {
  std::vector<double> a(g->size(), weight);
  switch (kind) {
    case MetricKind::EuclideanWeighted:
      return MetricField::euclidean_weighted(g, a);
    case MetricKind::Ell1Weighted:
      return MetricField::ell1_weighted(g, a);
    case MetricKind::Riemannian: {
      std::vector<double> m11(g->size(), weight * weight),
          m12(g->size(), 0.0), m22(g->size(), weight * weight);
      return MetricField::riemannian(g, m11, m12, m22);
    }
  }
  throw std::logic_error("unreachable");
}

inline ScalarField fill_field(const GridPtr& g,
                              const std::function<double(Vec2)>& fn) {
  ScalarField out(g);
  for (int c = 0; c < g->size(); ++c) out.v[c] = fn(g->center(c));
  return out;
}

inline ScalarField const_field(const GridPtr& g, double v) {
  return ScalarField(g, v);
}

inline ScalarField no_obstacle(const GridPtr& g) {
  return ScalarField(g, -std::numeric_limits<double>::infinity());
}

// f = step across the vertical midline of the lattice.
inline ScalarField step_datum(const GridPtr& g) {
  const double mid = 0.5 * g->nx() * g->h();
  return fill_field(g, [&](Vec2 p) { return p.x >= mid ? 1.0 : 0.0; });
}

// psi = height on the centered block of half-width `half` (length units).
inline ScalarField block_obstacle(const GridPtr& g, double half,
                                  double height = 1.0) {
  const double cx = 0.5 * g->nx() * g->h(), cy = 0.5 * g->ny() * g->h();
  ScalarField psi = no_obstacle(g);
  for (int c = 0; c < g->size(); ++c) {
    Vec2 p = g->center(c);
    if (std::abs(p.x - cx) < half && std::abs(p.y - cy) < half)
      psi.v[c] = height;
  }
  return psi;
}

inline ProblemSpec constant_problem(MetricKind kind, int n = 16,
                                    double value = 3.0) {
  auto g = box_grid(n);
  return ProblemSpec(g, unit_metric(g, kind), no_obstacle(g),
                     const_field(g, value));
}

inline ProblemSpec step_problem(MetricKind kind, int n = 16) {
  auto g = box_grid(n);
  return ProblemSpec(g, unit_metric(g, kind), no_obstacle(g), step_datum(g));
}

// Block obstacle covering ~0.2 of the unit side, f = 0.
inline ProblemSpec block_problem(MetricKind kind, int n = 16) {
  auto g = box_grid(n);
  int k = static_cast<int>(std::lround(0.2 * n));
  double half = 0.5 * k * g->h();
  return ProblemSpec(g, unit_metric(g, kind), block_obstacle(g, half),
                     const_field(g, 0.0));
}

// Number of block cells along one side (for exact perimeter expectations).
inline int block_cells(int n) {
  return static_cast<int>(std::lround(0.2 * n));
}

inline ProblemSpec disk_problem(MetricKind kind, int n_lattice, double h,
                                double radius,
                                const std::function<double(double)>& f_theta) {
  auto g = disk_grid(n_lattice, h, radius);
  const double cx = 0.5 * n_lattice * h, cy = cx;
  ScalarField f = fill_field(g, [&](Vec2 p) {
    return f_theta(std::atan2(p.y - cy, p.x - cx));
  });
  return ProblemSpec(g, unit_metric(g, kind), no_obstacle(g), std::move(f));
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (int c = 0; c < a.size(); ++c)
    m = std::max(m, std::abs(a.v[c] - b.v[c]));
  return m;
}

}  // namespace lgo::testutil
