#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lgo/grid.hpp"
#include "lgo/metric.hpp"
#include "testutil.hpp"

using namespace lgo;
using namespace lgo::testutil;

namespace {

GridPtr full_lattice(int n, double h) {
  // all-interior core with a single-cell exterior ring
  std::vector<std::uint8_t> interior(n * n, 0);
  for (int j = 1; j < n - 1; ++j)
    for (int i = 1; i < n - 1; ++i) interior[j * n + i] = 1;
  return Grid2::create(n, n, h, std::move(interior));
}

ScalarField random_field(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField u(g);
  for (auto& v : u.v) v = d(rng);
  return u;
}

VectorField random_vector_field(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VectorField p(g);
  for (int c = 0; c < g->size(); ++c) p.set(c, {d(rng), d(rng)});
  return p;
}

double inner(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (int c = 0; c < a.size(); ++c) s += a.v[c] * b.v[c];
  return s;
}

double inner(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int c = 0; c < a.size(); ++c) s += dot(a.at(c), b.at(c));
  return s;
}

}  // namespace

TEST_CASE("grad: constants, ramps, delta stencil") {
  auto g = box_grid(8);
  auto c3 = const_field(g, 4.2);
  VectorField dz = grad(c3);
  for (int c = 0; c < g->size(); ++c) CHECK(norm(dz.at(c)) == 0.0);

  ScalarField ramp = fill_field(g, [](Vec2 p) { return p.x; });
  VectorField dr = grad(ramp);
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i + 1 < g->nx(); ++i) {
      CHECK(dr.x[g->index(i, j)] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(dr.y[g->index(i, j)] == doctest::Approx(0.0));
    }

  // 3x3 lattice, h = 1, delta at the center: the four stencil values are +-1
  auto g3 = Grid2::create(3, 3, 1.0, {0, 0, 0, 0, 1, 0, 0, 0, 0});
  ScalarField delta(g3);
  delta.v[g3->index(1, 1)] = 1.0;
  VectorField dd = grad(delta);
  CHECK(dd.x[g3->index(0, 1)] == doctest::Approx(1.0));
  CHECK(dd.y[g3->index(1, 0)] == doctest::Approx(1.0));
  CHECK(dd.x[g3->index(1, 1)] == doctest::Approx(-1.0));
  CHECK(dd.y[g3->index(1, 1)] == doctest::Approx(-1.0));
  int nonzero = 0;
  for (int c = 0; c < g3->size(); ++c) {
    nonzero += dd.x[c] != 0.0;
    nonzero += dd.y[c] != 0.0;
  }
  CHECK(nonzero == 4);
}

TEST_CASE("div: constants and adjointness") {
  auto g = box_grid(8);
  VectorField constp(g, {0.7, -0.3});
  ScalarField dv = div(constp);
  for (int c : g->interior_cells()) CHECK(dv.v[c] == doctest::Approx(0.0));

  ScalarField ramp = fill_field(g, [](Vec2 p) { return p.x; });
  ScalarField dgr = div(grad(ramp));
  for (int c : g->interior_cells())
    CHECK(dgr.v[c] == doctest::Approx(0.0).epsilon(1e-12));

  auto rng_ = rng(5);
  for (int k = 0; k < 32; ++k) {
    ScalarField u = random_field(g, rng_);
    VectorField p = random_vector_field(g, rng_);
    double lhs = inner(grad(u), p);
    double rhs = inner(u, div(p));
    double scale = std::sqrt(inner(u, u)) * std::sqrt(inner(p, p));
    CHECK(std::abs(lhs + rhs) <= 1e-12 * std::max(scale, 1.0) / g->h());
  }
}

TEST_CASE("total variation: step interface") {
  const int n = 64;
  auto g = full_lattice(n + 2, 1.0 / n);
  double h = g->h();
  double mid = 0.5 * g->nx() * h;
  ScalarField step = fill_field(g, [&](Vec2 p) { return p.x >= mid ? 1.0 : 0.0; });

  auto eucl = unit_metric(g, MetricKind::EuclideanWeighted);
  auto ell1 = unit_metric(g, MetricKind::Ell1Weighted);
  CHECK(total_variation(eucl, const_field(g, 7.0), Region::All) == 0.0);
  // coarea: the interface is a vertical segment of length ~1
  double expected = g->ny() * h;  // one jump column across the lattice
  CHECK(total_variation(eucl, step, Region::All) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(total_variation(ell1, step, Region::All) ==
        doctest::Approx(expected).epsilon(1e-12));

  // absolute 1-homogeneity for a fixed sign pattern
  ScalarField step3 = step;
  for (auto& v : step3.v) v *= 3.0;
  CHECK(total_variation(eucl, step3, Region::All) ==
        doctest::Approx(3.0 * total_variation(eucl, step, Region::All)));
}

TEST_CASE("perimeter: blocks and submodularity") {
  auto g = full_lattice(12, 1.0);
  auto ell1 = unit_metric(g, MetricKind::Ell1Weighted);

  ScalarField empty(g, 0.0);
  CHECK(perimeter(ell1, empty, Region::All) == 0.0);

  const int k = 4;
  ScalarField block(g, 0.0);
  for (int j = 3; j < 3 + k; ++j)
    for (int i = 3; i < 3 + k; ++i) block.v[g->index(i, j)] = 1.0;
  CHECK(perimeter(ell1, block, Region::All) == doctest::Approx(4.0 * k));

  ScalarField bad = block;
  bad.v[0] = 0.5;
  CHECK_THROWS_AS(perimeter(ell1, bad, Region::All), std::invalid_argument);

  // P(union) + P(intersection) <= P(E1) + P(E2), 100 random pairs per metric
  auto g8 = full_lattice(10, 0.25);
  auto rng_ = rng(23);
  std::bernoulli_distribution coin(0.5);
  for (const auto& m :
       {unit_metric(g8, MetricKind::EuclideanWeighted),
        unit_metric(g8, MetricKind::Ell1Weighted, 1.3),
        unit_metric(g8, MetricKind::Riemannian, 1.2)}) {
    for (int trial = 0; trial < 100; ++trial) {
      ScalarField e1(g8, 0.0), e2(g8, 0.0), eu(g8, 0.0), ei(g8, 0.0);
      for (int c = 0; c < g8->size(); ++c) {
        e1.v[c] = coin(rng_);
        e2.v[c] = coin(rng_);
        eu.v[c] = std::max(e1.v[c], e2.v[c]);
        ei.v[c] = std::min(e1.v[c], e2.v[c]);
      }
      double lhs = perimeter(m, eu, Region::All) + perimeter(m, ei, Region::All);
      double rhs = perimeter(m, e1, Region::All) + perimeter(m, e2, Region::All);
      CHECK(lhs <= rhs + 1e-10);
    }
  }
}

TEST_CASE("coarea consistency") {
  auto g = full_lattice(10, 0.5);
  auto rng_ = rng(31);
  std::uniform_int_distribution<int> level(0, 3);
  const double levels[4] = {-1.0, 0.25, 1.0, 2.5};

  auto ell1 = unit_metric(g, MetricKind::Ell1Weighted, 1.4);
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField u(g);
    for (auto& v : u.v) v = levels[level(rng_)];
    double tv = total_variation(ell1, u, Region::All);
    double stacked = 0.0;
    for (int j = 0; j + 1 < 4; ++j) {
      ScalarField chi(g);
      for (int c = 0; c < g->size(); ++c) chi.v[c] = u.v[c] > levels[j];
      stacked += (levels[j + 1] - levels[j]) * perimeter(ell1, chi, Region::All);
    }
    CHECK(tv == doctest::Approx(stacked).epsilon(1e-10));
  }

  // coupled norms: exact on two-valued fields
  auto eucl = unit_metric(g, MetricKind::EuclideanWeighted);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 10; ++trial) {
    ScalarField chi(g);
    for (auto& v : chi.v) v = coin(rng_);
    ScalarField u = chi;
    for (auto& v : u.v) v = 0.5 + 2.0 * v;
    CHECK(total_variation(eucl, u, Region::All) ==
          doctest::Approx(2.0 * perimeter(eucl, chi, Region::All))
              .epsilon(1e-10));
  }
}

TEST_CASE("boundary term") {
  auto g = box_grid(8);
  auto eucl = unit_metric(g, MetricKind::EuclideanWeighted);
  ScalarField f = const_field(g, 2.5);

  CHECK(boundary_term(eucl, f, f) == 0.0);

  // u = f + 1 at every interior cell: each interface edge contributes h
  ScalarField u = f;
  for (int c : g->interior_cells()) u.v[c] += 1.0;
  double expected = g->interface_edges().size() * g->h();
  CHECK(boundary_term(eucl, u, f) == doctest::Approx(expected).epsilon(1e-12));
  // interface length = perimeter of the unit square
  CHECK(expected == doctest::Approx(4.0 * 8.0 * g->h()).epsilon(1e-12));

  // single interface edge, h = 0.5, ell1 weight 2, |u - f| = 3
  auto g2 = box_grid(6, 2, 0.5);
  auto ell1 = unit_metric(g2, MetricKind::Ell1Weighted, 2.0);
  ScalarField f2(g2, 0.0), u2(g2, 0.0);
  // pick an interior cell with exactly one interface edge
  int pick = -1;
  {
    std::vector<int> edge_count(g2->size(), 0);
    for (const auto& e : g2->interface_edges()) ++edge_count[e.in_cell];
    for (int c : g2->interior_cells())
      if (edge_count[c] == 1) pick = c;
  }
  REQUIRE(pick >= 0);
  u2.v[pick] = 3.0;
  CHECK(boundary_term(ell1, u2, f2) == doctest::Approx(0.5 * 2.0 * 3.0));

  // zero iff the trace value matches the datum across every edge
  ScalarField f4 = fill_field(g, [](Vec2 p) { return 0.25 * (p.x > 0.5); });
  ScalarField u4 = f4;
  bool all_match = true;
  for (const auto& e : g->interface_edges())
    all_match = all_match && u4.v[e.in_cell] == f4.v[e.out_cell];
  CHECK(boundary_term(eucl, u4, f4) == (all_match ? 0.0 : -1.0));
  u4.v[g->interface_edges().front().in_cell] += 1e-7;
  CHECK(boundary_term(eucl, u4, f4) > 0.0);
}

TEST_CASE("signed distance: eikonal quality near the interface") {
  auto g = disk_grid(48, 1.0 / 44, 0.35);
  int checked = 0;
  for (int c = 0; c < g->size(); ++c) {
    if (std::abs(g->signed_distance(c)) > 3.0 * g->h()) continue;
    int i = g->ci(c), j = g->cj(c);
    if (i < 2 || j < 2 || i > g->nx() - 3 || j > g->ny() - 3) continue;
    // centered gradient magnitude ~ 1
    double gx = (g->signed_distance(g->index(i + 1, j)) -
                 g->signed_distance(g->index(i - 1, j))) /
                (2 * g->h());
    double gy = (g->signed_distance(g->index(i, j + 1)) -
                 g->signed_distance(g->index(i, j - 1))) /
                (2 * g->h());
    double mag = std::hypot(gx, gy);
    CHECK(mag == doctest::Approx(1.0).epsilon(0.1));
    ++checked;
  }
  CHECK(checked > 50);

  // sign flips exactly across the interface
  for (const auto& e : g->interface_edges()) {
    CHECK(g->signed_distance(e.in_cell) > 0.0);
    CHECK(g->signed_distance(e.out_cell) < 0.0);
  }
}

TEST_CASE("grid validation") {
  // interior touching the lattice edge
  std::vector<std::uint8_t> touch(25, 0);
  touch[0] = 1;
  CHECK_THROWS_AS(Grid2::create(5, 5, 1.0, touch), std::invalid_argument);

  // disconnected interior
  std::vector<std::uint8_t> split(49, 0);
  split[7 * 1 + 1] = 1;
  split[7 * 5 + 5] = 1;
  CHECK_THROWS_AS(Grid2::create(7, 7, 1.0, split), std::invalid_argument);

  // no interior
  CHECK_THROWS_AS(Grid2::create(4, 4, 1.0, std::vector<std::uint8_t>(16, 0)),
                  std::invalid_argument);
}

TEST_CASE("problem spec compatibility") {
  auto g = box_grid(8);
  auto m = unit_metric(g, MetricKind::EuclideanWeighted);

  // obstacle above the datum on the band is rejected
  ScalarField psi_bad(g, -std::numeric_limits<double>::infinity());
  for (int c = 0; c < g->size(); ++c)
    if (g->label(c) == Cell::Boundary) psi_bad.v[c] = 1.0;
  CHECK_THROWS_AS(ProblemSpec(g, m, psi_bad, const_field(g, 0.0)),
                  std::invalid_argument);

  // interior obstacle above f is fine: the extension is lifted
  ProblemSpec block = block_problem(MetricKind::EuclideanWeighted, 8);
  bool lifted = false;
  for (int c : block.grid()->interior_cells())
    if (block.f().v[c] == 1.0) lifted = true;
  CHECK(lifted);
  for (int c : block.grid()->interior_cells())
    CHECK(block.f().v[c] >= block.psi().v[c]);

  // -inf obstacle becomes the -BIG sentinel
  CHECK(block.obstacle_free(block.grid()->interior_cells().front()));
  CHECK(block.psi().v[block.grid()->interior_cells().front()] ==
        -block.big());
}
