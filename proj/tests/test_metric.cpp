#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lgo/metric.hpp"
#include "testutil.hpp"

using namespace lgo;
using namespace lgo::testutil;

namespace {

const double kPi = 3.14159265358979323846;

// Brute-force dual norm: sup of p.q over directions scaled to the unit phi
// ball. Lower bound that converges as the angular sample refines.
double brute_dual(const MetricField& m, int cell, Vec2 p, int samples) {
  double best = 0.0;
  for (int k = 0; k < samples; ++k) {
    double th = 2.0 * kPi * k / samples;
    Vec2 dir{std::cos(th), std::sin(th)};
    double phi = m.eval(cell, dir);
    best = std::max(best, dot(p, dir) / phi);
  }
  return best;
}

// Rotated anisotropic tensor for the riemannian checks.
MetricField rotated_riemannian(const GridPtr& g, double l1, double l2,
                               double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  std::vector<double> m11(g->size()), m12(g->size()), m22(g->size());
  for (int i = 0; i < g->size(); ++i) {
    m11[i] = l1 * c * c + l2 * s * s;
    m12[i] = (l1 - l2) * c * s;
    m22[i] = l1 * s * s + l2 * c * c;
  }
  return MetricField::riemannian(g, m11, m12, m22);
}

std::vector<MetricField> metric_family(const GridPtr& g) {
  std::vector<MetricField> out;
  out.push_back(unit_metric(g, MetricKind::EuclideanWeighted));
  out.push_back(unit_metric(g, MetricKind::Ell1Weighted, 1.5));
  {
    // varying weight
    std::vector<double> a(g->size());
    for (int c = 0; c < g->size(); ++c)
      a[c] = 1.0 + 0.5 * std::sin(0.37 * c) * std::sin(0.37 * c);
    out.push_back(MetricField::euclidean_weighted(g, a));
  }
  out.push_back(rotated_riemannian(g, 4.0, 1.0, 0.6));
  return out;
}

Vec2 random_vec(std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return {d(rng), d(rng)};
}

}  // namespace

TEST_CASE("eval closed forms") {
  auto g = box_grid(6);
  int c = g->interior_cells().front();

  auto eucl1 = unit_metric(g, MetricKind::EuclideanWeighted);
  CHECK(eucl1.eval(c, {3, 4}) == doctest::Approx(5.0));

  auto eucl2 = unit_metric(g, MetricKind::EuclideanWeighted, 2.0);
  CHECK(eucl2.eval(c, {3, 4}) == doctest::Approx(10.0));

  auto ell1 = unit_metric(g, MetricKind::Ell1Weighted);
  CHECK(ell1.eval(c, {3, -4}) == doctest::Approx(7.0));
}

TEST_CASE("eval input errors") {
  auto g = box_grid(6);
  auto m = unit_metric(g, MetricKind::EuclideanWeighted);
  CHECK_THROWS_AS(m.eval(0, {std::nan(""), 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(m.eval(-1, {1, 0}), std::out_of_range);
  CHECK_THROWS_AS(m.eval(g->size(), {1, 0}), std::out_of_range);
}

TEST_CASE("dual_eval closed forms") {
  auto g = box_grid(6);
  int c = 0;

  auto eucl = unit_metric(g, MetricKind::EuclideanWeighted);
  CHECK(eucl.dual_eval(c, {3, 4}) == doctest::Approx(5.0));

  auto ell1 = unit_metric(g, MetricKind::Ell1Weighted);
  CHECK(ell1.dual_eval(c, {3, 4}) == doctest::Approx(4.0));

  std::vector<double> m11(g->size(), 4.0), m12(g->size(), 0.0),
      m22(g->size(), 1.0);
  auto riem = MetricField::riemannian(g, m11, m12, m22);
  // brute-force over 1e6 sampled directions on the unit phi ball gives 1.0
  double oracle = brute_dual(riem, c, {2, 0}, 1000000);
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(riem.dual_eval(c, {2, 0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dual_eval matches brute force across the family") {
  auto g = box_grid(6);
  auto rng_ = rng(11);
  for (const auto& m : metric_family(g)) {
    for (int k = 0; k < 8; ++k) {
      int c = g->index(1 + k % (g->nx() - 2), 1 + (k * 3) % (g->ny() - 2));
      Vec2 p = random_vec(rng_);
      double ref = brute_dual(m, c, p, 40000);
      CHECK(m.dual_eval(c, p) == doctest::Approx(ref).epsilon(1e-3));
    }
  }
}

TEST_CASE("grad_xi closed forms and homogeneity") {
  auto g = box_grid(6);
  int c = 0;
  auto eucl = unit_metric(g, MetricKind::EuclideanWeighted);
  Vec2 r = eucl.grad_xi(c, {3, 4});
  CHECK(r.x == doctest::Approx(0.6));
  CHECK(r.y == doctest::Approx(0.8));
  Vec2 r2 = eucl.grad_xi(c, {6, 8});
  CHECK(r2.x == doctest::Approx(0.6));
  CHECK(r2.y == doctest::Approx(0.8));

  auto ell1 = unit_metric(g, MetricKind::Ell1Weighted);
  Vec2 s = ell1.grad_xi(c, {3, -4});
  CHECK(s.x == doctest::Approx(1.0));
  CHECK(s.y == doctest::Approx(-1.0));

  CHECK_THROWS_AS(eucl.grad_xi(c, {0.0, 0.0}), std::domain_error);
}

TEST_CASE("norm axioms, C1 sandwich, Euler identity, dual inequality") {
  auto g = box_grid(8);
  auto rng_ = rng(7);
  std::uniform_int_distribution<int> cell_pick(0, g->size() - 1);

  for (const auto& m : metric_family(g)) {
    CHECK(m.alpha() > 0.0);
    for (int k = 0; k < 64; ++k) {
      int c = cell_pick(rng_);
      Vec2 xi = random_vec(rng_);
      Vec2 eta = random_vec(rng_);
      double lam = std::uniform_real_distribution<double>(-2.0, 2.0)(rng_);

      double phi_xi = m.eval(c, xi);
      CHECK(m.eval(c, lam * xi) ==
            doctest::Approx(std::abs(lam) * phi_xi).epsilon(1e-10));
      CHECK(m.eval(c, xi + eta) <= phi_xi + m.eval(c, eta) + 1e-10);
      if (norm(xi) > 1e-9) CHECK(phi_xi > 0.0);

      // C1 with the stored alpha
      CHECK(phi_xi >= m.alpha() * norm(xi) - 1e-10);
      CHECK(phi_xi <= norm(xi) / m.alpha() + 1e-10);
    }

    // Euler identity and p.phi_xi(q) <= phi(p) on 256 pairs
    for (int k = 0; k < 256; ++k) {
      int c = cell_pick(rng_);
      Vec2 p = random_vec(rng_);
      Vec2 q = random_vec(rng_);
      if (norm(q) < 0.2) q = {0.7, -1.1};  // keep clear of the axes/origin
      if (norm(p) < 1e-12) continue;
      if (m.kind() == MetricKind::Ell1Weighted &&
          (std::abs(q.x) < 1e-6 || std::abs(q.y) < 1e-6))
        continue;

      Vec2 gq = m.grad_xi(c, q);
      CHECK(dot(q, gq) == doctest::Approx(m.eval(c, q)).epsilon(1e-10));
      CHECK(dot(p, gq) <= m.eval(c, p) + 1e-10);

      double lam = std::uniform_real_distribution<double>(0.1, 5.0)(rng_);
      Vec2 gq2 = m.grad_xi(c, lam * q);
      CHECK(gq2.x == doctest::Approx(gq.x).epsilon(1e-10));
      CHECK(gq2.y == doctest::Approx(gq.y).epsilon(1e-10));
    }
  }
}

TEST_CASE("bidual recovers the primal norm") {
  auto g = box_grid(6);
  auto rng_ = rng(3);
  for (const auto& m : metric_family(g)) {
    for (int k = 0; k < 6; ++k) {
      int c = g->index(2 + k % 3, 2 + k % 4);
      Vec2 p = random_vec(rng_);
      // sup over sampled q in the dual ball of p.q equals phi(p)
      double best = 0.0;
      for (int a = 0; a < 20000; ++a) {
        double th = 2.0 * kPi * a / 20000;
        Vec2 dir{std::cos(th), std::sin(th)};
        Vec2 q = (1.0 / m.dual_eval(c, dir)) * dir;
        best = std::max(best, dot(p, q));
      }
      CHECK(best == doctest::Approx(m.eval(c, p)).epsilon(1e-3));
    }
  }
}

TEST_CASE("project_dual_ball closed-form examples") {
  auto g = box_grid(6);
  int c = 0;

  auto eucl1 = unit_metric(g, MetricKind::EuclideanWeighted);
  Vec2 r = eucl1.project_dual_ball(c, {3, 4});
  CHECK(r.x == doctest::Approx(0.6));
  CHECK(r.y == doctest::Approx(0.8));

  auto eucl2 = unit_metric(g, MetricKind::EuclideanWeighted, 2.0);
  Vec2 r2 = eucl2.project_dual_ball(c, {3, 4});
  CHECK(r2.x == doctest::Approx(1.2));
  CHECK(r2.y == doctest::Approx(1.6));

  auto ell1 = unit_metric(g, MetricKind::Ell1Weighted);
  Vec2 r3 = ell1.project_dual_ball(c, {3, -0.5});
  CHECK(r3.x == doctest::Approx(1.0));
  CHECK(r3.y == doctest::Approx(-0.5));
}

TEST_CASE("project_dual_ball feasibility and fixed point") {
  auto g = box_grid(8);
  auto rng_ = rng(17);
  std::uniform_int_distribution<int> cell_pick(0, g->size() - 1);
  for (const auto& m : metric_family(g)) {
    for (int k = 0; k < 200; ++k) {
      int c = cell_pick(rng_);
      Vec2 p = random_vec(rng_, 4.0);
      Vec2 q = m.project_dual_ball(c, p);
      CHECK(m.dual_eval(c, q) <= 1.0 + 1e-12);
      Vec2 q2 = m.project_dual_ball(c, q);
      CHECK(norm(q2 - q) <= 1e-12);
      if (m.dual_eval(c, p) <= 1.0) CHECK(norm(q - p) == 0.0);

      // optimality: the projection is the closest sampled feasible point
      double dq = norm(q - p);
      for (int a = 0; a < 64; ++a) {
        double th = 2.0 * kPi * a / 64;
        Vec2 dir{std::cos(th), std::sin(th)};
        Vec2 z = (0.999 / m.dual_eval(c, dir)) * dir;
        CHECK(norm(z - p) >= dq - 1e-6);
      }
    }
  }
}

TEST_CASE("construction validation") {
  auto g = box_grid(6);
  std::vector<double> bad(g->size(), 1.0);
  bad[3] = 0.0;
  CHECK_THROWS_AS(MetricField::euclidean_weighted(g, bad),
                  std::invalid_argument);
  bad[3] = -1.0;
  CHECK_THROWS_AS(MetricField::ell1_weighted(g, bad), std::invalid_argument);

  // indefinite tensor
  std::vector<double> m11(g->size(), 1.0), m12(g->size(), 2.0),
      m22(g->size(), 1.0);
  CHECK_THROWS_AS(MetricField::riemannian(g, m11, m12, m22),
                  std::invalid_argument);

  // condition cap
  std::vector<double> big(g->size(), 1e8), zero(g->size(), 0.0),
      one(g->size(), 1.0);
  CHECK_THROWS_AS(MetricField::riemannian(g, big, zero, one),
                  std::invalid_argument);

  auto riem = rotated_riemannian(g, 4.0, 1.0, 0.3);
  CHECK(riem.alpha() == doctest::Approx(0.5));  // min(sqrt(1), 1/sqrt(4))
}
