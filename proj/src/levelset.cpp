#include "lgo/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lgo/maxflow.hpp"

namespace lgo {

namespace {

// 8-stencil weights for the euclidean-weighted family, minimax-calibrated
// over cut directions (equioscillating against the circle; exact weights are
// printed against a rasterized disk by stencil_disk_bias).
constexpr double kAxis8 = 0.39782473791667143;   // (sqrt(2)-1)*(1-eps*)
constexpr double kDiag8 = 0.28130143364092884;   // (1-eps* - kAxis8)/2

struct Pair {
  int a, b;   // flat cell indices, a is the weight sample cell
  double w;
};

// Difference pairs with at least one interior endpoint, with their cut
// weights, for the requested stencil.
std::vector<Pair> cut_pairs(const ProblemSpec& pr, int stencil) {
  const Grid2& g = *pr.grid();
  const MetricField& m = pr.metric();
  const double h = g.h();
  const int nx = g.nx(), ny = g.ny();

  const bool ell1 = m.kind() == MetricKind::Ell1Weighted;
  if (m.kind() == MetricKind::Riemannian)
    throw std::invalid_argument(
        "levelset: riemannian metrics are not supported by the cut oracle");
  if (!ell1 && stencil == 4)
    throw std::invalid_argument(
        "levelset: euclidean-weighted requires the 8-stencil");
  if (stencil != 4 && stencil != 8)
    throw std::invalid_argument("levelset: stencil must be 4 or 8");

  const double axis_scale = ell1 ? h : kAxis8 * h;
  std::vector<Pair> pairs;
  auto interior = [&](int i, int j) {
    return g.label(g.index(i, j)) == Cell::Interior;
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int c = g.index(i, j);
      double a = m.weight()[c];
      if (i + 1 < nx && (interior(i, j) || interior(i + 1, j)))
        pairs.push_back({c, c + 1, axis_scale * a});
      if (j + 1 < ny && (interior(i, j) || interior(i, j + 1)))
        pairs.push_back({c, c + nx, axis_scale * a});
      if (!ell1 && stencil == 8) {
        if (i + 1 < nx && j + 1 < ny && (interior(i, j) || interior(i + 1, j + 1)))
          pairs.push_back({c, c + nx + 1, kDiag8 * h * a});
        if (i + 1 < nx && j > 0 && (interior(i, j) || interior(i + 1, j - 1)))
          pairs.push_back({c, c - nx + 1, kDiag8 * h * a});
      }
    }
  return pairs;
}

double pair_energy(const std::vector<Pair>& pairs,
                   const std::vector<std::uint8_t>& chi) {
  double sum = 0.0;
  for (const auto& p : pairs)
    if (chi[p.a] != chi[p.b]) sum += p.w;
  return sum;
}

}  // namespace

LevelSetProblem::LevelSetProblem(const ProblemSpec& p, double threshold)
    : problem(&p), t(threshold) {
  if (!std::isfinite(threshold))
    throw std::invalid_argument("levelset: threshold must be finite");
  const Grid2& g = *p.grid();
  L.assign(g.size(), 0);
  O.assign(g.size(), 0);
  for (int c = 0; c < g.size(); ++c) {
    if (g.interior(c)) {
      if (p.psi().v[c] > t) O[c] = 1;
    } else if (p.f().v[c] > t) {
      L[c] = 1;
    }
  }
}

LevelSetSolution solve_levelset(const ProblemSpec& problem, double t,
                                int stencil) {
  const Grid2& g = *problem.grid();
  LevelSetProblem ls(problem, t);
  auto pairs = cut_pairs(problem, stencil);

  const auto& cells = g.interior_cells();
  std::vector<int> node_of(g.size(), -1);
  for (int k = 0; k < static_cast<int>(cells.size()); ++k)
    node_of[cells[k]] = k;

  double max_cap = 0.0;
  for (const auto& p : pairs) max_cap = std::max(max_cap, p.w);
  const double big = 1e9 * max_cap;

  MaxFlow mf(static_cast<int>(cells.size()));
  for (const auto& p : pairs) {
    int na = node_of[p.a], nb = node_of[p.b];
    if (na >= 0 && nb >= 0) {
      mf.add_edge(na, nb, p.w);
      mf.add_edge(nb, na, p.w);
    } else if (na >= 0) {
      ls.L[p.b] ? mf.add_source_edge(na, p.w) : mf.add_sink_edge(na, p.w);
    } else if (nb >= 0) {
      ls.L[p.a] ? mf.add_source_edge(nb, p.w) : mf.add_sink_edge(nb, p.w);
    }
  }
  for (int c : cells)
    if (ls.O[c]) mf.add_source_edge(node_of[c], big);

  mf.solve();
  auto side = mf.max_source_side();
  if (mf.cut_crosses_big(side, big))
    throw std::runtime_error("levelset: min cut severed a constraint edge");

  LevelSetSolution out;
  out.set = ScalarField(problem.grid());
  std::vector<std::uint8_t> chi(g.size(), 0);
  for (int c = 0; c < g.size(); ++c) {
    if (g.interior(c))
      chi[c] = side[node_of[c]] ? 1 : 0;
    else
      chi[c] = ls.L[c];
    out.set.v[c] = chi[c];
  }
  out.cut_value = pair_energy(pairs, chi);
  return out;
}

LevelSetSolution brute_levelset(const ProblemSpec& problem, double t) {
  const Grid2& g = *problem.grid();
  LevelSetProblem ls(problem, t);
  auto pairs = cut_pairs(problem, /*stencil=*/4);

  std::vector<int> free_cells;
  for (int c : g.interior_cells())
    if (!ls.O[c]) free_cells.push_back(c);
  const int k = static_cast<int>(free_cells.size());
  if (k > 25)
    throw std::invalid_argument(
        "levelset: exhaustive search limited to 25 free cells");

  std::vector<std::uint8_t> chi(g.size(), 0);
  for (int c = 0; c < g.size(); ++c)
    chi[c] = g.interior(c) ? ls.O[c] : ls.L[c];

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> best_union(g.size(), 0);
  const std::uint64_t total = std::uint64_t{1} << k;
  for (std::uint64_t s = 0; s < total; ++s) {
    for (int b = 0; b < k; ++b) chi[free_cells[b]] = (s >> b) & 1;
    double e = pair_energy(pairs, chi);
    if (e < best) {
      best = e;
      best_union = chi;
    } else if (e == best) {
      // Minimizers form a lattice; the maximal one is their union.
      for (int c = 0; c < g.size(); ++c) best_union[c] |= chi[c];
    }
  }

  LevelSetSolution out;
  out.set = ScalarField(problem.grid());
  for (int c = 0; c < g.size(); ++c) out.set.v[c] = best_union[c];
  out.cut_value = best;
  return out;
}

StackResult stack_levelsets(const ProblemSpec& problem,
                            const std::vector<double>& thresholds,
                            int stencil) {
  if (thresholds.empty())
    throw std::invalid_argument("stack: need at least one threshold");
  for (std::size_t j = 1; j < thresholds.size(); ++j)
    if (!(thresholds[j] > thresholds[j - 1]))
      throw std::invalid_argument("stack: thresholds must strictly increase");

  const Grid2& g = *problem.grid();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int c = 0; c < g.size(); ++c) {
    lo = std::min(lo, problem.f().v[c]);
    hi = std::max(hi, problem.f().v[c]);
    if (g.interior(c) && !problem.obstacle_free(c)) {
      lo = std::min(lo, problem.psi().v[c]);
      hi = std::max(hi, problem.psi().v[c]);
    }
  }

  const int k = static_cast<int>(thresholds.size());
  std::vector<double> slab(k + 1);
  slab[0] = std::min(lo, thresholds.front());
  slab[k] = std::max(hi, thresholds.back());
  for (int j = 1; j < k; ++j)
    slab[j] = 0.5 * (thresholds[j - 1] + thresholds[j]);

  StackResult out;
  out.u = ScalarField(problem.grid(), slab[0]);
  std::vector<std::uint8_t> prev(g.size(), 1);
  for (int j = 0; j < k; ++j) {
    auto sol = solve_levelset(problem, thresholds[j], stencil);
    double w = slab[j + 1] - slab[j];
    for (int c = 0; c < g.size(); ++c) {
      std::uint8_t on = sol.set.v[c] != 0.0;
      if (on && !prev[c]) {
        ++out.nestedness_violations;
        on = 0;  // re-clamp to keep the stack monotone
      }
      prev[c] = on;
      if (on) out.u.v[c] += w;
    }
  }
  return out;
}

NestReport nestedness_check(const std::vector<ScalarField>& sets) {
  NestReport rep;
  for (std::size_t j = 1; j < sets.size(); ++j) {
    int bad = 0;
    for (int c = 0; c < sets[j].size(); ++c)
      if (sets[j].v[c] != 0.0 && sets[j - 1].v[c] == 0.0) ++bad;
    rep.violations_per_pair.push_back(bad);
    rep.total_violations += bad;
  }
  return rep;
}

double stencil_disk_bias(double h) {
  const double radius = 0.35;
  const int n = static_cast<int>(std::lround(1.0 / h)) + 4;
  std::vector<std::uint8_t> chi(n * n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double x = (i + 0.5) * h - 0.5 * n * h;
      double y = (j + 0.5) * h - 0.5 * n * h;
      chi[j * n + i] = x * x + y * y < radius * radius;
    }
  double cut = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int c = j * n + i;
      if (i + 1 < n && chi[c] != chi[c + 1]) cut += kAxis8 * h;
      if (j + 1 < n && chi[c] != chi[c + n]) cut += kAxis8 * h;
      if (i + 1 < n && j + 1 < n && chi[c] != chi[c + n + 1]) cut += kDiag8 * h;
      if (i + 1 < n && j > 0 && chi[c] != chi[c - n + 1]) cut += kDiag8 * h;
    }
  return cut / (2.0 * 3.14159265358979323846 * radius) - 1.0;
}

}  // namespace lgo
