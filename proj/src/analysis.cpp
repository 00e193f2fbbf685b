#include "lgo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lgo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Centered-difference gradient of a grid-wide scalar array with step k cells.
Vec2 centered_grad(const Grid2& g, const std::vector<double>& d, int i, int j,
                   int k) {
  double sc = 1.0 / (2.0 * k * g.h());
  return {(d[g.index(i + k, j)] - d[g.index(i - k, j)]) * sc,
          (d[g.index(i, j + k)] - d[g.index(i, j - k)]) * sc};
}

bool stencil_fits(const Grid2& g, int i, int j, int k) {
  return i - 2 * k >= 0 && i + 2 * k < g.nx() && j - 2 * k >= 0 &&
         j + 2 * k < g.ny();
}

// div of phi_xi(x, grad field) at (i, j) by nested centered differences with
// cell step k. Returns false when a stencil point has a degenerate gradient.
bool div_phigrad(const ProblemSpec& pr, const std::vector<double>& field,
                 int i, int j, int k, double min_grad, double& out) {
  const Grid2& g = *pr.grid();
  const MetricField& m = pr.metric();
  if (!stencil_fits(g, i, j, k)) return false;
  auto vec_at = [&](int ii, int jj, Vec2& v) {
    Vec2 dg = centered_grad(g, field, ii, jj, k);
    if (norm(dg) < std::max(min_grad, 1e3 * m.eps_grad())) return false;
    v = m.grad_xi(g.index(ii, jj), dg);
    return true;
  };
  Vec2 xp, xm, yp, ym;
  if (!vec_at(i + k, j, xp) || !vec_at(i - k, j, xm) ||
      !vec_at(i, j + k, yp) || !vec_at(i, j - k, ym))
    return false;
  out = ((xp.x - xm.x) + (yp.y - ym.y)) / (2.0 * k * g.h());
  return true;
}

}  // namespace

const char* to_string(BarrierVerdict v) {
  switch (v) {
    case BarrierVerdict::Satisfied: return "satisfied";
    case BarrierVerdict::Marginal: return "marginal";
    case BarrierVerdict::Fails: return "fails";
  }
  return "?";
}

ComparisonReport check_comparison(const ProblemSpec& p1, const ProblemSpec& p2,
                                  const ScalarField& u1,
                                  const ScalarField& u2) {
  const Grid2& g = *p1.grid();
  if (p2.grid().get() != p1.grid().get() ||
      u1.grid.get() != p1.grid().get() || u2.grid.get() != p1.grid().get())
    throw std::invalid_argument("compare: problems must share one grid");

  ComparisonReport rep;
  for (const auto& e : g.interface_edges())
    rep.sup_boundary_diff =
        std::max(rep.sup_boundary_diff,
                 std::abs(p1.f().v[e.out_cell] - p2.f().v[e.out_cell]));

  rep.data_ordered = true;
  for (int c = 0; c < g.size(); ++c)
    if (!g.interior(c) && p2.f().v[c] < p1.f().v[c]) {
      rep.data_ordered = false;
      break;
    }

  for (int c : g.interior_cells()) {
    double diff = std::abs(u1.v[c] - u2.v[c]);
    rep.max_excess =
        std::max(rep.max_excess, diff - rep.sup_boundary_diff);
    if (rep.data_ordered)
      rep.max_order_violation =
          std::max(rep.max_order_violation, u1.v[c] - u2.v[c]);
  }
  rep.max_excess = std::max(rep.max_excess, 0.0);
  rep.max_order_violation = std::max(rep.max_order_violation, 0.0);
  return rep;
}

StabilityReport check_stability(const ProblemSpec& problem,
                                const std::vector<ScalarField>& obstacles,
                                SolverParams params) {
  const Grid2& g = *problem.grid();
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    if (obstacles[k].grid.get() != problem.grid().get())
      throw std::invalid_argument("stability: obstacle on a different grid");
    for (int c : g.interior_cells()) {
      if (k > 0 && obstacles[k].v[c] < obstacles[k - 1].v[c])
        throw std::invalid_argument("stability: obstacle sequence not monotone");
      if (obstacles[k].v[c] > problem.psi().v[c] + 1e-12 * problem.field_scale())
        throw std::invalid_argument("stability: obstacle exceeds the limit psi");
    }
  }

  Solution limit = solve_relaxed(problem, params);
  StabilityReport rep;
  const double h2 = g.h() * g.h();
  for (const auto& psi_k : obstacles) {
    ProblemSpec pk(problem.grid(), problem.metric(), psi_k, problem.f(),
                   problem.holder_alpha());
    Solution sk = solve_relaxed(pk, params);
    double d = 0.0;
    for (int c : g.interior_cells()) d += std::abs(sk.u.v[c] - limit.u.v[c]);
    rep.l1_distances.push_back(d * h2);
  }
  rep.monotone = true;
  for (std::size_t k = 1; k < rep.l1_distances.size(); ++k)
    if (rep.l1_distances[k] >
        rep.l1_distances[k - 1] + 1e-10 * problem.field_scale())
      rep.monotone = false;
  rep.final_distance =
      rep.l1_distances.empty() ? 0.0 : rep.l1_distances.back();
  return rep;
}

BarrierConditionReport barrier_condition_check(const ProblemSpec& problem,
                                               int n_samples,
                                               std::uint64_t seed) {
  const Grid2& g = *problem.grid();
  const auto& d = g.signed_distance();

  // One cell inside: the interior endpoints of the interface edges.
  std::vector<int> candidates;
  {
    std::vector<std::uint8_t> seen(g.size(), 0);
    for (const auto& e : g.interface_edges())
      if (!seen[e.in_cell]) {
        seen[e.in_cell] = 1;
        candidates.push_back(e.in_cell);
      }
  }
  std::mt19937_64 rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  if (n_samples > 0 && n_samples < static_cast<int>(candidates.size()))
    candidates.resize(n_samples);

  BarrierConditionReport rep;
  rep.min_value = kInf;
  std::vector<double> values, truncations;
  for (int c : candidates) {
    int i = g.ci(c), j = g.cj(c);
    Vec2 dg = stencil_fits(g, i, j, 1) ? centered_grad(g, d, i, j, 1) : Vec2{};
    if (norm(dg) < 0.5) {
      ++rep.samples_skipped;
      continue;
    }
    double lh = 0.0, l2h = 0.0;
    if (!div_phigrad(problem, d, i, j, 1, 0.25, lh) ||
        !div_phigrad(problem, d, i, j, 2, 0.25, l2h)) {
      ++rep.samples_skipped;
      continue;
    }
    values.push_back(-lh);
    truncations.push_back(std::abs(lh - l2h) / 3.0);
  }

  rep.samples_used = static_cast<int>(values.size());
  if (values.empty()) {
    rep.min_value = 0.0;
    rep.verdict = BarrierVerdict::Marginal;
    return rep;
  }
  std::vector<double> tr = truncations;
  std::nth_element(tr.begin(), tr.begin() + tr.size() / 2, tr.end());
  rep.threshold = 3.0 * tr[tr.size() / 2];

  int positive = 0, negative = 0;
  for (double v : values) {
    rep.min_value = std::min(rep.min_value, v);
    if (v > rep.threshold) ++positive;
    if (v < -rep.threshold) ++negative;
  }
  rep.fraction_positive = static_cast<double>(positive) / values.size();
  double fraction_negative = static_cast<double>(negative) / values.size();
  if (rep.fraction_positive >= 0.95)
    rep.verdict = BarrierVerdict::Satisfied;
  else if (fraction_negative >= 0.05)
    rep.verdict = BarrierVerdict::Fails;
  else
    rep.verdict = BarrierVerdict::Marginal;
  return rep;
}

BarrierBuildReport build_barrier(const ProblemSpec& problem,
                                 const BarrierSpec& spec,
                                 const ScalarField& u) {
  const Grid2& g = *problem.grid();
  if (!(spec.lambda > 2.0 * spec.delta))
    throw std::invalid_argument("barrier: lambda must exceed 2*delta");
  if (!(spec.K > 0.0) || !(spec.alpha > 0.0) || spec.alpha > 1.0)
    throw std::invalid_argument("barrier: need K > 0 and alpha in (0,1]");

  // Nearest cell to x0 must sit on the interface.
  int c0 = -1;
  double best = kInf;
  for (int c = 0; c < g.size(); ++c) {
    double dist = norm(g.center(c) - spec.x0);
    if (dist < best) {
      best = dist;
      c0 = c;
    }
  }
  if (std::abs(g.signed_distance(c0)) > g.h())
    throw std::invalid_argument("barrier: x0 is not on the interface");
  const double f0 = problem.f().v[c0];

  const double sgn = spec.upper ? 1.0 : -1.0;
  const auto& d = g.signed_distance();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  BarrierBuildReport rep;
  rep.w = ScalarField(problem.grid(), nan);
  std::vector<double> wv(g.size(), nan);
  for (int c = 0; c < g.size(); ++c) {
    double v = norm2(g.center(c) - spec.x0) + spec.lambda * d[c];
    if (v > 0.0) wv[c] = sgn * spec.K * std::pow(v, 0.5 * spec.alpha) + f0;
  }

  std::vector<std::uint8_t> patch(g.size(), 0);
  for (int c : g.interior_cells())
    if (norm(g.center(c) - spec.x0) < spec.delta) patch[c] = 1;

  rep.min_grad_norm = kInf;
  rep.max_Lw = -kInf;
  rep.min_Lw = kInf;
  rep.envelope_margin = kInf;
  int lw_cells = 0;

  for (int c = 0; c < g.size(); ++c) {
    if (!patch[c]) continue;
    ++rep.patch_cells;
    rep.w.v[c] = wv[c];
    int i = g.ci(c), j = g.cj(c);

    // Patch rim: cells bordering the sphere part or the domain boundary.
    bool rim = false;
    const int nb[4] = {g.index(i - 1, j), g.index(i + 1, j),
                       g.index(i, j - 1), g.index(i, j + 1)};
    for (int b : nb)
      if (!patch[b]) rim = true;
    if (rim) {
      double margin = sgn * (wv[c] - u.v[c]);
      rep.envelope_margin = std::min(rep.envelope_margin, margin);
      continue;  // operator checks only on the patch core
    }

    bool ok = true;
    for (int b : nb) ok = ok && std::isfinite(wv[b]);
    if (ok && stencil_fits(g, i, j, 1)) {
      Vec2 dw = centered_grad(g, wv, i, j, 1);
      if (finite(dw))
        rep.min_grad_norm = std::min(rep.min_grad_norm, norm(dw));
      double lw;
      if (div_phigrad(problem, wv, i, j, 1, 1e-9, lw)) {
        rep.max_Lw = std::max(rep.max_Lw, lw);
        rep.min_Lw = std::min(rep.min_Lw, lw);
        ++lw_cells;
      }
    }
  }

  if (rep.patch_cells == 0)
    throw std::invalid_argument("barrier: empty patch around x0");
  if (!std::isfinite(rep.envelope_margin)) rep.envelope_margin = 0.0;
  rep.envelope_ok = rep.envelope_margin >= 0.0;
  rep.sign_ok =
      lw_cells > 0 && (spec.upper ? rep.max_Lw < 0.0 : rep.min_Lw > 0.0);
  double v0 = spec.lambda * g.signed_distance(c0);
  rep.value_at_x0 =
      v0 > 0.0 ? sgn * spec.K * std::pow(v0, 0.5 * spec.alpha) + f0 : f0;
  return rep;
}

ModulusReport holder_modulus(const ScalarField& u, double target_exponent,
                             int n_pairs, std::uint64_t seed) {
  const Grid2& g = *u.grid;
  const auto& cells = g.interior_cells();
  ModulusReport rep;
  rep.target = target_exponent;
  if (cells.size() < 2) {
    rep.exponent = kInf;
    rep.meets_target = true;
    return rep;
  }

  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
  for (int c : cells) {
    Vec2 p = g.center(c);
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  double diam = std::hypot(xmax - xmin, ymax - ymin);
  rep.r_min = 4.0 * g.h();
  rep.r_max = diam / 4.0;
  if (rep.r_max <= rep.r_min) rep.r_max = 2.0 * rep.r_min;

  const int n_bins = 12;
  std::vector<double> bin_max(n_bins, 0.0);
  const double log_lo = std::log(rep.r_min), log_hi = std::log(rep.r_max);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  double u_scale = 0.0;
  for (int c : cells) u_scale = std::max(u_scale, std::abs(u.v[c]));

  int used = 0;
  for (int k = 0; k < n_pairs; ++k) {
    int a = cells[pick(rng)], b = cells[pick(rng)];
    double r = norm(g.center(a) - g.center(b));
    if (r < rep.r_min || r > rep.r_max) continue;
    int bin = static_cast<int>((std::log(r) - log_lo) / (log_hi - log_lo) *
                               n_bins);
    bin = std::clamp(bin, 0, n_bins - 1);
    bin_max[bin] = std::max(bin_max[bin], std::abs(u.v[a] - u.v[b]));
    ++used;
  }
  rep.pair_count = used;

  // Envelope fit: log(max |du|) against log(bin center distance).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int bin = 0; bin < n_bins; ++bin) {
    if (bin_max[bin] <= 1e-14 * std::max(u_scale, 1.0)) continue;
    double lr = log_lo + (bin + 0.5) * (log_hi - log_lo) / n_bins;
    double lv = std::log(bin_max[bin]);
    sx += lr;
    sy += lv;
    sxx += lr * lr;
    sxy += lr * lv;
    ++m;
  }
  if (m < 2) {
    rep.exponent = kInf;  // constant field: every modulus holds
    rep.constant = 0.0;
    rep.meets_target = true;
    return rep;
  }
  double denom = m * sxx - sx * sx;
  rep.exponent = (m * sxy - sx * sy) / denom;
  rep.constant = std::exp((sy - rep.exponent * sx) / m);
  rep.meets_target = rep.exponent >= target_exponent - 0.1;
  return rep;
}

}  // namespace lgo
