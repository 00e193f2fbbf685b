#include "lgo/solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lgo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SolverParams fill_defaults(const ProblemSpec& problem, SolverParams p) {
  const Grid2& g = *problem.grid();
  double h = g.h();
  if (p.tau <= 0.0) p.tau = h / (2.0 * std::sqrt(2.0));
  if (p.sigma <= 0.0) p.sigma = h / (2.0 * std::sqrt(2.0));
  if (p.max_iters <= 0) p.max_iters = 50 * std::max(g.nx(), g.ny());
  if (p.check_every <= 0)
    p.check_every = p.engine == Engine::Admm ? 20 : 32;
  // Operator-norm bound for the forward-difference stencil: |grad|^2 <= 8/h^2.
  if (p.engine == Engine::PrimalDual &&
      p.tau * p.sigma * 8.0 / (h * h) > 1.0 + 1e-12)
    throw std::invalid_argument(
        "solver: step sizes violate tau*sigma*8/h^2 <= 1");
  if (p.theta < 0.0 || p.theta > 1.0)
    throw std::invalid_argument("solver: theta must lie in [0, 1]");
  return p;
}

void data_range(const ProblemSpec& problem, double& lo, double& hi) {
  const Grid2& g = *problem.grid();
  lo = kInf;
  hi = -kInf;
  for (int c = 0; c < g.size(); ++c) {
    lo = std::min(lo, problem.f().v[c]);
    hi = std::max(hi, problem.f().v[c]);
    if (g.interior(c) && !problem.obstacle_free(c)) {
      lo = std::min(lo, problem.psi().v[c]);
      hi = std::max(hi, problem.psi().v[c]);
    }
  }
}

double interface_flux_pairing(const ProblemSpec& problem,
                              const VectorField& T) {
  double flux = 0.0;
  for (const auto& e : problem.grid()->interface_edges()) {
    double comp = e.dir == 0 ? T.x[e.home] : T.y[e.home];
    flux += problem.f().v[e.out_cell] * (e.sign > 0 ? comp : -comp);
  }
  return problem.grid()->h() * flux;
}

// Tracks the best feasible primal/dual pair seen so far. "Best within slack"
// refreshes the stored field with the most recent candidate, so the returned
// certificate reflects the settled iterates rather than an early lucky one.
struct PairTracker {
  // Envelope extremes and the stored pair. The stored fields are refreshed by
  // any candidate within a small slack of the envelope, so the returned
  // certificate reflects settled iterates, and stored_* stay exact for them.
  double envelope_primal = kInf;
  double envelope_dual = -kInf;
  double stored_primal = kInf;
  double stored_dual = -kInf;
  ScalarField u;
  VectorField T;
  double scale;
  double rel_slack;

  PairTracker(double field_scale, double tol_gap)
      : scale(field_scale), rel_slack(std::max(1e-12, 0.05 * tol_gap)) {}

  void offer_primal(double value, const ScalarField& cand) {
    double slack = rel_slack * std::max(std::abs(envelope_primal), scale);
    if (value <= envelope_primal + slack) {
      stored_primal = value;
      u = cand;
    }
    envelope_primal = std::min(envelope_primal, value);
  }
  void offer_dual(double value, const VectorField& cand) {
    if (value == -kInf) return;
    double slack = rel_slack * std::max(std::abs(envelope_dual), scale);
    if (value >= envelope_dual - slack) {
      stored_dual = value;
      T = cand;
    }
    envelope_dual = std::max(envelope_dual, value);
  }
  double rel_gap() const {
    if (stored_primal == stored_dual) return 0.0;
    if (stored_dual == -kInf || stored_primal == kInf) return kInf;
    double denom = std::max(
        {std::abs(stored_primal), std::abs(stored_dual), 1e-12 * scale});
    return (stored_primal - stored_dual) / denom;
  }
};

// Recomputes the reported energies from the returned pair so the Solution is
// exactly self-consistent with its own fields.
void finalize(const ProblemSpec& problem, const PairTracker& best,
              double tol_gap, int iters, Solution& sol) {
  sol.iters = iters;
  sol.u = best.u;
  sol.T = best.T;
  sol.primal_energy = primal_energy(problem, sol.u);
  sol.dual_energy = dual_energy(problem, sol.T);
  double denom = std::max({std::abs(sol.primal_energy),
                           std::abs(sol.dual_energy),
                           1e-12 * problem.field_scale()});
  sol.gap = sol.dual_energy == -kInf
                ? kInf
                : sol.primal_energy - sol.dual_energy;
  sol.converged = sol.primal_energy == sol.dual_energy ||
                  (std::isfinite(sol.gap) && sol.gap / denom <= tol_gap);
}

// ---------------------------------------------------------------------------
// Explicit saddle-point engine.

void cp_dual_step(const ProblemSpec& pr, const ScalarField& ubar,
                  VectorField& p, double sigma) {
  const Grid2& g = *pr.grid();
  const MetricField& m = pr.metric();
  const int nx = g.nx(), n = g.size();
  const double inv_h = 1.0 / g.h();
  for (int c = 0; c < n; ++c) {
    int ar = g.arity(c);
    if (ar == 0) continue;
    bool ax = g.active_x(c), ay = g.active_y(c);
    double px = ax ? p.x[c] + sigma * (ubar.v[c + 1] - ubar.v[c]) * inv_h : 0.0;
    double py =
        ay ? p.y[c] + sigma * (ubar.v[c + nx] - ubar.v[c]) * inv_h : 0.0;
    if (ar == 2) {
      Vec2 q = m.project_dual_ball(c, {px, py});
      p.x[c] = q.x;
      p.y[c] = q.y;
    } else if (ax) {
      double r = m.axis_weight(c, 0);
      p.x[c] = std::clamp(px, -r, r);
      p.y[c] = 0.0;
    } else {
      double r = m.axis_weight(c, 1);
      p.x[c] = 0.0;
      p.y[c] = std::clamp(py, -r, r);
    }
  }
}

Solution solve_primal_dual(const ProblemSpec& problem,
                           const SolverParams& params) {
  const Grid2& g = *problem.grid();
  const auto& interior = g.interior_cells();
  const int nx = g.nx();
  const double inv_h = 1.0 / g.h();

  ScalarField u = problem.f();
  VectorField p(problem.grid());
  ScalarField ubar = u, u_prev = u;

  PairTracker best(problem.field_scale(), params.tol_gap);
  best.offer_primal(primal_energy(problem, u), u);
  best.offer_dual(dual_energy(problem, p), p);

  Solution sol;
  int next_doubling = 1;
  int iter = 0;
  for (iter = 1; iter <= params.max_iters; ++iter) {
    cp_dual_step(problem, ubar, p, params.sigma);

    u_prev.v = u.v;
    double max_change = 0.0;
    for (int c : interior) {
      double dx = p.x[c] - p.x[c - 1];
      double dy = p.y[c] - p.y[c - nx];
      double nu = u.v[c] + params.tau * (dx + dy) * inv_h;
      nu = std::max(nu, problem.psi().v[c]);
      max_change = std::max(max_change, std::abs(nu - u.v[c]));
      u.v[c] = nu;
    }
    for (int c = 0; c < g.size(); ++c) {
      double extr = u.v[c] + params.theta * (u.v[c] - u_prev.v[c]);
      if (std::isnan(extr))
        throw std::runtime_error("solver: NaN detected at iteration " +
                                 std::to_string(iter));
      ubar.v[c] = extr;
    }

    if (params.on_iterate) params.on_iterate(iter, u, p);

    bool at_doubling = iter == next_doubling;
    if (at_doubling) next_doubling *= 2;
    if (!at_doubling && iter % params.check_every != 0 &&
        iter != params.max_iters)
      continue;

    best.offer_primal(primal_energy(problem, u), u);
    best.offer_dual(dual_energy(problem, p), p);
    if (at_doubling) sol.gap_history.emplace_back(iter, best.rel_gap());
    if (best.rel_gap() <= params.tol_gap) break;
    if (params.tol_change > 0.0 &&
        max_change <= params.tol_change * problem.field_scale())
      break;
  }

  finalize(problem, best, params.tol_gap, std::min(iter, params.max_iters),
           sol);
  return sol;
}

// ---------------------------------------------------------------------------
// Splitting engine: alternating minimization of
//   F(q) + G(z) + coupling{q = Ax + b, z = x}
// with F the per-cell metric cost of the masked differences, G the obstacle
// indicator, and x the interior unknowns (pinned cells folded into b). The
// x-step solves a fixed SPD system (factored once); the q-step projects onto
// the dual ball, which yields a ball-feasible certificate at every iteration.

class AdmmEngine {
 public:
  AdmmEngine(const ProblemSpec& pr, double relax)
      : p_(pr), g_(*pr.grid()), relax_(relax), q_(pr.grid()), wq_(pr.grid()),
        T_(pr.grid()) {
    const int n = g_.size(), nx = g_.nx();
    const double inv_h = 1.0 / g_.h();
    kappa_ = 1.0 / (g_.h() * g_.h());
    idx_.assign(n, -1);
    const auto& cells = g_.interior_cells();
    const int ni = static_cast<int>(cells.size());
    for (int k = 0; k < ni; ++k) idx_[cells[k]] = k;

    Eigen::SparseMatrix<double> M(ni, ni);
    std::vector<Eigen::Triplet<double>> tr;
    std::vector<double> diag(ni, kappa_);
    auto add_pair = [&](int a, int b) {
      int ia = idx_[a], ib = idx_[b];
      if (ia >= 0) diag[ia] += inv_h * inv_h;
      if (ib >= 0) diag[ib] += inv_h * inv_h;
      if (ia >= 0 && ib >= 0) {
        tr.push_back({ia, ib, -inv_h * inv_h});
        tr.push_back({ib, ia, -inv_h * inv_h});
      }
    };
    for (int c = 0; c < n; ++c) {
      if (g_.active_x(c)) add_pair(c, c + 1);
      if (g_.active_y(c)) add_pair(c, c + nx);
    }
    for (int k = 0; k < ni; ++k) tr.push_back({k, k, diag[k]});
    M.setFromTriplets(tr.begin(), tr.end());
    chol_.compute(M);
    if (chol_.info() != Eigen::Success)
      throw std::runtime_error("solver: factorization of the transport system "
                               "failed");

    x_.resize(ni);
    z_.resize(ni);
    wz_.assign(ni, 0.0);
    for (int k = 0; k < ni; ++k) x_[k] = p_.f().v[cells[k]];
    for (int k = 0; k < ni; ++k)
      z_[k] = std::max(x_[k], p_.psi().v[cells[k]]);
    for (int c = 0; c < n; ++c) {
      q_.x[c] = g_.active_x(c) ? (val(c + 1) - val(c)) * inv_h : 0.0;
      q_.y[c] = g_.active_y(c) ? (val(c + nx) - val(c)) * inv_h : 0.0;
    }
  }

  double val(int c) const { return idx_[c] >= 0 ? x_[idx_[c]] : p_.f().v[c]; }

  // One sweep; returns the max interior change of x.
  double iterate() {
    const int n = g_.size(), nx = g_.nx();
    const double inv_h = 1.0 / g_.h(), h = g_.h();
    const auto& cells = g_.interior_cells();
    const int ni = static_cast<int>(cells.size());

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
    auto accumulate = [&](int a, int b, double target) {
      int ia = idx_[a], ib = idx_[b];
      double pinned = 0.0;
      if (ia < 0) pinned -= p_.f().v[a] * inv_h;
      if (ib < 0) pinned += p_.f().v[b] * inv_h;
      double t = target - pinned;
      if (ib >= 0) rhs[ib] += t * inv_h;
      if (ia >= 0) rhs[ia] -= t * inv_h;
    };
    for (int c = 0; c < n; ++c) {
      if (g_.active_x(c)) accumulate(c, c + 1, q_.x[c] - wq_.x[c]);
      if (g_.active_y(c)) accumulate(c, c + nx, q_.y[c] - wq_.y[c]);
    }
    for (int k = 0; k < ni; ++k) rhs[k] += kappa_ * (z_[k] - wz_[k]);
    Eigen::VectorXd x_new = chol_.solve(rhs);
    double max_change = 0.0;
    for (int k = 0; k < ni; ++k)
      max_change = std::max(max_change, std::abs(x_new[k] - x_[k]));
    x_ = x_new;

    const double lam = h * h;  // prox threshold; the dual scale is 1
    const MetricField& m = p_.metric();
    for (int c = 0; c < n; ++c) {
      int ar = g_.arity(c);
      if (ar == 0) continue;
      double ax = g_.active_x(c) ? (val(c + 1) - val(c)) * inv_h : 0.0;
      double ay = g_.active_y(c) ? (val(c + nx) - val(c)) * inv_h : 0.0;
      double hx = relax_ * ax + (1.0 - relax_) * q_.x[c];
      double hy = relax_ * ay + (1.0 - relax_) * q_.y[c];
      double rx = hx + wq_.x[c], ry = hy + wq_.y[c];
      Vec2 t;
      if (ar == 2) {
        t = m.project_dual_ball(c, {rx / lam, ry / lam});
      } else if (g_.active_x(c)) {
        double r = m.axis_weight(c, 0);
        t = {std::clamp(rx / lam, -r, r), 0.0};
      } else {
        double r = m.axis_weight(c, 1);
        t = {0.0, std::clamp(ry / lam, -r, r)};
      }
      T_.x[c] = t.x;
      T_.y[c] = t.y;
      q_.x[c] = rx - lam * t.x;
      q_.y[c] = ry - lam * t.y;
      wq_.x[c] = rx - q_.x[c];
      wq_.y[c] = ry - q_.y[c];
    }
    for (int k = 0; k < ni; ++k) {
      double hz = relax_ * x_[k] + (1.0 - relax_) * z_[k];
      z_[k] = std::max(hz + wz_[k], p_.psi().v[cells[k]]);
      wz_[k] += hz - z_[k];
    }
    return max_change;
  }

  // Feasible primal snapshot.
  ScalarField primal_snapshot() const {
    ScalarField u = p_.f();
    const auto& cells = g_.interior_cells();
    for (int k = 0; k < static_cast<int>(cells.size()); ++k)
      u.v[cells[k]] = std::max(x_[k], p_.psi().v[cells[k]]);
    return u;
  }
  const VectorField& certificate() const { return T_; }

 private:
  const ProblemSpec& p_;
  const Grid2& g_;
  double relax_;
  double kappa_ = 1.0;
  std::vector<int> idx_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol_;
  Eigen::VectorXd x_;
  VectorField q_, wq_, T_;
  std::vector<double> z_, wz_;
};

Solution solve_admm(const ProblemSpec& problem, const SolverParams& params) {
  const Grid2& g = *problem.grid();
  const auto& cells = g.interior_cells();
  AdmmEngine engine(problem, /*relax=*/1.8);

  // Trailing-window iterate averages: convex combinations of feasible
  // iterates stay feasible and cancel the oscillating modes.
  ScalarField usum(problem.grid());
  VectorField tsum(problem.grid());
  long count = 0;
  int window_start = 0;

  PairTracker best(problem.field_scale(), params.tol_gap);
  {
    ScalarField u0 = engine.primal_snapshot();
    best.offer_primal(primal_energy(problem, u0), u0);
    best.offer_dual(dual_energy(problem, engine.certificate()),
                    engine.certificate());
  }

  Solution sol;
  int next_doubling = 1;
  int iter = 0;
  for (iter = 1; iter <= params.max_iters; ++iter) {
    double max_change = engine.iterate();
    if (!std::isfinite(max_change))
      throw std::runtime_error("solver: NaN detected at iteration " +
                               std::to_string(iter));

    if (iter == 2 * std::max(window_start, 50)) {
      std::fill(usum.v.begin(), usum.v.end(), 0.0);
      std::fill(tsum.x.begin(), tsum.x.end(), 0.0);
      std::fill(tsum.y.begin(), tsum.y.end(), 0.0);
      count = 0;
      window_start = iter;
    }
    {
      const ScalarField& uf = engine.primal_snapshot();
      for (int c = 0; c < g.size(); ++c) usum.v[c] += uf.v[c];
      const VectorField& tc = engine.certificate();
      for (int c = 0; c < g.size(); ++c) {
        tsum.x[c] += tc.x[c];
        tsum.y[c] += tc.y[c];
      }
      ++count;
      if (params.on_iterate) params.on_iterate(iter, uf, tc);
    }

    bool at_doubling = iter == next_doubling;
    if (at_doubling) next_doubling *= 2;
    if (!at_doubling && iter % params.check_every != 0 &&
        iter != params.max_iters)
      continue;

    ScalarField u_last = engine.primal_snapshot();
    best.offer_primal(primal_energy(problem, u_last), u_last);
    best.offer_dual(dual_energy(problem, engine.certificate()),
                    engine.certificate());
    if (count > 0) {
      ScalarField u_avg(problem.grid());
      for (int c = 0; c < g.size(); ++c) u_avg.v[c] = usum.v[c] / count;
      for (int c : cells)
        u_avg.v[c] = std::max(u_avg.v[c], problem.psi().v[c]);
      VectorField t_avg(problem.grid());
      for (int c = 0; c < g.size(); ++c) {
        t_avg.x[c] = tsum.x[c] / count;
        t_avg.y[c] = tsum.y[c] / count;
      }
      best.offer_primal(primal_energy(problem, u_avg), u_avg);
      best.offer_dual(dual_energy(problem, t_avg), t_avg);
    }

    if (at_doubling) sol.gap_history.emplace_back(iter, best.rel_gap());
    if (best.rel_gap() <= params.tol_gap) break;
    if (params.tol_change > 0.0 &&
        max_change <= params.tol_change * problem.field_scale())
      break;
  }

  finalize(problem, best, params.tol_gap, std::min(iter, params.max_iters),
           sol);
  return sol;
}

}  // namespace

double primal_energy(const ProblemSpec& problem, const ScalarField& u) {
  const Grid2& g = *problem.grid();
  const double feas_tol = 1e-12 * problem.field_scale();
  for (int c : g.interior_cells())
    if (u.v[c] < problem.psi().v[c] - feas_tol) return kInf;
  return total_variation(problem.metric(), u, Region::Interior) +
         boundary_term(problem.metric(), u, problem.f());
}

double dual_energy(const ProblemSpec& problem, const VectorField& T) {
  const Grid2& g = *problem.grid();
  const MetricField& m = problem.metric();
  const double h2 = g.h() * g.h();

  ScalarField dv = div(T);
  double lo, hi;
  data_range(problem, lo, hi);

  double obstacle_sum = 0.0;
  for (int c : g.interior_cells()) {
    if (m.dual_eval(c, T.at(c)) > 1.0 + 1e-6) return -kInf;
    double d = dv.v[c];
    double floor = problem.obstacle_free(c) ? lo : problem.psi().v[c];
    obstacle_sum += std::min(-d * floor, -d * hi);
  }
  return h2 * obstacle_sum + interface_flux_pairing(problem, T);
}

Solution solve_relaxed(const ProblemSpec& problem, SolverParams params) {
  params = fill_defaults(problem, params);
  return params.engine == Engine::Admm ? solve_admm(problem, params)
                                       : solve_primal_dual(problem, params);
}

CertificateReport extract_certificate(const ProblemSpec& problem,
                                      const Solution& solution,
                                      CertificateOptions opts) {
  const Grid2& g = *problem.grid();
  const MetricField& m = problem.metric();
  const ScalarField& u = solution.u;
  const VectorField& T = solution.T;
  const double h = g.h();

  double u_lo = kInf, u_hi = -kInf;
  for (int c : g.interior_cells()) {
    u_lo = std::min(u_lo, u.v[c]);
    u_hi = std::max(u_hi, u.v[c]);
  }
  const double range = std::max(u_hi - u_lo, 1e-12 * problem.field_scale());
  const double tol_contact = opts.tol_contact_rel * range;
  const double trace_tol = opts.trace_tol_rel * range;

  CertificateReport rep;
  ScalarField dv = div(T);
  VectorField du = grad(u);

  double grad_max = 0.0;
  for (int c : g.interior_cells()) grad_max = std::max(grad_max, norm(du.at(c)));
  const double grad_floor =
      std::max(opts.grad_floor_rel * grad_max, m.eps_grad());

  int contact = 0;
  for (int c : g.interior_cells()) {
    rep.max_dual_infeasibility = std::max(rep.max_dual_infeasibility,
                                          m.dual_eval(c, T.at(c)) - 1.0);
    rep.max_positive_divergence =
        std::max(rep.max_positive_divergence, dv.v[c] * h);
    bool on_contact = u.v[c] <= problem.psi().v[c] + tol_contact;
    if (on_contact) ++contact;
    if (!on_contact)
      rep.max_divergence_off_contact =
          std::max(rep.max_divergence_off_contact, std::abs(dv.v[c]) * h);
    double gn = norm(du.at(c));
    if (gn >= grad_floor)
      rep.max_calibration_residual =
          std::max(rep.max_calibration_residual,
                   std::abs(m.eval(c, du.at(c)) - dot(T.at(c), du.at(c))) / gn);
  }
  rep.max_dual_infeasibility = std::max(rep.max_dual_infeasibility, 0.0);
  rep.max_positive_divergence = std::max(rep.max_positive_divergence, 0.0);
  rep.contact_fraction =
      g.interior_cells().empty()
          ? 0.0
          : static_cast<double>(contact) / g.interior_cells().size();

  for (const auto& e : g.interface_edges()) {
    double ui = u.v[e.in_cell], fo = problem.f().v[e.out_cell];
    if (std::abs(ui - fo) <= trace_tol) continue;
    if (u.v[e.in_cell] <= problem.psi().v[e.in_cell] + tol_contact) continue;
    double flux = e.dir == 0 ? T.x[e.home] : T.y[e.home];
    if (e.sign < 0) flux = -flux;
    double want = m.axis_weight(e.home, e.dir) * (fo > ui ? 1.0 : -1.0);
    rep.boundary_consistency_residual =
        std::max(rep.boundary_consistency_residual, std::abs(want - flux));
  }
  return rep;
}

MinimalityReport minimality_spotcheck(const ProblemSpec& problem,
                                      const Solution& solution,
                                      const std::vector<ScalarField>& candidates,
                                      double tol) {
  MinimalityReport rep;
  const Grid2& g = *problem.grid();
  const double base = primal_energy(problem, solution.u);
  const double feas_tol = std::max(tol, 1e-12 * problem.field_scale());
  for (const auto& cand : candidates) {
    bool feasible = cand.size() == g.size();
    if (feasible)
      for (int c = 0; c < g.size(); ++c) {
        if (g.interior(c)) {
          if (cand.v[c] < problem.psi().v[c] - feas_tol) feasible = false;
        } else if (std::abs(cand.v[c] - problem.f().v[c]) > feas_tol) {
          feasible = false;
        }
        if (!feasible) break;
      }
    if (!feasible) {
      ++rep.skipped_infeasible;
      continue;
    }
    double margin = primal_energy(problem, cand) - base;
    rep.margins.push_back(margin);
    rep.worst_margin = std::min(rep.worst_margin, margin);
  }
  if (rep.margins.empty()) rep.worst_margin = 0.0;
  return rep;
}

}  // namespace lgo
