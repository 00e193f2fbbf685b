#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "lgo/problem.hpp"

namespace lgo {

// Solver engine. Admm (the default) splits the objective with an exact
// sparse factorization of the transport operator and converges to tight
// duality gaps in a few thousand iterations; PrimalDual is the explicit
// Chambolle-Pock saddle-point iteration
//   p <- project_dual_ball(p + sigma * grad u_bar)
//   u <- max(psi, u + tau * div p) on interior, u = f elsewhere
//   u_bar <- u + theta (u - u_prev)
// with exact per-iteration feasibility, kept for step-level diagnostics.
enum class Engine { Admm, PrimalDual };

// tau/sigma/theta apply to the PrimalDual engine and must satisfy
// tau*sigma*|grad|^2 <= 1 with |grad|^2 <= 8/h^2; zeros mean "derive the
// defaults tau = sigma = h/(2*sqrt(2)), theta = 1, max_iters = 50*max(nx,ny)".
struct SolverParams {
  Engine engine = Engine::Admm;
  double tau = 0.0;
  double sigma = 0.0;
  double theta = 1.0;
  int max_iters = 0;
  double tol_gap = 1e-6;
  double tol_change = 0.0;  // optional stagnation exit, 0 disables
  int check_every = 0;      // gap evaluation cadence (default 20 / 32)

  // Test hook, called after each iteration with (iter, u, T); both fields are
  // exactly feasible snapshots regardless of engine.
  std::function<void(int, const ScalarField&, const VectorField&)> on_iterate;
};

struct Solution {
  ScalarField u;
  VectorField T;  // dual field at exit; the structure certificate
  double primal_energy = 0.0;
  double dual_energy = 0.0;
  double gap = 0.0;  // primal - dual of the returned pair
  int iters = 0;
  bool converged = false;

  // (iteration, relative gap) sampled on the doubling schedule.
  std::vector<std::pair<int, double>> gap_history;
};

struct CertificateReport {
  double max_dual_infeasibility = 0.0;     // max (phi0(x,T) - 1)+ on interior
  double max_positive_divergence = 0.0;    // max (div T)+ * h on interior
  double max_divergence_off_contact = 0.0; // max |div T| * h on {u > psi+tol}
  double max_calibration_residual = 0.0;   // |phi(grad u) - T.grad u|/|grad u|
  double boundary_consistency_residual = 0.0;
  double contact_fraction = 0.0;
};

struct CertificateOptions {
  double tol_contact_rel = 1e-3;  // contact set: u <= psi + rel*range(u)
  double grad_floor_rel = 0.1;    // calibration set: |grad u| >= rel*max
  double trace_tol_rel = 1e-3;    // detached edges: |u-f| > rel*range(u)
};

struct MinimalityReport {
  std::vector<double> margins;  // energy(candidate) - energy(solution)
  int skipped_infeasible = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
};

// Solves the relaxed obstacle problem. Returns when the relative gap of the
// best feasible primal/dual pair drops below tol_gap or max_iters is hit;
// `converged` records which. The returned pair always satisfies u >= psi,
// u = f off the interior, and phi0(x,T) <= 1 on the interior. Throws
// std::invalid_argument on bad parameters and std::runtime_error on NaN
// divergence.
Solution solve_relaxed(const ProblemSpec& problem, SolverParams params = {});

// total_variation(u, interior) + boundary_term(u, f); +inf when u < psi
// beyond rounding.
double primal_energy(const ProblemSpec& problem, const ScalarField& u);

// Lagrangian dual value of the discrete saddle at a ball-feasible T:
//   sum_{interior} min over admissible u_c of (-div T) u_c h^2
//   + sum_{edges} h f_out (T.nu)
// Admissible u_c ranges over [psi_c, hi] (obstacle cells) or [lo, hi]
// (obstacle-free cells) with [lo, hi] the data range; truncation to that box
// never increases the energy, so this is an exact lower bound whose obstacle
// term reduces to sum (-div T) psi h^2 once div T <= 0. Returns the -inf
// sentinel when T leaves the dual ball (phi0 > 1 + 1e-6) on the interior.
double dual_energy(const ProblemSpec& problem, const VectorField& T);

CertificateReport extract_certificate(const ProblemSpec& problem,
                                      const Solution& solution,
                                      CertificateOptions opts = {});

// Direct-evaluation optimality spot check against feasible candidates.
MinimalityReport minimality_spotcheck(const ProblemSpec& problem,
                                      const Solution& solution,
                                      const std::vector<ScalarField>& candidates,
                                      double tol = 1e-9);

}  // namespace lgo
