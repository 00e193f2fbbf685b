#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgo/problem.hpp"
#include "lgo/solver.hpp"

namespace lgo {

struct ComparisonReport {
  double sup_boundary_diff = 0.0;   // sup over interface of |f1 - f2|
  double max_excess = 0.0;          // max (|u1-u2| - sup_boundary_diff)+
  bool data_ordered = false;        // f2 >= f1 everywhere on the band
  double max_order_violation = 0.0; // max (u1 - u2)+ when data_ordered
};

// Discrete comparison principle between two solved problems sharing grid,
// metric, and obstacle. Throws std::invalid_argument on mismatched grids.
ComparisonReport check_comparison(const ProblemSpec& p1, const ProblemSpec& p2,
                                  const ScalarField& u1, const ScalarField& u2);

struct StabilityReport {
  std::vector<double> l1_distances;  // ||u_k - u||_1 * h^2 per step
  bool monotone = false;
  double final_distance = 0.0;
};

// Solves the problem for each obstacle in the monotone sequence psi_k and for
// the limit obstacle, and measures L1 convergence. The sequence must be
// cellwise non-decreasing and below problem.psi().
StabilityReport check_stability(const ProblemSpec& problem,
                                const std::vector<ScalarField>& obstacles,
                                SolverParams params = {});

enum class BarrierVerdict { Satisfied, Marginal, Fails };

struct BarrierConditionReport {
  int samples_used = 0;
  int samples_skipped = 0;
  double min_value = 0.0;
  double fraction_positive = 0.0;
  double threshold = 0.0;  // 3 * finite-difference truncation estimate
  BarrierVerdict verdict = BarrierVerdict::Marginal;
};

// Evaluates -div(phi_xi(x, grad d)) one cell inside the interface at sampled
// interface points; strictly positive values certify the domain-boundary
// admissibility needed for trace attainment.
BarrierConditionReport barrier_condition_check(const ProblemSpec& problem,
                                               int n_samples,
                                               std::uint64_t seed = 42);

struct BarrierSpec {
  Vec2 x0;             // interface point
  double K = 1.0;      // barrier amplitude
  double lambda = 1.0; // distance-term coefficient, must exceed 2*delta
  double alpha = 1.0;  // Hoelder exponent of the datum, in (0, 1]
  double delta = 0.1;  // patch radius
  bool upper = true;   // w+ (upper) or w- (lower)
};

struct BarrierBuildReport {
  ScalarField w;                 // barrier values on the patch (NaN outside)
  int patch_cells = 0;
  double min_grad_norm = 0.0;    // (iii) |grad w| > 0 on the patch
  bool envelope_ok = false;      // (iv) u on the right side of w on patch rim
  double envelope_margin = 0.0;
  double max_Lw = 0.0;           // (v) sign of the barrier operator
  double min_Lw = 0.0;
  bool sign_ok = false;
  double value_at_x0 = 0.0;      // equals f(x0) by construction
};

// Builds w(x) = +-K * v(x)^{alpha/2} + f(x0), v = |x-x0|^2 + lambda*d(x),
// on B(x0, delta) ∩ Ω and checks its validity clauses numerically against a
// solved field u. Throws std::invalid_argument when lambda <= 2*delta.
BarrierBuildReport build_barrier(const ProblemSpec& problem,
                                 const BarrierSpec& spec, const ScalarField& u);

struct ModulusReport {
  double exponent = 0.0;   // +inf for constant fields
  double constant = 0.0;
  int pair_count = 0;
  double r_min = 0.0, r_max = 0.0;
  bool meets_target = false;
  double target = 0.0;
};

// Empirical Hoelder modulus: log-log fit of per-distance-bin max |u(x)-u(y)|
// over pair distances in [4h, diam/4]; validates exponent >= target - 0.1.
ModulusReport holder_modulus(const ScalarField& u, double target_exponent,
                             int n_pairs = 20000, std::uint64_t seed = 42);

const char* to_string(BarrierVerdict v);

}  // namespace lgo
