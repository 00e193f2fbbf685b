#pragma once

#include <vector>

#include "lgo/problem.hpp"

namespace lgo {

// Binary data of the threshold-t perimeter problem:
//   min P_phi(E; interior) + boundary mismatch
//   s.t. E = L on exterior, E >= O on interior.
struct LevelSetProblem {
  const ProblemSpec* problem;
  double t;
  std::vector<std::uint8_t> L;  // {f > t} on exterior/boundary cells
  std::vector<std::uint8_t> O;  // {psi > t} on interior cells

  LevelSetProblem(const ProblemSpec& p, double threshold);
};

struct LevelSetSolution {
  ScalarField set;   // 0/1 field on the whole grid (exterior = L)
  double cut_value;  // perimeter + boundary mismatch of `set`
};

// Constrained-perimeter minimizer for one threshold via graph min-cut,
// maximal-minimizer tie-breaking. stencil: 4 (exact for ell1-weighted) or
// 8 (calibrated approximation for euclidean-weighted). Throws
// std::invalid_argument on unsupported metric/stencil combinations.
LevelSetSolution solve_levelset(const ProblemSpec& problem, double t,
                                int stencil);

// Exhaustive minimum over the free interior cells (<= 25 of them), maximal
// minimizer (union of all argmins). 4-stencil energy.
LevelSetSolution brute_levelset(const ProblemSpec& problem, double t);

struct StackResult {
  ScalarField u;
  int nestedness_violations = 0;  // cells re-clamped during stacking
};

// Monotone layer-cake reconstruction from the per-threshold sets, midpoint
// slab weights covering the data range. Thresholds must be strictly
// increasing.
StackResult stack_levelsets(const ProblemSpec& problem,
                            const std::vector<double>& thresholds,
                            int stencil);

struct NestReport {
  std::vector<int> violations_per_pair;
  int total_violations = 0;
};

// Counts cells violating E_{t_{j+1}} <= E_{t_j} for sets ordered by
// increasing threshold.
NestReport nestedness_check(const std::vector<ScalarField>& sets);

// Relative perimeter error of the 8-stencil weights on a rasterized disk,
// printed with every euclidean levelset report.
double stencil_disk_bias(double h);

}  // namespace lgo
