// lgo: solve and verify anisotropic obstacle least-gradient problems on 2-D
// grids, cross-check against the level-set cut oracle, and run the
// comparison / barrier / modulus diagnostics.
//
// Exit codes: 0 ok, 1 input error, 2 non-convergence, 3 certificate failure,
// 4 barrier-condition failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lgo/analysis.hpp"
#include "lgo/io.hpp"
#include "lgo/levelset.hpp"
#include "lgo/solver.hpp"

namespace {

using namespace lgo;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNoConvergence = 2;
constexpr int kCertificateFailure = 3;
constexpr int kBarrierFailure = 4;

void write_binary_field(const std::string& path, const ScalarField& field) {
  std::ofstream out(path);
  if (!out) throw parse_error(path + ": cannot open for writing");
  const Grid2& g = *field.grid;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i) out << ' ';
      out << (field.v[g.index(i, j)] != 0.0 ? 1 : 0);
    }
    out << '\n';
  }
}

int cmd_solve(const std::string& problem_path, const std::string& out_path,
              int max_iters, double tol, double tau, double sigma) {
  ProblemSpec problem = to_problem(read_problem_file(problem_path));
  SolverParams params;
  params.max_iters = max_iters;
  params.tol_gap = tol;
  params.tau = tau;
  params.sigma = sigma;
  Solution sol = solve_relaxed(problem, params);
  write_solution_file(out_path, from_solution(problem, sol));
  std::cout << "energy=" << render_double(sol.primal_energy)
            << " dual=" << render_double(sol.dual_energy)
            << " gap=" << render_double(sol.gap) << " iters=" << sol.iters
            << " converged=" << (sol.converged ? 1 : 0) << "\n";
  return sol.converged ? kOk : kNoConvergence;
}

int cmd_verify(const std::string& problem_path, const std::string& sol_path,
               double tol_contact, double tol_dualinf, double tol_div,
               double tol_calib, double tol_boundary) {
  ProblemSpec problem = to_problem(read_problem_file(problem_path));
  SolutionFileData sd = read_solution_file(sol_path);
  const Grid2& g = *problem.grid();
  if (sd.nx != g.nx() || sd.ny != g.ny() || sd.h != g.h())
    throw parse_error("verify: solution grid does not match problem grid");

  Solution sol;
  sol.u = ScalarField(problem.grid());
  sol.u.v = sd.u;
  sol.T = VectorField(problem.grid());
  sol.T.x = sd.tx;
  sol.T.y = sd.ty;

  CertificateOptions opts;
  if (tol_contact > 0.0) opts.tol_contact_rel = tol_contact;
  CertificateReport rep = extract_certificate(problem, sol, opts);

  std::cout << "dual_infeasibility=" << render_double(rep.max_dual_infeasibility)
            << "\npositive_divergence=" << render_double(rep.max_positive_divergence)
            << "\ndivergence_off_contact=" << render_double(rep.max_divergence_off_contact)
            << "\ncalibration_residual=" << render_double(rep.max_calibration_residual)
            << "\nboundary_residual=" << render_double(rep.boundary_consistency_residual)
            << "\ncontact_fraction=" << render_double(rep.contact_fraction) << "\n";

  bool ok = rep.max_dual_infeasibility <= tol_dualinf &&
            rep.max_positive_divergence <= tol_div &&
            rep.max_divergence_off_contact <= tol_div &&
            rep.max_calibration_residual <= tol_calib &&
            rep.boundary_consistency_residual <= tol_boundary;
  std::cout << "certificate=" << (ok ? "pass" : "fail") << "\n";
  return ok ? kOk : kCertificateFailure;
}

int cmd_levelset(const std::string& problem_path, double t, int stencil,
                 const std::string& out_path) {
  ProblemSpec problem = to_problem(read_problem_file(problem_path));
  LevelSetSolution sol = solve_levelset(problem, t, stencil);
  int cells = 0;
  for (double v : sol.set.v) cells += v != 0.0;
  std::cout << "t=" << render_double(t) << "\nstencil=" << stencil
            << "\ncut_value=" << render_double(sol.cut_value)
            << "\ncells=" << cells << "\n";
  if (problem.metric().kind() == MetricKind::EuclideanWeighted)
    std::cout << "stencil_disk_bias="
              << render_double(stencil_disk_bias(problem.grid()->h())) << "\n";
  if (!out_path.empty()) write_binary_field(out_path, sol.set);
  return kOk;
}

int cmd_stack(const std::string& problem_path, const std::string& thresholds,
              int stencil, const std::string& out_path) {
  ProblemSpec problem = to_problem(read_problem_file(problem_path));
  std::vector<double> ts;
  std::stringstream ss(thresholds);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    ts.push_back(std::stod(tok));
  }
  StackResult res = stack_levelsets(problem, ts, stencil);
  std::cout << "thresholds=" << ts.size()
            << "\nnestedness_violations=" << res.nestedness_violations << "\n";
  if (!out_path.empty()) {
    SolutionFileData d;
    d.nx = problem.grid()->nx();
    d.ny = problem.grid()->ny();
    d.h = problem.grid()->h();
    d.u = res.u.v;
    d.tx.assign(d.u.size(), 0.0);
    d.ty.assign(d.u.size(), 0.0);
    d.energy = primal_energy(problem, res.u);
    d.dual = 0.0;
    d.gap = 0.0;
    d.iters = 0;
    d.converged = true;
    write_solution_file(out_path, d);
  }
  return kOk;
}

int cmd_compare(const std::string& path1, const std::string& path2,
                int max_iters, double tol) {
  ProblemFileData d1 = read_problem_file(path1);
  ProblemFileData d2 = read_problem_file(path2);
  if (d1.nx != d2.nx || d1.ny != d2.ny || d1.h != d2.h ||
      d1.metric_kind != d2.metric_kind || d1.mask != d2.mask ||
      d1.psi != d2.psi)
    throw parse_error("compare: problems must share grid, metric, and psi");
  ProblemSpec p1 = to_problem(d1);
  ProblemSpec p2(p1.grid(), p1.metric(),
                 [&] {
                   ScalarField psi(p1.grid());
                   psi.v = d2.psi;
                   return psi;
                 }(),
                 [&] {
                   ScalarField f(p1.grid());
                   f.v = d2.f;
                   return f;
                 }());

  SolverParams params;
  params.max_iters = max_iters;
  params.tol_gap = tol;
  Solution s1 = solve_relaxed(p1, params);
  Solution s2 = solve_relaxed(p2, params);
  ComparisonReport rep = check_comparison(p1, p2, s1.u, s2.u);

  // Data Lipschitz estimate from the band, scaling the h-tolerance.
  const Grid2& g = *p1.grid();
  double lip = 0.0;
  for (const auto& e : g.interface_edges())
    for (const auto* f : {&p1.f(), &p2.f()})
      lip = std::max(lip, std::abs(f->v[e.in_cell] - f->v[e.out_cell]) / g.h());
  double tol_cmp = 5.0 * g.h() * std::max(lip, 1.0);

  std::cout << "sup_boundary_diff=" << render_double(rep.sup_boundary_diff)
            << "\nmax_excess=" << render_double(rep.max_excess)
            << "\ndata_ordered=" << (rep.data_ordered ? 1 : 0)
            << "\nmax_order_violation=" << render_double(rep.max_order_violation)
            << "\ntolerance=" << render_double(tol_cmp) << "\n";
  bool ok = rep.max_excess <= tol_cmp &&
            (!rep.data_ordered || rep.max_order_violation <= tol_cmp);
  std::cout << "comparison=" << (ok ? "pass" : "fail") << "\n";
  return ok ? kOk : kCertificateFailure;
}

int cmd_barrier_check(const std::string& problem_path, int samples,
                      std::uint64_t seed) {
  ProblemSpec problem = to_problem(read_problem_file(problem_path));
  BarrierConditionReport rep = barrier_condition_check(problem, samples, seed);
  std::cout << "samples_used=" << rep.samples_used
            << "\nsamples_skipped=" << rep.samples_skipped
            << "\nmin_value=" << render_double(rep.min_value)
            << "\nfraction_positive=" << render_double(rep.fraction_positive)
            << "\nthreshold=" << render_double(rep.threshold)
            << "\nverdict=" << to_string(rep.verdict) << "\n";
  return rep.verdict == BarrierVerdict::Satisfied ? kOk : kBarrierFailure;
}

int cmd_modulus(const std::string& problem_path, double alpha, int samples,
                std::uint64_t seed, int max_iters, double tol) {
  ProblemSpec problem = to_problem(read_problem_file(problem_path));
  SolverParams params;
  params.max_iters = max_iters;
  params.tol_gap = tol;
  Solution sol = solve_relaxed(problem, params);
  ModulusReport rep = holder_modulus(sol.u, alpha, samples, seed);
  std::cout << "exponent=" << render_double(rep.exponent)
            << "\nconstant=" << render_double(rep.constant)
            << "\npair_count=" << rep.pair_count
            << "\nr_min=" << render_double(rep.r_min)
            << "\nr_max=" << render_double(rep.r_max)
            << "\ntarget=" << render_double(rep.target)
            << "\nmeets_target=" << (rep.meets_target ? 1 : 0) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic obstacle least-gradient solver and verifier"};
  app.require_subcommand(1);

  std::string problem_path, problem2_path, solution_path, out_path;
  std::string thresholds;
  int max_iters = 0, stencil = 4, samples = 64, pair_samples = 20000;
  double tol = 1e-6, tau = 0.0, sigma = 0.0, t = 0.5, alpha = 0.5;
  double tol_contact = 0.0;
  double tol_dualinf = 1e-6, tol_div = 1e-3, tol_calib = 1e-2,
         tol_boundary = 1e-2;
  std::uint64_t seed = 42;

  auto* solve = app.add_subcommand("solve", "solve the relaxed problem");
  solve->add_option("--problem", problem_path)->required();
  solve->add_option("--out", out_path)->required();
  solve->add_option("--max-iters", max_iters);
  solve->add_option("--tol", tol);
  solve->add_option("--tau", tau);
  solve->add_option("--sigma", sigma);

  auto* verify = app.add_subcommand("verify", "check the structure certificate");
  verify->add_option("--problem", problem_path)->required();
  verify->add_option("--solution", solution_path)->required();
  verify->add_option("--tol-contact", tol_contact);
  verify->add_option("--tol-dual-infeasibility", tol_dualinf);
  verify->add_option("--tol-divergence", tol_div);
  verify->add_option("--tol-calibration", tol_calib);
  verify->add_option("--tol-boundary", tol_boundary);

  auto* levelset = app.add_subcommand("levelset", "one threshold cut oracle");
  levelset->add_option("--problem", problem_path)->required();
  levelset->add_option("--t", t)->required();
  levelset->add_option("--stencil", stencil)->check(CLI::IsMember({4, 8}));
  levelset->add_option("--out", out_path);

  auto* stack = app.add_subcommand("stack", "layer-cake reconstruction");
  stack->add_option("--problem", problem_path)->required();
  stack->add_option("--thresholds", thresholds)->required();
  stack->add_option("--stencil", stencil)->check(CLI::IsMember({4, 8}));
  stack->add_option("--out", out_path);

  auto* compare = app.add_subcommand("compare", "comparison principle check");
  compare->add_option("--problem", problem_path)->required();
  compare->add_option("--problem2", problem2_path)->required();
  compare->add_option("--max-iters", max_iters);
  compare->add_option("--tol", tol);

  auto* barrier = app.add_subcommand("barrier-check", "boundary admissibility");
  barrier->add_option("--problem", problem_path)->required();
  barrier->add_option("--samples", samples);
  barrier->add_option("--seed", seed);

  auto* modulus = app.add_subcommand("modulus", "empirical Hoelder exponent");
  modulus->add_option("--problem", problem_path)->required();
  modulus->add_option("--alpha", alpha)->required();
  modulus->add_option("--samples", pair_samples);
  modulus->add_option("--seed", seed);
  modulus->add_option("--max-iters", max_iters);
  modulus->add_option("--tol", tol);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return cmd_solve(problem_path, out_path, max_iters, tol, tau, sigma);
    if (verify->parsed())
      return cmd_verify(problem_path, solution_path, tol_contact, tol_dualinf,
                        tol_div, tol_calib, tol_boundary);
    if (levelset->parsed())
      return cmd_levelset(problem_path, t, stencil, out_path);
    if (stack->parsed())
      return cmd_stack(problem_path, thresholds, stencil, out_path);
    if (compare->parsed())
      return cmd_compare(problem_path, problem2_path, max_iters, tol);
    if (barrier->parsed()) return cmd_barrier_check(problem_path, samples, seed);
    if (modulus->parsed())
      return cmd_modulus(problem_path, alpha, pair_samples, seed, max_iters,
                         tol);
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
