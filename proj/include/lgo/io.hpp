#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lgo/problem.hpp"
#include "lgo/solver.hpp"

namespace lgo {

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Token-level image of an LGP1 problem file. Kept separate from ProblemSpec
// so write(read(file)) reproduces the token stream exactly.
struct ProblemFileData {
  int nx = 0, ny = 0;
  double h = 0.0;
  std::string metric_kind;            // euclidean-weighted|ell1-weighted|riemannian
  std::vector<double> weight;         // weighted kinds
  std::vector<double> m11, m12, m22;  // riemannian
  std::vector<char> mask;             // 'I' / 'E'
  std::vector<double> f;
  std::vector<double> psi;            // may hold -inf
};

ProblemFileData read_problem_file(const std::string& path);
ProblemFileData read_problem_stream(std::istream& in, const std::string& name);
void write_problem_file(const std::string& path, const ProblemFileData& data);
std::string format_problem(const ProblemFileData& data);

ProblemSpec to_problem(const ProblemFileData& data);
ProblemFileData from_problem(const ProblemSpec& problem);

struct SolutionFileData {
  int nx = 0, ny = 0;
  double h = 0.0;
  std::vector<double> u, tx, ty;
  double energy = 0.0, dual = 0.0, gap = 0.0;
  long iters = 0;
  bool converged = false;
};

SolutionFileData read_solution_file(const std::string& path);
void write_solution_file(const std::string& path, const SolutionFileData& data);
std::string format_solution(const SolutionFileData& data);

SolutionFileData from_solution(const ProblemSpec& problem, const Solution& sol);

// %.17g rendering used for every float token (round-trip exact).
std::string render_double(double v);

}  // namespace lgo
