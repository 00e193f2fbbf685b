#include "lgo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace lgo {

namespace {

struct LineReader {
  std::istream& in;
  std::string name;
  int lineno = 0;

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(name + ":" + std::to_string(lineno) + ": " + msg);
  }
};

double parse_double(LineReader& r, const std::string& tok, bool allow_inf) {
  if (tok == "-inf" && allow_inf)
    return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size())
    r.fail("bad number '" + tok + "'");
  if (!std::isfinite(v) && !allow_inf) r.fail("non-finite value '" + tok + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

// Reads ny rows of nx numeric tokens (row-major, row j first).
std::vector<double> read_array(LineReader& r, int nx, int ny,
                               const std::string& section, bool allow_inf) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(nx) * ny);
  std::string line;
  for (int j = 0; j < ny; ++j) {
    if (!r.next(line)) r.fail("missing row " + std::to_string(j) +
                              " of section " + section);
    auto toks = split(line);
    if (static_cast<int>(toks.size()) != nx)
      r.fail("section " + section + ": expected " + std::to_string(nx) +
             " values, got " + std::to_string(toks.size()));
    for (const auto& t : toks) out.push_back(parse_double(r, t, allow_inf));
  }
  return out;
}

void expect_section(LineReader& r, const std::string& want) {
  std::string line;
  if (!r.next(line)) r.fail("missing section " + want);
  if (line != want)
    r.fail("expected section '" + want + "', found '" + line + "'");
}

void render_array(std::ostream& os, const std::vector<double>& a, int nx,
                  int ny, bool inf_token) {
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (i) os << ' ';
      double v = a[static_cast<std::size_t>(j) * nx + i];
      if (inf_token && v == -std::numeric_limits<double>::infinity())
        os << "-inf";
      else
        os << render_double(v);
    }
    os << '\n';
  }
}

}  // namespace

std::string render_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ProblemFileData read_problem_stream(std::istream& in, const std::string& name) {
  LineReader r{in, name};
  std::string line;
  if (!r.next(line) || line != "LGP1") r.fail("missing LGP1 magic");

  ProblemFileData d;
  if (!r.next(line)) r.fail("missing grid line");
  {
    auto toks = split(line);
    if (toks.size() != 4 || toks[0] != "grid")
      r.fail("expected 'grid <nx> <ny> <h>'");
    d.nx = std::stoi(toks[1]);
    d.ny = std::stoi(toks[2]);
    d.h = parse_double(r, toks[3], false);
    if (d.nx <= 0 || d.ny <= 0 || d.h <= 0.0)
      r.fail("grid dimensions must be positive");
  }

  if (!r.next(line)) r.fail("missing metric line");
  {
    auto toks = split(line);
    if (toks.size() != 2 || toks[0] != "metric")
      r.fail("expected 'metric <kind>'");
    d.metric_kind = toks[1];
  }
  if (d.metric_kind == "euclidean-weighted" ||
      d.metric_kind == "ell1-weighted") {
    expect_section(r, "weight");
    d.weight = read_array(r, d.nx, d.ny, "weight", false);
  } else if (d.metric_kind == "riemannian") {
    expect_section(r, "m11");
    d.m11 = read_array(r, d.nx, d.ny, "m11", false);
    expect_section(r, "m12");
    d.m12 = read_array(r, d.nx, d.ny, "m12", false);
    expect_section(r, "m22");
    d.m22 = read_array(r, d.nx, d.ny, "m22", false);
  } else {
    r.fail("unknown metric kind '" + d.metric_kind + "'");
  }

  expect_section(r, "mask");
  d.mask.reserve(static_cast<std::size_t>(d.nx) * d.ny);
  for (int j = 0; j < d.ny; ++j) {
    if (!r.next(line)) r.fail("missing row of section mask");
    auto toks = split(line);
    if (static_cast<int>(toks.size()) != d.nx)
      r.fail("mask: expected " + std::to_string(d.nx) + " tokens");
    for (const auto& t : toks) {
      if (t != "I" && t != "E") r.fail("mask token must be I or E, got '" + t + "'");
      d.mask.push_back(t[0]);
    }
  }

  expect_section(r, "f");
  d.f = read_array(r, d.nx, d.ny, "f", false);
  expect_section(r, "psi");
  d.psi = read_array(r, d.nx, d.ny, "psi", true);

  if (r.next(line) && !split(line).empty())
    r.fail("unexpected trailing section '" + line + "'");
  return d;
}

ProblemFileData read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path + ": cannot open");
  return read_problem_stream(in, path);
}

std::string format_problem(const ProblemFileData& d) {
  std::ostringstream os;
  os << "LGP1\n";
  os << "grid " << d.nx << ' ' << d.ny << ' ' << render_double(d.h) << '\n';
  os << "metric " << d.metric_kind << '\n';
  if (d.metric_kind == "riemannian") {
    os << "m11\n";
    render_array(os, d.m11, d.nx, d.ny, false);
    os << "m12\n";
    render_array(os, d.m12, d.nx, d.ny, false);
    os << "m22\n";
    render_array(os, d.m22, d.nx, d.ny, false);
  } else {
    os << "weight\n";
    render_array(os, d.weight, d.nx, d.ny, false);
  }
  os << "mask\n";
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i < d.nx; ++i) {
      if (i) os << ' ';
      os << d.mask[static_cast<std::size_t>(j) * d.nx + i];
    }
    os << '\n';
  }
  os << "f\n";
  render_array(os, d.f, d.nx, d.ny, false);
  os << "psi\n";
  render_array(os, d.psi, d.nx, d.ny, true);
  return os.str();
}

void write_problem_file(const std::string& path, const ProblemFileData& d) {
  std::ofstream out(path);
  if (!out) throw parse_error(path + ": cannot open for writing");
  out << format_problem(d);
}

ProblemSpec to_problem(const ProblemFileData& d) {
  std::vector<std::uint8_t> interior(d.mask.size());
  for (std::size_t c = 0; c < d.mask.size(); ++c)
    interior[c] = d.mask[c] == 'I';
  auto grid = Grid2::create(d.nx, d.ny, d.h, std::move(interior));

  MetricField metric =
      d.metric_kind == "euclidean-weighted"
          ? MetricField::euclidean_weighted(grid, d.weight)
          : d.metric_kind == "ell1-weighted"
                ? MetricField::ell1_weighted(grid, d.weight)
                : MetricField::riemannian(grid, d.m11, d.m12, d.m22);

  ScalarField psi(grid), f(grid);
  psi.v = d.psi;
  f.v = d.f;
  return ProblemSpec(grid, std::move(metric), std::move(psi), std::move(f));
}

ProblemFileData from_problem(const ProblemSpec& p) {
  const Grid2& g = *p.grid();
  ProblemFileData d;
  d.nx = g.nx();
  d.ny = g.ny();
  d.h = g.h();
  switch (p.metric().kind()) {
    case MetricKind::EuclideanWeighted:
      d.metric_kind = "euclidean-weighted";
      d.weight = p.metric().weight();
      break;
    case MetricKind::Ell1Weighted:
      d.metric_kind = "ell1-weighted";
      d.weight = p.metric().weight();
      break;
    case MetricKind::Riemannian:
      d.metric_kind = "riemannian";
      d.m11 = p.metric().m11();
      d.m12 = p.metric().m12();
      d.m22 = p.metric().m22();
      break;
  }
  d.mask.resize(g.size());
  for (int c = 0; c < g.size(); ++c) d.mask[c] = g.interior(c) ? 'I' : 'E';
  d.f = p.f().v;
  d.psi.resize(g.size());
  for (int c = 0; c < g.size(); ++c)
    d.psi[c] = p.obstacle_free(c) ? -std::numeric_limits<double>::infinity()
                                  : p.psi().v[c];
  return d;
}

SolutionFileData read_solution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path + ": cannot open");
  LineReader r{in, path};
  std::string line;
  if (!r.next(line) || line != "LGS1") r.fail("missing LGS1 magic");

  SolutionFileData d;
  if (!r.next(line)) r.fail("missing grid line");
  {
    auto toks = split(line);
    if (toks.size() != 4 || toks[0] != "grid")
      r.fail("expected 'grid <nx> <ny> <h>'");
    d.nx = std::stoi(toks[1]);
    d.ny = std::stoi(toks[2]);
    d.h = parse_double(r, toks[3], false);
  }
  expect_section(r, "u");
  d.u = read_array(r, d.nx, d.ny, "u", false);
  expect_section(r, "Tx");
  d.tx = read_array(r, d.nx, d.ny, "Tx", false);
  expect_section(r, "Ty");
  d.ty = read_array(r, d.nx, d.ny, "Ty", false);

  if (!r.next(line)) r.fail("missing footer");
  auto toks = split(line);
  if (toks.size() != 5) r.fail("footer must have 5 key=value entries");
  auto kv = [&](const std::string& tok, const std::string& key) {
    if (tok.rfind(key + "=", 0) != 0)
      r.fail("footer: expected '" + key + "=', found '" + tok + "'");
    return tok.substr(key.size() + 1);
  };
  d.energy = parse_double(r, kv(toks[0], "energy"), true);
  d.dual = parse_double(r, kv(toks[1], "dual"), true);
  d.gap = parse_double(r, kv(toks[2], "gap"), true);
  d.iters = std::stol(kv(toks[3], "iters"));
  std::string conv = kv(toks[4], "converged");
  if (conv != "0" && conv != "1") r.fail("converged must be 0 or 1");
  d.converged = conv == "1";
  return d;
}

std::string format_solution(const SolutionFileData& d) {
  std::ostringstream os;
  os << "LGS1\n";
  os << "grid " << d.nx << ' ' << d.ny << ' ' << render_double(d.h) << '\n';
  os << "u\n";
  render_array(os, d.u, d.nx, d.ny, false);
  os << "Tx\n";
  render_array(os, d.tx, d.nx, d.ny, false);
  os << "Ty\n";
  render_array(os, d.ty, d.nx, d.ny, false);
  os << "energy=" << render_double(d.energy) << " dual="
     << render_double(d.dual) << " gap=" << render_double(d.gap)
     << " iters=" << d.iters << " converged=" << (d.converged ? 1 : 0)
     << '\n';
  return os.str();
}

void write_solution_file(const std::string& path, const SolutionFileData& d) {
  std::ofstream out(path);
  if (!out) throw parse_error(path + ": cannot open for writing");
  out << format_solution(d);
}

SolutionFileData from_solution(const ProblemSpec& problem, const Solution& s) {
  const Grid2& g = *problem.grid();
  SolutionFileData d;
  d.nx = g.nx();
  d.ny = g.ny();
  d.h = g.h();
  d.u = s.u.v;
  d.tx = s.T.x;
  d.ty = s.T.y;
  d.energy = s.primal_energy;
  d.dual = s.dual_energy;
  d.gap = s.gap;
  d.iters = s.iters;
  d.converged = s.converged;
  return d;
}

}  // namespace lgo
