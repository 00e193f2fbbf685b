#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lgo/vec.hpp"

namespace lgo {

class MetricField;

// Cell classification. BOUNDARY cells are exterior cells 4-adjacent to an
// interior cell; Dirichlet data are pinned on EXTERIOR ∪ BOUNDARY.
enum class Cell : std::uint8_t { Interior = 0, Exterior = 1, Boundary = 2 };

// An interface edge between an interior cell and an exterior (boundary-band)
// neighbor. `home` is the min-side cell of the forward-difference pair; the
// dual flux for this edge is the `dir` component of the vector field at
// `home`, and `sign` orients it along the discrete outer normal.
struct InterfaceEdge {
  int home;      // cell storing the difference/flux component
  int in_cell;   // interior endpoint
  int out_cell;  // exterior endpoint
  int dir;       // 0 = x, 1 = y
  int sign;      // +1: exterior at home+dir, -1: exterior at home
};

// Rectangular cell-centered lattice covering [0, nx*h] x [0, ny*h].
// Cell (i, j) has center ((i+0.5)h, (j+0.5)h) and flat index j*nx + i.
class Grid2 {
 public:
  // `interior` holds true for interior cells; everything else is exterior.
  // Boundary labels, the interface edge list, and the signed distance are
  // derived here. Interior cells must form one 4-connected component and
  // must not touch the lattice edge.
  static std::shared_ptr<const Grid2> create(int nx, int ny, double h,
                                             std::vector<std::uint8_t> interior);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  int size() const { return nx_ * ny_; }

  int index(int i, int j) const { return j * nx_ + i; }
  int ci(int c) const { return c % nx_; }
  int cj(int c) const { return c / nx_; }
  Vec2 center(int c) const {
    return {(ci(c) + 0.5) * h_, (cj(c) + 0.5) * h_};
  }

  Cell label(int c) const { return labels_[c]; }
  bool interior(int c) const { return labels_[c] == Cell::Interior; }
  bool pinned(int c) const { return labels_[c] != Cell::Interior; }

  // Forward-difference pair (c, c+dir) exists and touches the interior.
  bool active_x(int c) const { return active_[c] & 1; }
  bool active_y(int c) const { return active_[c] & 2; }
  int arity(int c) const { return (active_[c] & 1) + ((active_[c] >> 1) & 1); }

  const std::vector<int>& interior_cells() const { return interior_cells_; }
  const std::vector<InterfaceEdge>& interface_edges() const { return edges_; }

  // Signed distance to the interior/exterior interface, positive inside.
  double signed_distance(int c) const { return sdist_[c]; }
  const std::vector<double>& signed_distance() const { return sdist_; }

  double domain_area() const { return interior_cells_.size() * h_ * h_; }

 private:
  Grid2() = default;
  void build(std::vector<std::uint8_t> interior);
  void compute_signed_distance();

  int nx_ = 0, ny_ = 0;
  double h_ = 1.0;
  std::vector<Cell> labels_;
  std::vector<std::uint8_t> active_;  // bit 0: x-pair active, bit 1: y-pair
  std::vector<int> interior_cells_;
  std::vector<InterfaceEdge> edges_;
  std::vector<double> sdist_;
};

using GridPtr = std::shared_ptr<const Grid2>;

struct ScalarField {
  GridPtr grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), v(grid->size(), fill) {}

  double& operator[](int c) { return v[c]; }
  double operator[](int c) const { return v[c]; }
  int size() const { return static_cast<int>(v.size()); }
};

struct VectorField {
  GridPtr grid;
  std::vector<double> x, y;

  VectorField() = default;
  explicit VectorField(GridPtr g, Vec2 fill = {})
      : grid(std::move(g)), x(grid->size(), fill.x), y(grid->size(), fill.y) {}

  Vec2 at(int c) const { return {x[c], y[c]}; }
  void set(int c, Vec2 p) {
    x[c] = p.x;
    y[c] = p.y;
  }
  int size() const { return static_cast<int>(x.size()); }
};

// Region selector for energy sums.
enum class Region { Interior, All };

// Forward differences (u[i+1,j]-u[i,j])/h, (u[i,j+1]-u[i,j])/h, zero at the
// far lattice edge.
VectorField grad(const ScalarField& u);

// Negative adjoint of grad: <grad u, p> + <u, div p> = 0 exactly.
ScalarField div(const VectorField& p);

// Discrete anisotropic total variation: sum of h^2 * phi(x, grad u) over the
// region.
double total_variation(const MetricField& metric, const ScalarField& u,
                       Region region);

// phi-perimeter of a binary field: total_variation of the indicator.
// Throws std::invalid_argument on non-binary input.
double perimeter(const MetricField& metric, const ScalarField& indicator,
                 Region region);

// Relaxed Dirichlet penalty: sum over interface edges of
// h * phi(home, e_dir) * |u_in - f_out|.
double boundary_term(const MetricField& metric, const ScalarField& u,
                     const ScalarField& f);

}  // namespace lgo
