#pragma once

#include <optional>
#include <vector>

#include "lgo/grid.hpp"
#include "lgo/metric.hpp"

namespace lgo {

// Obstacle least-gradient instance: grid + metric + obstacle psi + datum f.
//
// f is defined on all cells (the exterior extension carries the Dirichlet
// datum); psi uses -BIG for "no obstacle". Construction enforces f >= psi on
// the boundary band (compatibility) and lifts f to max(f, psi) on interior
// cells, where its value is never used by the solver.
class ProblemSpec {
 public:
  ProblemSpec(GridPtr grid, MetricField metric, ScalarField psi, ScalarField f,
              std::optional<double> holder_alpha = std::nullopt);

  const GridPtr& grid() const { return grid_; }
  const MetricField& metric() const { return metric_; }
  const ScalarField& psi() const { return psi_; }
  const ScalarField& f() const { return f_; }
  std::optional<double> holder_alpha() const { return holder_alpha_; }

  // Sentinel for obstacle-free cells: -1e12 * field scale.
  double big() const { return big_; }
  bool obstacle_free(int c) const { return psi_.v[c] <= -0.5 * big_; }

  // max(1, max|f|, max|finite psi|): the scale used for -BIG and tolerances.
  double field_scale() const { return scale_; }

 private:
  GridPtr grid_;
  MetricField metric_;
  ScalarField psi_;
  ScalarField f_;
  std::optional<double> holder_alpha_;
  double big_ = 1e12;
  double scale_ = 1.0;
};

}  // namespace lgo
