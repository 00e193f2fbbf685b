#include "lgo/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lgo {

ProblemSpec::ProblemSpec(GridPtr grid, MetricField metric, ScalarField psi,
                         ScalarField f, std::optional<double> holder_alpha)
    : grid_(std::move(grid)),
      metric_(std::move(metric)),
      psi_(std::move(psi)),
      f_(std::move(f)),
      holder_alpha_(holder_alpha) {
  const int n = grid_->size();
  if (metric_.grid().get() != grid_.get())
    throw std::invalid_argument("problem: metric built on a different grid");
  if (psi_.size() != n || f_.size() != n)
    throw std::invalid_argument("problem: field sizes do not match grid");

  double mf = 0.0, mp = 0.0;
  for (int c = 0; c < n; ++c) {
    if (!std::isfinite(f_.v[c]))
      throw std::invalid_argument("problem: datum f must be finite everywhere");
    mf = std::max(mf, std::abs(f_.v[c]));
    if (std::isfinite(psi_.v[c])) mp = std::max(mp, std::abs(psi_.v[c]));
  }
  // -inf obstacle entries count as "no obstacle" and never enter the scale.
  scale_ = std::max({1.0, mf, mp >= 1e11 ? 0.0 : mp});
  big_ = 1e12 * scale_;

  for (int c = 0; c < n; ++c) {
    double p = psi_.v[c];
    if (std::isnan(p)) throw std::invalid_argument("problem: NaN obstacle");
    if (p == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("problem: +inf obstacle");
    if (!std::isfinite(p) || p <= -0.5 * big_) psi_.v[c] = -big_;
  }

  // Hard compatibility on the band; interior f is only the extension and is
  // lifted to stay above the obstacle.
  for (int c = 0; c < n; ++c) {
    switch (grid_->label(c)) {
      case Cell::Boundary:
        if (f_.v[c] < psi_.v[c])
          throw std::invalid_argument(
              "problem: datum below obstacle on the boundary band (f >= psi "
              "required)");
        break;
      case Cell::Interior:
        f_.v[c] = std::max(f_.v[c], psi_.v[c]);
        break;
      case Cell::Exterior:
        break;
    }
  }
}

}  // namespace lgo
