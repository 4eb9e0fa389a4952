#include "roadfield/grid.hpp"

#include <cmath>
#include <string>

#include "roadfield/util.hpp"

namespace roadfield {

Grid Grid::build(double X, double Y, double h) {
  if (!(X > 0.0) || !(Y > 0.0) || !(h > 0.0) || !std::isfinite(X) ||
      !std::isfinite(Y) || !std::isfinite(h))
    throw ConfigError("grid: X, Y, h must be finite and > 0");
  const double fx = 2.0 * X / h;
  const double fy = Y / h;
  const double rx = std::round(fx);
  const double ry = std::round(fy);
  if (std::fabs(fx - rx) > 1e-9 * std::max(1.0, fx))
    throw ConfigError("grid: h = " + fmt17(h) + " does not divide 2X = " + fmt17(2 * X));
  if (std::fabs(fy - ry) > 1e-9 * std::max(1.0, fy))
    throw ConfigError("grid: h = " + fmt17(h) + " does not divide Y = " + fmt17(Y));
  Grid g;
  // store the snapped extents (nx*h/2, ny*h) so the cell geometry is exactly
  // consistent even when the inputs were only divisible to the 1e-9 slack
  g.half_width = 0.5 * rx * h;
  g.height = ry * h;
  g.spacing = h;
  g.nx = static_cast<int>(rx);
  g.ny = static_cast<int>(ry);
  if (g.nx < 3) throw ConfigError("grid: need nx >= 3 (got " + std::to_string(g.nx) + ")");
  if (g.ny < 2) throw ConfigError("grid: need ny >= 2 (got " + std::to_string(g.ny) + ")");
  return g;
}

}  // namespace roadfield
