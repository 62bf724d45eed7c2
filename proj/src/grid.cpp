#include "fsl/grid.hpp"

#include <cmath>
#include <string>

#include "fsl/error.hpp"

namespace fsl {

Grid::Grid(int dim, double half_width, std::size_t points)
    : dim_(dim), half_width_(half_width), points_(points) {
  if (dim != 1 && dim != 2) throw Error("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw Error("grid half-width must be positive");
  if (points < 16) throw Error("grid needs at least 16 points per axis");
  if ((points & (points - 1)) != 0) throw Error("points per axis must be a power of two");
}

double Grid::cell_volume() const {
  double dx = spacing();
  return dim_ == 1 ? dx : dx * dx;
}

std::array<double, 2> Grid::position(std::size_t idx) const {
  if (dim_ == 1) return {coord(idx), 0.0};
  return {coord(idx / points_), coord(idx % points_)};
}

}  // namespace fsl
