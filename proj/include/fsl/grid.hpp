#pragma once

#include <array>
#include <cstddef>

namespace fsl {

/// Uniform periodic lattice on the box [-X, X)^n, n in {1, 2}.
///
/// Samples sit on the nodes x_i = -X + i*dx, i = 0..N-1, so the origin is a
/// node. Multi-dimensional samples are stored row-major with the last axis
/// fastest.
class Grid {
 public:
  Grid(int dim, double half_width, std::size_t points);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  std::size_t points() const { return points_; }
  double spacing() const { return 2.0 * half_width_ / static_cast<double>(points_); }
  std::size_t size() const { return dim_ == 1 ? points_ : points_ * points_; }
  double cell_volume() const;

  double coord(std::size_t i) const {
    return -half_width_ + static_cast<double>(i) * spacing();
  }
  /// Coordinates of flat sample index `idx`.
  std::array<double, 2> position(std::size_t idx) const;
  std::size_t index(std::size_t i, std::size_t j) const { return i * points_ + j; }

  bool operator==(const Grid& other) const = default;

 private:
  int dim_;
  double half_width_;
  std::size_t points_;
};

}  // namespace fsl
