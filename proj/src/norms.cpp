#include "fsl/norms.hpp"

#include <algorithm>
#include <cmath>

#include "fsl/error.hpp"

namespace fsl {

namespace {

void check_size(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw Error("sample count does not match the grid");
}

double power_sum(double acc, double value, double q) {
  return acc + std::pow(std::abs(value), q);
}

struct Overlap {
  int cube;
  double length;
};

// For every node along one axis, the unit cubes its cell meets and the length
// of each intersection. Node 0's cell straddles -X; its left half wraps to X.
std::vector<std::vector<Overlap>> axis_overlaps(const Grid& grid, int& cube_min, int& cube_count,
                                                int& clipped) {
  const double X = grid.half_width();
  const double dx = grid.spacing();
  cube_min = static_cast<int>(std::floor(-X + 0.5));
  int cube_max = static_cast<int>(std::floor(X + 0.5));
  if (cube_max + 0.5 > X && std::abs(cube_max - 0.5 - X) < 1e-12) --cube_max;
  cube_count = cube_max - cube_min + 1;
  clipped = 0;
  for (int k = cube_min; k <= cube_max; ++k)
    if (k - 0.5 < -X - 1e-12 || k + 0.5 > X + 1e-12) ++clipped;

  std::vector<std::vector<Overlap>> out(grid.points());
  auto add = [&](std::size_t i, double a, double b) {
    for (int k = static_cast<int>(std::floor(a + 0.5)); k <= static_cast<int>(std::floor(b + 0.5)); ++k) {
      double len = std::min(b, k + 0.5) - std::max(a, k - 0.5);
      if (len > 1e-14 * dx) out[i].push_back({std::clamp(k, cube_min, cube_max) - cube_min, len});
    }
  };
  for (std::size_t i = 0; i < grid.points(); ++i) {
    double x = grid.coord(i);
    if (i == 0) {
      add(i, -X, -X + 0.5 * dx);
      add(i, X - 0.5 * dx, X);
    } else {
      add(i, x - 0.5 * dx, x + 0.5 * dx);
    }
  }
  return out;
}

}  // namespace

double lq_norm(const Grid& grid, std::span<const double> values, double q) {
  check_size(grid, values);
  if (!(q >= 1.0)) throw Error("Lebesgue exponent must be at least 1");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (double v : values) acc = power_sum(acc, v, q);
  return std::pow(acc * grid.cell_volume(), 1.0 / q);
}

double lq_norm(const Field& field, double q) {
  if (!field.has_background()) return lq_norm(field.grid(), field.values(), q);
  auto total = field.total_values();
  return lq_norm(field.grid(), total, q);
}

AmalgamResult amalgam_norm_detail(const Grid& grid, std::span<const double> values, AmalgamIndex index) {
  check_size(grid, values);
  const double p = index.p, q = index.q;
  if (!(p >= 1.0) || !(q >= 1.0)) throw Error("amalgam exponents must be at least 1");
  int cube_min = 0, count = 0, clipped = 0;
  auto ov = axis_overlaps(grid, cube_min, count, clipped);
  const std::size_t n = grid.points();
  const bool q_inf = std::isinf(q);

  std::size_t cubes = grid.dim() == 1 ? count : static_cast<std::size_t>(count) * count;
  std::vector<double> local(cubes, 0.0);
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& o : ov[i]) {
        double a = std::abs(values[i]);
        local[o.cube] = q_inf ? std::max(local[o.cube], a) : local[o.cube] + o.length * std::pow(a, q);
      }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double a = std::abs(values[grid.index(i, j)]);
        double aq = q_inf ? a : std::pow(a, q);
        for (const auto& oi : ov[i])
          for (const auto& oj : ov[j]) {
            double& slot = local[static_cast<std::size_t>(oi.cube) * count + oj.cube];
            slot = q_inf ? std::max(slot, a) : slot + oi.length * oj.length * aq;
          }
      }
  }
  if (!q_inf)
    for (double& l : local) l = std::pow(l, 1.0 / q);

  double norm = 0.0;
  if (std::isinf(p)) {
    for (double l : local) norm = std::max(norm, l);
  } else {
    for (double l : local) norm += std::pow(l, p);
    norm = std::pow(norm, 1.0 / p);
  }
  int clipped_total = grid.dim() == 1 ? clipped : count * count - (count - clipped) * (count - clipped);
  return {norm, clipped_total};
}

double amalgam_norm(const Grid& grid, std::span<const double> values, AmalgamIndex index) {
  return amalgam_norm_detail(grid, values, index).norm;
}

double amalgam_norm(const Field& field, AmalgamIndex index) {
  if (!field.has_background()) return amalgam_norm(field.grid(), field.values(), index);
  auto total = field.total_values();
  return amalgam_norm(field.grid(), total, index);
}

double tv_norm(const Field& field) {
  if (field.grid().dim() != 1) throw Error("total variation is implemented for n = 1 only");
  const auto v = field.total_values();
  const std::size_t n = v.size();
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) tv += std::abs(v[i + 1] - v[i]);
  if (field.has_background()) {
    const auto& bg = *field.background();
    tv += std::abs(v.front() - bg.far_value(Point{-1.0, 0.0}));
    tv += std::abs(v.back() - bg.far_value(Point{1.0, 0.0}));
  } else {
    tv += std::abs(v.front() - v.back());
  }
  return tv;
}

MovingWeight::MovingWeight(Point center, double radius, double lipschitz, double time)
    : center_(center), radius_(radius), lipschitz_(lipschitz), time_(time) {
  if (!(radius > 0.0)) throw Error("weight radius must be positive");
  if (!(lipschitz >= 0.0) || !(time >= 0.0)) throw Error("weight speed and time must be nonnegative");
}

double MovingWeight::base(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  double s = r - 1.0;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double MovingWeight::operator()(const Point& x) const {
  double r = std::hypot(x[0] - center_[0], x[1] - center_[1]);
  double shifted = std::max(r - lipschitz_ * time_, 0.0);
  return base(shifted / radius_);
}

double weighted_l1(const Grid& grid, std::span<const double> values, const MovingWeight& weight) {
  check_size(grid, values);
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double w = weight(grid.position(i));
    if (w != 0.0) acc += w * std::abs(values[i]);
  }
  return acc * grid.cell_volume();
}

double weighted_l1(const Field& field, const MovingWeight& weight) {
  if (!field.has_background()) return weighted_l1(field.grid(), field.values(), weight);
  auto total = field.total_values();
  return weighted_l1(field.grid(), total, weight);
}

double holder_seminorm(const Grid& grid, std::span<const double> values, double alpha, double max_separation) {
  check_size(grid, values);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("Holder exponent must lie in (0, 1]");
  const double dx = grid.spacing();
  const std::size_t n = grid.points();
  std::size_t reach = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::floor(max_separation / dx + 1e-9)));
  if (reach == 0) throw Error("Holder separation is below the grid spacing");
  std::vector<double> weight(reach + 1);
  for (std::size_t m = 1; m <= reach; ++m) weight[m] = std::pow(m * dx, -alpha);
  double best = 0.0;
  auto scan_line = [&](auto at) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t m = 1; m <= reach && i + m < n; ++m)
        best = std::max(best, std::abs(at(i + m) - at(i)) * weight[m]);
  };
  if (grid.dim() == 1) {
    scan_line([&](std::size_t i) { return values[i]; });
  } else {
    for (std::size_t r = 0; r < n; ++r) {
      scan_line([&](std::size_t j) { return values[grid.index(r, j)]; });
      scan_line([&](std::size_t i) { return values[grid.index(i, r)]; });
    }
  }
  return best;
}

double holder_seminorm(const Field& field, double alpha, double max_separation) {
  if (!field.has_background()) return holder_seminorm(field.grid(), field.values(), alpha, max_separation);
  auto total = field.total_values();
  return holder_seminorm(field.grid(), total, alpha, max_separation);
}

}  // namespace fsl
