#pragma once

#include <limits>
#include <span>

#include "fsl/background.hpp"
#include "fsl/field.hpp"

namespace fsl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Wiener amalgam exponents for ||f||_{l^p_k L^q_x} over unit cubes
/// k + (-1/2, 1/2)^n, k in Z^n.
struct AmalgamIndex {
  double p = kInf;  // outer
  double q = 1.0;   // inner
};

/// Midpoint-rule L^q norm of the field's full values on the box.
double lq_norm(const Field& field, double q);
double lq_norm(const Grid& grid, std::span<const double> values, double q);

struct AmalgamResult {
  double norm;
  /// Cubes only partly inside the box.
  int clipped_cubes;
};

/// Amalgam norm. Each sample's cell [x_i - dx/2, x_i + dx/2] is split among
/// the unit cubes it overlaps, so L^p = l^p_k L^p_x holds exactly.
AmalgamResult amalgam_norm_detail(const Grid& grid, std::span<const double> values, AmalgamIndex index);
double amalgam_norm(const Field& field, AmalgamIndex index);
double amalgam_norm(const Grid& grid, std::span<const double> values, AmalgamIndex index);

/// Total variation on R (n = 1). With a background the far-field limits are
/// included; without one the samples are treated as periodic.
double tv_norm(const Field& field);

/// psi(x - x0, t) with psi(x, t) = psi(x - x L t/|x|) for |x| >= L t and 1
/// otherwise. The base bump is radial, equal to 1 on B(radius) and 0 outside
/// B(2 radius), with a C^2 quintic transition.
class MovingWeight {
 public:
  MovingWeight(Point center, double radius = 1.0, double lipschitz = 0.0, double time = 0.0);

  double operator()(const Point& x) const;
  static double base(double r);

  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  double lipschitz() const { return lipschitz_; }
  double time() const { return time_; }
  /// Same bump moved to time t.
  MovingWeight at_time(double t) const { return MovingWeight(center_, radius_, lipschitz_, t); }

 private:
  Point center_;
  double radius_;
  double lipschitz_;
  double time_;
};

double weighted_l1(const Field& field, const MovingWeight& weight);
double weighted_l1(const Grid& grid, std::span<const double> values, const MovingWeight& weight);

/// max |u(x) - u(y)| / |x - y|^alpha over sample pairs with separation at
/// most max_separation (axis-aligned pairs in n = 2).
double holder_seminorm(const Field& field, double alpha, double max_separation);
double holder_seminorm(const Grid& grid, std::span<const double> values, double alpha, double max_separation);

}  // namespace fsl
