#pragma once

#include <array>
#include <complex>
#include <memory>
#include <vector>

namespace fsl {

using Point = std::array<double, 2>;

/// Far-field data h(x/|x|) together with its smooth reference function phi.
///
/// n = 1: h takes the value mean + amplitude as x -> -inf and
/// mean - amplitude as x -> +inf, and phi(x) = mean - (2a/pi) atan(x/tau).
///
/// n = 2: h is a table of samples on a uniform angular grid, interpreted as
/// its trigonometric interpolant. phi is the fractional heat flow of
/// h(x/|x|) at time tau.
///
/// In both cases phi_tau = P(., tau) * h(./|.|), so phi_{tau+t} is the exact
/// linear evolution of phi_tau and tau = 0 is the discontinuous data itself.
class FarFieldProfile {
 public:
  static FarFieldProfile jump(double amplitude, double mean = 0.0, double scale = 1.0);
  static FarFieldProfile angular(std::vector<double> h_table, double scale = 1.0);
  static FarFieldProfile constant(int dim, double value, double scale = 1.0);

  int dim() const { return dim_; }
  double scale() const { return scale_; }
  FarFieldProfile with_scale(double tau) const;

  /// phi_tau(x).
  double value(const Point& x) const;
  double value(double x) const { return value(Point{x, 0.0}); }
  /// Lambda phi_tau(x); requires tau > 0.
  double lambda_value(const Point& x) const;
  Point gradient(const Point& x) const;
  double laplacian(const Point& x) const;
  /// h(x/|x|); for x = 0 the angular mean.
  double far_value(const Point& x) const;

  double min_value() const { return h_min_; }
  double max_value() const { return h_max_; }
  bool is_constant() const { return h_max_ - h_min_ == 0.0; }

  // n = 1 parameters.
  double amplitude() const { return amplitude_; }
  double mean() const { return mean_; }
  // n = 2 parameters.
  const std::vector<double>& table() const { return table_; }

  bool operator==(const FarFieldProfile& other) const;

 private:
  FarFieldProfile() = default;

  // Mode sum of the n = 2 reference at scaled radius rho = |x|/tau and angle.
  struct Angular {
    std::vector<std::complex<double>> modes;  // hat h_k, k = 0..M/2
    std::size_t table_size = 0;
  };

  double angular_sum(double r_pow_base, double theta, int deriv_theta) const;

  int dim_ = 1;
  double scale_ = 1.0;
  double amplitude_ = 0.0;
  double mean_ = 0.0;
  std::vector<double> table_;
  std::shared_ptr<const Angular> angular_;
  double h_min_ = 0.0;
  double h_max_ = 0.0;
};

}  // namespace fsl
