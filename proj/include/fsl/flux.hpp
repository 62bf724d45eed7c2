#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fsl {

enum class Smoothness { smooth, c1alpha, lipschitz };

/// Flux f: R -> R^n of the conservation law. Every component is the same
/// scalar function times a per-axis weight, which covers the presets used
/// here (Burgers along an axis, linear transport, polynomial fluxes).
class FluxFunction {
 public:
  using Scalar = std::function<double(double)>;

  static FluxFunction zero(int dim = 1);
  /// f(u) = u^2/2 along each axis with a nonzero weight.
  static FluxFunction burgers(std::vector<double> axis_weights = {1.0});
  /// f(u) = c u.
  static FluxFunction linear(std::vector<double> velocity);
  /// f(u) = sum_j coeffs[j] u^j (n = 1).
  static FluxFunction polynomial(std::vector<double> coeffs);
  /// f(u) = |u|, Lipschitz only.
  static FluxFunction absolute();
  /// f(u) = |u| u / 2, C^{1,1}.
  static FluxFunction half_abs_square();
  /// Preset lookup: zero, burgers, linear, abs, half_abs_square, cubic.
  static FluxFunction preset(const std::string& name, int dim = 1);

  int dim() const { return static_cast<int>(weights_.size()); }
  const std::string& name() const { return name_; }
  Smoothness smoothness() const { return smoothness_; }
  bool is_zero() const { return is_zero_; }

  double value(double u, int axis = 0) const { return weights_[axis] * f_(u); }
  double derivative(double u, int axis = 0) const { return weights_[axis] * df_(u); }
  double axis_weight(int axis) const { return weights_[axis]; }

  /// sup_{|u| <= m} |f'(u)| over all components.
  double lipschitz_on(double m) const;
  /// Whether every component is convex on [-m, m].
  bool convex_on(double m) const;
  /// Solution of f_axis'(u) = speed when the derivative inverse is known in
  /// closed form.
  std::optional<double> critical_point(double speed, int axis = 0) const;

 private:
  FluxFunction() = default;

  std::string name_;
  Scalar f_;
  Scalar df_;
  Scalar d2f_;
  std::function<std::optional<double>(double)> inverse_df_;
  std::vector<double> weights_;
  Smoothness smoothness_ = Smoothness::smooth;
  bool is_zero_ = false;
};

/// Flux from a text spec: a preset name, "linear:c1[,c2]" or
/// "poly:c0,c1,..." (coefficients of increasing degree, n = 1).
FluxFunction parse_flux(const std::string& spec, int dim = 1);

}  // namespace fsl
