#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fsl/background.hpp"
#include "fsl/flux.hpp"
#include "fsl/grid.hpp"

namespace fsl {

/// Real samples on a Grid. When a background is attached the field stands for
/// the non-decaying function phi + v and the stored samples are v.
class Field {
 public:
  Field(Grid grid, std::vector<double> values, std::optional<FarFieldProfile> background = std::nullopt,
        double time = 0.0);

  static Field zeros(const Grid& grid, std::optional<FarFieldProfile> background = std::nullopt,
                     double time = 0.0);
  template <class F>
  static Field sample(const Grid& grid, F&& fn, std::optional<FarFieldProfile> background = std::nullopt,
                      double time = 0.0) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.position(i));
    return Field(grid, std::move(v), std::move(background), time);
  }

  const Grid& grid() const { return grid_; }
  /// Stored samples: the perturbation v when a background is present.
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }
  const std::optional<FarFieldProfile>& background() const { return background_; }
  bool has_background() const { return background_.has_value(); }
  double time() const { return time_; }

  /// phi(x_i) + v_i, or v_i without background.
  double total(std::size_t i) const;
  std::vector<double> total_values() const;
  /// Full function as a background-free field.
  Field flattened() const;
  Field with_time(double t) const;
  Field with_values(std::vector<double> values) const;

  /// sup |v| over the outer 10% of the box (decay diagnostic).
  double boundary_annulus_sup() const;
  double sup_norm() const;

 private:
  Grid grid_;
  std::vector<double> values_;
  std::optional<FarFieldProfile> background_;
  double time_;
};

/// Vector-valued samples (one array per component).
struct VectorField {
  Grid grid;
  std::vector<std::vector<double>> components;
  double sup_norm() const;
};

/// u0 = phi + v0 for shock-like data.
Field make_shock_data(const Grid& grid, const FarFieldProfile& profile, std::vector<double> perturbation);

struct RescaleResult {
  Field field;
  /// Fraction of target points whose source point lies inside the box.
  double coverage;
};

/// Slice of u_lambda(x, t) = u(lambda x, lambda t): given u(., T) returns
/// u(lambda ., T) as the slice at time T/lambda, resampled by band-limited
/// interpolation. The background scale transforms as tau -> tau/lambda.
RescaleResult rescale(const Field& u, double lambda, std::optional<Grid> target = std::nullopt,
                      double min_coverage = 0.25);

/// g = (f(u) - f(us)) / (u - us), with f'(u) where the difference is below
/// 1e-12 (1 + |u| + |us|).
VectorField g_coefficient(const Field& u, const Field& us, const FluxFunction& f);

/// Band-limited (trigonometric) interpolation of periodic samples at
/// arbitrary points along one axis of length N with spacing dx starting at -X.
std::vector<double> trig_interpolate(std::span<const double> samples, double half_width,
                                     std::span<const double> points);

/// Interpolation error estimate: interpolate from every other sample back to
/// the omitted ones and report the largest mismatch.
double interpolation_tolerance(const Field& field);

}  // namespace fsl
