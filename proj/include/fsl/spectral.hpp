#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "fsl/field.hpp"
#include "fsl/grid.hpp"

namespace fsl {

using Complex = std::complex<double>;

/// Real-to-complex transforms on a Grid (FFTW plans plus aligned buffers).
/// Not thread-safe; use `FourierTransform::local(grid)` for a per-thread
/// instance.
class FourierTransform {
 public:
  explicit FourierTransform(const Grid& grid);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  static FourierTransform& local(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t spectral_size() const { return spectral_size_; }

  void forward(std::span<const double> in, std::vector<Complex>& out);
  /// Inverse including the 1/N^n normalization.
  void backward(std::span<const Complex> in, std::span<double> out);

  /// Wave vector of spectral index `k` (components along each axis).
  std::array<double, 2> wave_vector(std::size_t k) const;
  /// True for modes on a Nyquist plane, where odd symbols must vanish.
  bool is_nyquist(std::size_t k) const;

 private:
  struct Plans;
  Grid grid_;
  std::size_t spectral_size_;
  std::unique_ptr<Plans> plans_;
};

/// Unnormalized DFT coefficients 0..n/2 of real samples.
std::vector<Complex> real_dft(std::span<const double> samples);

/// Fourier multiplier on a Grid.
class SpectralOperator {
 public:
  enum class Kind { fractional_power, semigroup, custom };

  /// Symbol |xi|^s.
  static SpectralOperator fractional_power(const Grid& grid, double order);
  /// Symbol exp(-t |xi|^s - viscosity t |xi|^2).
  static SpectralOperator semigroup(const Grid& grid, double t, double order, double viscosity = 0.0);

  const Grid& grid() const { return grid_; }
  Kind kind() const { return kind_; }
  double order() const { return order_; }
  std::span<const double> symbol() const { return symbol_; }

  std::vector<double> apply(std::span<const double> values) const;
  void apply_in_place(std::span<double> values) const;

 private:
  SpectralOperator(Grid grid, Kind kind, double order, std::vector<double> symbol)
      : grid_(grid), kind_(kind), order_(order), symbol_(std::move(symbol)) {}

  Grid grid_;
  Kind kind_;
  double order_;
  std::vector<double> symbol_;
};

/// Lambda^s u for s in (0, 2]. The background contributes its exact
/// Lambda phi (only for s = 1). The result carries no background.
Field apply_lambda(const Field& field, double order = 1.0);

/// exp(-t Lambda^s) u. The background is evolved exactly (tau -> tau + t),
/// which requires s = 1.
Field heat_semigroup(const Field& field, double t, double order = 1.0);

/// Spectral partial derivative of periodic samples along `axis`.
std::vector<double> spectral_derivative(const Grid& grid, std::span<const double> values, int axis);

}  // namespace fsl
