#pragma once

#include <span>
#include <vector>

#include "fsl/background.hpp"
#include "fsl/field.hpp"

namespace fsl {

/// Normalization c_n of the Poisson kernel, computed by adaptive quadrature
/// of (|x|^2 + 1)^{-(n+1)/2} and checked against 1/pi (n=1), 1/(2 pi) (n=2).
double poisson_constant(int dim);

/// P(x, t) = c_n t (|x|^2 + t^2)^{-(n+1)/2}.
class PoissonKernel {
 public:
  PoissonKernel(int dim, double t);

  int dim() const { return dim_; }
  double time() const { return t_; }
  double operator()(double r) const;
  double operator()(const Point& x) const;
  /// Same kernel summed over all periodic images of period 2X (n = 1 in
  /// closed form, n = 2 by a truncated lattice sum).
  double periodized(const Point& x, double half_width) const;

 private:
  int dim_;
  double t_;
  double c_;
};

double poisson_evaluate(const Point& x, double t, int dim);
inline double poisson_evaluate(double x, double t) { return poisson_evaluate(Point{x, 0.0}, t, 1); }

enum class ImageMode { none, periodic };

/// Real-space quadrature of P(., t) * w0 at the given points: trapezoid sum
/// over the stored samples against the exact kernel. The background, if any,
/// is added in closed form at scale tau + t. Spectrally accurate for t well
/// above the grid spacing; independent of the Fourier route.
std::vector<double> poisson_convolve_at(const Field& samples, double t, std::span<const Point> points,
                                        ImageMode images = ImageMode::none);

/// Full-grid version of `poisson_convolve_at` (quadratic cost).
Field poisson_convolve_quadrature(const Field& samples, double t, ImageMode images = ImageMode::none);

}  // namespace fsl
