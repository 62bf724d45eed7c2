#include "fsl/poisson.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "fsl/error.hpp"

namespace fsl {

namespace {

double integrate_constant(int dim) {
  // c_n^{-1} = int_{R^n} (|x|^2+1)^{-(n+1)/2} dx = |S^{n-1}| int_0^inf r^{n-1} (r^2+1)^{-(n+1)/2} dr.
  boost::math::quadrature::exp_sinh<double> integrator;
  double sphere = dim == 1 ? 2.0 : 2.0 * std::numbers::pi;
  auto radial = [dim](double r) { return std::pow(r, dim - 1) * std::pow(r * r + 1.0, -(dim + 1) / 2.0); };
  double value = integrator.integrate(radial, 1e-14);
  return 1.0 / (sphere * value);
}

}  // namespace

double poisson_constant(int dim) {
  static const double c1 = integrate_constant(1);
  static const double c2 = integrate_constant(2);
  static const bool checked = [] {
    if (std::abs(c1 - 1.0 / std::numbers::pi) > 1e-10 || std::abs(c2 - 0.5 / std::numbers::pi) > 1e-10)
      throw Error("Poisson normalization disagrees with its closed form");
    return true;
  }();
  (void)checked;
  if (dim == 1) return c1;
  if (dim == 2) return c2;
  throw Error("Poisson kernel dimension must be 1 or 2");
}

PoissonKernel::PoissonKernel(int dim, double t) : dim_(dim), t_(t), c_(poisson_constant(dim)) {
  if (!(t > 0.0)) throw Error("Poisson kernel needs t > 0");
}

double PoissonKernel::operator()(double r) const {
  double s = r * r + t_ * t_;
  return dim_ == 1 ? c_ * t_ / s : c_ * t_ / (s * std::sqrt(s));
}

double PoissonKernel::operator()(const Point& x) const {
  return (*this)(dim_ == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]));
}

double PoissonKernel::periodized(const Point& x, double half_width) const {
  const double period = 2.0 * half_width;
  if (dim_ == 1) {
    // sum_m (1/pi) t / ((x + m L)^2 + t^2) = (1/L) sinh(a) / (cosh(a) - cos(b)), a = 2 pi t / L, b = 2 pi x / L.
    double a = 2.0 * std::numbers::pi * t_ / period;
    double b = 2.0 * std::numbers::pi * x[0] / period;
    if (a > 30.0) return 1.0 / period;
    return std::sinh(a) / (period * (std::cosh(a) - std::cos(b)));
  }
  const int reach = 6;
  double acc = 0.0;
  for (int i = -reach; i <= reach; ++i)
    for (int j = -reach; j <= reach; ++j) acc += (*this)(Point{x[0] + i * period, x[1] + j * period});
  // Remaining images approximated by the continuum c t / r^3 beyond radius reach*L.
  double r0 = (reach + 0.5) * period;
  acc += 2.0 * std::numbers::pi * c_ * t_ / (r0 * period * period);
  return acc;
}

double poisson_evaluate(const Point& x, double t, int dim) { return PoissonKernel(dim, t)(x); }

std::vector<double> poisson_convolve_at(const Field& samples, double t, std::span<const Point> points,
                                        ImageMode images) {
  const Grid& grid = samples.grid();
  PoissonKernel kernel(grid.dim(), t);
  const double dv = grid.cell_volume();
  const auto values = samples.values();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0.0) support.push_back(i);
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    double acc = 0.0;
    for (std::size_t i : support) {
      auto y = grid.position(i);
      Point d{points[p][0] - y[0], points[p][1] - y[1]};
      double k = images == ImageMode::periodic ? kernel.periodized(d, grid.half_width()) : kernel(d);
      acc += k * values[i];
    }
    out[p] = acc * dv;
    if (samples.background()) {
      auto bg = samples.background()->with_scale(samples.background()->scale() + t);
      out[p] += bg.value(points[p]);
    }
  }
  return out;
}

Field poisson_convolve_quadrature(const Field& samples, double t, ImageMode images) {
  const Grid& grid = samples.grid();
  std::vector<Point> pts(grid.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = grid.position(i);
  auto values = poisson_convolve_at(samples, t, pts, images);
  if (samples.background()) {
    auto bg = samples.background()->with_scale(samples.background()->scale() + t);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= bg.value(pts[i]);
    return Field(grid, std::move(values), bg, samples.time() + t);
  }
  return Field(grid, std::move(values), std::nullopt, samples.time() + t);
}

}  // namespace fsl
