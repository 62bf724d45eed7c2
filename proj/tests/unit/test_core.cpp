#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fsl/background.hpp"
#include "fsl/error.hpp"
#include "fsl/field.hpp"
#include "fsl/flux.hpp"
#include "fsl/grid.hpp"
#include "fsl/norms.hpp"
#include "fsl/poisson.hpp"
#include "fsl/spectral.hpp"

using namespace fsl;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

namespace {

// P(., tau) * h(./|.|) at x in R^2 by polar quadrature centered at the origin,
// where h depends on the angle only.
double poisson_angular_oracle(const Point& x, double tau, const std::function<double(double)>& h) {
  using boost::math::quadrature::gauss_kronrod;
  using boost::math::quadrature::exp_sinh;
  auto radial = [&](double r) {
    auto inner = [&](double th) {
      double dx = x[0] - r * std::cos(th), dy = x[1] - r * std::sin(th);
      double s = dx * dx + dy * dy + tau * tau;
      return h(th) * r * tau / (2.0 * pi * s * std::sqrt(s));
    };
    // Periodic smooth integrand: the trapezoid rule converges geometrically.
    const int m = 512;
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += inner(2.0 * pi * j / m);
    return acc * 2.0 * pi / m;
  };
  double near = gauss_kronrod<double, 61>::integrate(radial, 0.0, 10.0, 15, 1e-14);
  exp_sinh<double> tail;
  return near + tail.integrate([&](double r) { return radial(r + 10.0); }, 1e-14);
}

}  // namespace

TEST_CASE("grid layout and validation") {
  Grid g(1, 8.0, 64);
  CHECK(g.spacing() == Approx(0.25));
  CHECK(g.coord(32) == Approx(0.0));
  CHECK(g.coord(0) == Approx(-8.0));
  Grid g2(2, 4.0, 32);
  auto p = g2.position(g2.index(3, 5));
  CHECK(p[0] == Approx(-4.0 + 3 * 0.25));
  CHECK(p[1] == Approx(-4.0 + 5 * 0.25));
  CHECK_THROWS_AS(Grid(3, 1.0, 64), Error);
  CHECK_THROWS_AS(Grid(1, 1.0, 60), Error);
  CHECK_THROWS_AS(Grid(1, -1.0, 64), Error);
}

TEST_CASE("Poisson normalization") {
  CHECK(poisson_constant(1) == Approx(1.0 / pi).epsilon(1e-12));
  CHECK(poisson_constant(2) == Approx(0.5 / pi).epsilon(1e-12));
  boost::math::quadrature::exp_sinh<double> q;
  PoissonKernel k(1, 0.7);
  double mass = 2.0 * q.integrate([&](double r) { return k(r); }, 1e-13);
  CHECK(mass == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("periodized 1D kernel equals the image sum") {
  PoissonKernel k(1, 0.9);
  const double X = 5.0;
  for (double x : {-4.0, -0.3, 0.0, 2.2}) {
    double acc = 0.0;
    for (int m = -200000; m <= 200000; ++m) acc += k(x + m * 2.0 * X);
    CHECK(k.periodized(Point{x, 0.0}, X) == Approx(acc).epsilon(1e-6));
  }
}

TEST_CASE("jump reference is the Poisson extension and Lambda is -d/dtau") {
  auto bg = FarFieldProfile::jump(0.8, 0.3, 1.5);
  using boost::math::quadrature::exp_sinh;
  exp_sinh<double> q;
  for (double x : {-3.0, -0.2, 0.0, 0.7, 11.0}) {
    PoissonKernel k(1, 1.5);
    // h = 1.1 on (-inf, 0), -0.5 on (0, inf)
    double left = q.integrate([&](double s) { return k(x + s); }, 1e-13);
    double right = q.integrate([&](double s) { return k(x - s); }, 1e-13);
    double expected = 1.1 * left - 0.5 * right;
    CHECK(bg.value(x) == Approx(expected).epsilon(1e-10));
    double h = 1e-5;
    double dtau = (bg.with_scale(1.5 + h).value(x) - bg.with_scale(1.5 - h).value(x)) / (2 * h);
    CHECK(bg.lambda_value(Point{x, 0.0}) == Approx(-dtau).epsilon(1e-6));
  }
  CHECK(bg.far_value(Point{-1.0, 0.0}) == Approx(1.1));
  CHECK(bg.far_value(Point{1.0, 0.0}) == Approx(-0.5));
}

TEST_CASE("angular reference matches brute-force quadrature") {
  const int m = 16;
  std::vector<double> table(m);
  for (int j = 0; j < m; ++j) table[j] = std::cos(2 * pi * j / m) + 0.25 * std::sin(2 * 2 * pi * j / m);
  auto h = [](double th) { return std::cos(th) + 0.25 * std::sin(2 * th); };
  auto bg = FarFieldProfile::angular(table, 1.3);
  for (Point x : {Point{0.4, -0.2}, Point{2.0, 1.0}, Point{-5.0, 0.5}}) {
    double oracle = poisson_angular_oracle(x, 1.3, h);
    CHECK(bg.value(x) == Approx(oracle).epsilon(1e-11));
    double d = 1e-5;
    double dtau = (bg.with_scale(1.3 + d).value(x) - bg.with_scale(1.3 - d).value(x)) / (2 * d);
    CHECK(bg.lambda_value(x) == Approx(-dtau).epsilon(1e-5));
  }
  CHECK(bg.max_value() <= 1.3);
}

TEST_CASE("fractional power of a Fourier mode") {
  Grid g(1, pi, 64);
  auto f = Field::sample(g, [](Point x) { return std::sin(3 * x[0]) + std::cos(5 * x[0]); });
  auto lf = SpectralOperator::fractional_power(g, 0.5).apply(f.values());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.coord(i);
    CHECK(lf[i] == Approx(std::sqrt(3.0) * std::sin(3 * x) + std::sqrt(5.0) * std::cos(5 * x)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(SpectralOperator::fractional_power(g, 2.5), Error);
}

TEST_CASE("semigroup agrees with real-space Poisson quadrature") {
  Grid g(1, 20.0, 512);
  auto bump = Field::sample(g, [](Point x) { return std::exp(-x[0] * x[0]); });
  auto spec = heat_semigroup(bump, 0.5);
  auto quad = poisson_convolve_quadrature(bump, 0.5, ImageMode::periodic);
  for (std::size_t i = 0; i < g.size(); i += 7) CHECK(spec.values()[i] == Approx(quad.values()[i]).epsilon(1e-8));
}

TEST_CASE("apply_lambda includes the exact background contribution") {
  Grid g(1, 32.0, 1024);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 1.0);
  auto u = Field::zeros(g, bg);
  auto lu = apply_lambda(u);
  CHECK(lu.values()[g.points() / 2 + 10] == Approx(bg.lambda_value(Point{g.coord(g.points() / 2 + 10), 0.0})));
  auto u2 = heat_semigroup(u, 0.5);
  CHECK(u2.background()->scale() == Approx(1.5));
}

TEST_CASE("amalgam norms") {
  Grid g(1, 16.5, 1024);
  auto f = Field::sample(g, [](Point x) { return std::exp(-0.1 * x[0] * x[0]) * (1 + 0.3 * std::sin(x[0])); });
  for (double p : {1.0, 2.0, 3.5}) {
    CHECK(amalgam_norm(f, {p, p}) == Approx(lq_norm(f, p)).epsilon(1e-12));
  }
  auto one = Field::sample(g, [](Point) { return 1.0; });
  auto detail = amalgam_norm_detail(g, one.values(), {kInf, 1.0});
  CHECK(detail.norm == Approx(1.0).epsilon(1e-12));
  CHECK(detail.clipped_cubes == 0);
  Grid g2(1, 16.0, 1024);
  CHECK(amalgam_norm_detail(g2, std::vector<double>(1024, 1.0), {kInf, 1.0}).clipped_cubes == 2);

  Grid g3(2, 4.5, 64);
  auto f2 = Field::sample(g3, [](Point x) { return std::exp(-(x[0] * x[0] + 2 * x[1] * x[1])); });
  CHECK(amalgam_norm(f2, {2.0, 2.0}) == Approx(lq_norm(f2, 2.0)).epsilon(1e-12));
  CHECK(amalgam_norm(f2, {1.0, kInf}) >= lq_norm(f2, 1.0));
}

TEST_CASE("total variation with far field") {
  Grid g(1, 64.0, 2048);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 0.5);
  auto u = Field::zeros(g, bg);
  CHECK(tv_norm(u) == Approx(2.0).epsilon(1e-12));
  auto bump = Field::sample(g, [](Point x) { return std::exp(-x[0] * x[0]); });
  CHECK(tv_norm(bump) == Approx(2.0).epsilon(1e-6));
}

TEST_CASE("moving weight") {
  MovingWeight w(Point{1.0, 0.0}, 2.0, 0.5, 4.0);
  CHECK(w(Point{1.0, 0.0}) == 1.0);
  CHECK(w(Point{1.0 + 2.0 + 2.0, 0.0}) == 1.0);
  CHECK(w(Point{1.0 + 2.0 + 4.0 + 0.01, 0.0}) == 0.0);
  CHECK(MovingWeight::base(1.5) == Approx(0.5));
  Grid g(1, 32.0, 1024);
  auto one = Field::sample(g, [](Point) { return 1.0; });
  MovingWeight still(Point{0.0, 0.0}, 1.0);
  CHECK(weighted_l1(one, still) == Approx(3.0).epsilon(1e-6));
}

TEST_CASE("Holder seminorm of |x|^alpha") {
  Grid g(1, 4.0, 1024);
  auto f = Field::sample(g, [](Point x) { return std::sqrt(std::abs(x[0])); });
  double h = holder_seminorm(f, 0.5, 1.0);
  CHECK(h == Approx(1.0).epsilon(1e-12));
  CHECK(holder_seminorm(f, 1.0, 1.0) > 10.0);
}

TEST_CASE("flux presets") {
  auto b = FluxFunction::burgers();
  CHECK(b.value(2.0) == Approx(2.0));
  CHECK(b.lipschitz_on(3.0) == Approx(3.0));
  CHECK(b.convex_on(1.0));
  CHECK(b.critical_point(0.4).value() == Approx(0.4));
  auto a = FluxFunction::absolute();
  CHECK(a.smoothness() == Smoothness::lipschitz);
  CHECK(FluxFunction::preset("cubic").value(2.0) == Approx(8.0).epsilon(1e-12));
  CHECK_THROWS_AS(FluxFunction::preset("nope"), Error);
}

TEST_CASE("rescale keeps u(lambda x)") {
  Grid g(1, 32.0, 1024);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 2.0);
  auto u = Field::sample(g, [](Point x) { return std::exp(-x[0] * x[0] / 8); }, bg, 4.0);
  auto r = rescale(u, 0.5);
  CHECK(r.field.time() == Approx(8.0));
  CHECK(r.field.background()->scale() == Approx(4.0));
  std::size_t i = g.points() / 2 + 20;
  double x = g.coord(i);
  CHECK(r.field.values()[i] == Approx(std::exp(-0.25 * x * x / 8)).epsilon(1e-8));
}
