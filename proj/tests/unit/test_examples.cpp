#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fsl/error.hpp"
#include "fsl/field.hpp"
#include "fsl/norms.hpp"
#include "fsl/poisson.hpp"
#include "fsl/spectral.hpp"

using namespace fsl;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

namespace {

// (P(., t) * (pi/2) sign(.))(x) by quadrature of the kernel against the step.
double step_evolution(double x, double t) {
  boost::math::quadrature::exp_sinh<double> q;
  PoissonKernel k(1, t);
  double right = q.integrate([&](double s) { return k(x - s); }, 1e-14);
  double left = q.integrate([&](double s) { return k(x + s); }, 1e-14);
  return 0.5 * pi * (right - left);
}

// Lambda of the step evolution at time 1, from Lambda = -d/dt on Poisson extensions.
double lambda_arctan_oracle(double x) {
  const double h = 1e-4;
  return -(step_evolution(x, 1.0 + h) - step_evolution(x, 1.0 - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("shock data samples the reference and reports the annulus") {
  Grid g(1, 128.5, 4096);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 1.0);
  auto u = make_shock_data(g, bg, std::vector<double>(g.size(), 0.0));
  for (std::size_t i = 0; i < g.size(); i += 97)
    CHECK(u.total(i) == Approx(-2.0 / pi * std::atan(g.coord(i))).epsilon(1e-14));

  auto narrow = FarFieldProfile::jump(1.0, 0.0, 0.1);
  auto bump = Field::sample(g, [](Point x) { return std::exp(-x[0] * x[0]); }).data();
  auto w = make_shock_data(g, narrow, bump);
  CHECK(w.total(0) == Approx(1.0).epsilon(1e-3));
  CHECK(w.total(g.points() - 1) == Approx(-1.0).epsilon(1e-3));
  CHECK(narrow.far_value(Point{-1.0, 0.0}) == 1.0);

  auto plateau = Field::sample(g, [&](Point x) { return std::abs(x[0]) >= 0.5 * g.half_width() ? 1.0 : 0.0; });
  auto flagged = make_shock_data(g, bg, plateau.data());
  CHECK(flagged.boundary_annulus_sup() >= 1.0);
  CHECK_THROWS_AS(make_shock_data(g, bg, std::vector<double>(10)), Error);
}

TEST_CASE("rescale examples") {
  Grid g(1, 32.0, 1024);
  auto bump = Field::sample(g, [](Point x) { return std::exp(-x[0] * x[0] / 2.0); });
  auto same = rescale(bump, 1.0).field;
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(same.values()[i] == Approx(bump.values()[i]).epsilon(1e-12));

  auto narrow = rescale(bump, 2.0).field;
  for (std::size_t i = 0; i < g.size(); i += 13) {
    double x = g.coord(i);
    CHECK(std::abs(narrow.values()[i] - std::exp(-x * x * 2.0)) < 1e-10);
  }

  auto uss2 = Field::zeros(g, FarFieldProfile::jump(1.0, 0.0, 2.0), 2.0);
  auto back = rescale(uss2, 2.0).field;
  auto uss1 = Field::zeros(g, FarFieldProfile::jump(1.0, 0.0, 1.0), 1.0);
  for (std::size_t i = 0; i < g.size(); i += 7) CHECK(std::abs(back.total(i) - uss1.total(i)) < 1e-8);
  CHECK_THROWS_AS(rescale(bump, 10.0), Error);
}

TEST_CASE("g coefficient examples") {
  Grid g(1, 1.0, 16);
  auto at = [&](double a, double b, const FluxFunction& f) {
    auto u = Field::sample(g, [&](Point) { return a; });
    auto us = Field::sample(g, [&](Point) { return b; });
    return g_coefficient(u, us, f).components[0][3];
  };
  CHECK(at(1.0, -1.0, FluxFunction::burgers()) == Approx(0.0));
  CHECK(at(0.7, 0.7, FluxFunction::burgers()) == Approx(0.7));
  CHECK(at(2.0, 1.0, FluxFunction::preset("cubic")) == Approx(7.0));
}

TEST_CASE("Lambda examples") {
  Grid g(1, pi, 64);
  auto c2 = Field::sample(g, [](Point x) { return std::cos(2 * x[0]); });
  auto l = apply_lambda(c2);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(l.values()[i] == Approx(2 * std::cos(2 * g.coord(i))).epsilon(1e-12));
  auto five = Field::sample(g, [](Point) { return 5.0; });
  auto l5 = apply_lambda(five);
  for (double v : l5.values()) CHECK(std::abs(v) < 1e-12);

  double oracle = lambda_arctan_oracle(1.0);
  CHECK(oracle == Approx(0.5).epsilon(1e-6));
  // arctan(x) is the jump reference with a = -pi/2 at scale 1.
  auto bg = FarFieldProfile::jump(-pi / 2, 0.0, 1.0);
  CHECK(bg.lambda_value(Point{1.0, 0.0}) == Approx(oracle).epsilon(1e-6));
}

TEST_CASE("linear similarity profile solves y U' = Lambda U") {
  for (double y : {-7.0, -0.4, 0.3, 2.0, 25.0}) {
    double u_prime = -2.0 / pi / (1.0 + y * y);
    double lambda_u = -2.0 / pi * lambda_arctan_oracle(y);
    CHECK(std::abs(y * u_prime - lambda_u) < 1e-6);
  }
}

TEST_CASE("Poisson kernel examples") {
  CHECK(poisson_evaluate(0.0, 1.0) == Approx(1.0 / pi).epsilon(1e-14));
  CHECK(poisson_evaluate(1.0, 1.0) == Approx(0.5 / pi).epsilon(1e-14));
  boost::math::quadrature::exp_sinh<double> q;
  double m1 = 2.0 * q.integrate([](double x) { return poisson_evaluate(x, 2.0); }, 1e-14);
  double m2 = q.integrate([](double r) { return 2.0 * pi * r * poisson_evaluate(Point{r, 0.0}, 2.0, 2); }, 1e-14);
  CHECK(std::abs(m1 - 1.0) < 1e-8);
  CHECK(std::abs(m2 - 1.0) < 1e-8);
}

TEST_CASE("semigroup examples") {
  CHECK(step_evolution(1.0, 1.0) * (-2.0 / pi) == Approx(-0.5).epsilon(1e-12));
  Grid big(1, 64.0, 2048);
  auto u = Field::zeros(big, FarFieldProfile::jump(1.0, 0.0, 1e-3));
  auto evolved = heat_semigroup(u, 1.0);
  std::size_t i = static_cast<std::size_t>(std::lround(65.0 / big.spacing()));
  REQUIRE(big.coord(i) == Approx(1.0));
  CHECK(evolved.total(i) == Approx(-0.5).epsilon(1e-3));

  Grid g(1, pi, 128);
  auto bump = Field::sample(g, [](Point x) { return std::exp(std::sin(x[0])); });
  CHECK(heat_semigroup(bump, 0.0).data() == bump.data());
  auto c3 = Field::sample(g, [](Point x) { return std::cos(3 * x[0]); });
  auto d = heat_semigroup(c3, 0.2);
  for (std::size_t k = 0; k < g.size(); ++k)
    CHECK(d.values()[k] == Approx(std::exp(-0.6) * std::cos(3 * g.coord(k))).epsilon(1e-12));
}

TEST_CASE("Poisson convolution of an indicator") {
  Grid g(1, 8.0, 16384);
  auto w = Field::sample(g, [](Point x) {
    double a = std::abs(x[0]);
    return a < 0.5 ? 1.0 : (a == 0.5 ? 0.5 : 0.0);
  });
  Point origin{0.0, 0.0};
  auto v = poisson_convolve_at(w, 1.0, std::span<const Point>(&origin, 1));
  CHECK(v[0] == Approx(2.0 / pi * std::atan(0.5)).epsilon(1e-6));
  CHECK(2.0 / pi * std::atan(0.5) == Approx(0.2952).epsilon(1e-4));
  auto zero = Field::zeros(g);
  CHECK(poisson_convolve_at(zero, 1.0, std::span<const Point>(&origin, 1))[0] == 0.0);
  auto spread = heat_semigroup(w, 1.0);
  CHECK(std::abs(lq_norm(spread, 1.0) - lq_norm(w, 1.0)) < 1e-8);
}

TEST_CASE("norm examples") {
  Grid g(1, 16.5, 4096);
  const double dx = g.spacing();
  auto ind = Field::sample(g, [](Point x) { return std::abs(x[0]) < 0.5 ? 1.0 : 0.0; });
  for (AmalgamIndex idx : {AmalgamIndex{kInf, kInf}, AmalgamIndex{kInf, 1.0}, AmalgamIndex{1.0, 1.0},
                           AmalgamIndex{2.0, 2.0}, AmalgamIndex{2.0, 1.0}})
    CHECK(std::abs(amalgam_norm(ind, idx) - 1.0) <= 2.0 * dx);
  auto c = Field::sample(g, [](Point) { return 2.5; });
  CHECK(amalgam_norm(c, {kInf, 1.0}) == Approx(2.5).epsilon(1e-12));

  auto gauss = Field::sample(g, [](Point x) { return std::exp(-x[0] * x[0]); });
  double oracle = std::sqrt(2.0 * boost::math::quadrature::exp_sinh<double>().integrate(
                                       [](double x) { return std::exp(-2 * x * x); }, 1e-14));
  CHECK(oracle == Approx(std::pow(pi / 2.0, 0.25)).epsilon(1e-12));
  CHECK(lq_norm(gauss, 2.0) == Approx(oracle).epsilon(1e-12));

  auto flat = Field::zeros(g, FarFieldProfile::constant(1, 0.4));
  CHECK(tv_norm(flat) == 0.0);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 2.0);
  auto bumped = Field::sample(g, [](Point x) { return std::exp(-25.0 * x[0] * x[0]); }, bg);
  double tv = tv_norm(bumped);
  CHECK(tv > 2.0);
  CHECK(tv <= 4.0 + 1e-9);

  MovingWeight wide(Point{0.0, 0.0}, 4.0);
  CHECK(weighted_l1(gauss, MovingWeight(Point{0.0, 0.0}, 10.0)) == Approx(lq_norm(gauss, 1.0)).epsilon(1e-12));
  CHECK(weighted_l1(Field::zeros(g), wide) == 0.0);
  auto far = Field::sample(g, [](Point x) { return x[0] >= 5.0 && x[0] <= 6.0 ? 1.0 : 0.0; });
  CHECK(weighted_l1(far, MovingWeight(Point{0.0, 0.0}, 2.0)) == 0.0);

  Grid unit(1, 1.0, 256);
  auto line = Field::sample(unit, [](Point x) { return x[0]; });
  CHECK(holder_seminorm(line, 1.0, 2.0) == Approx(1.0).epsilon(1e-12));
  CHECK(holder_seminorm(Field::sample(unit, [](Point) { return 3.0; }), 0.5, 1.0) == 0.0);
}
