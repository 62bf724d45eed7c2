#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fsl/error.hpp"
#include "fsl/evolve.hpp"
#include "fsl/norms.hpp"
#include "fsl/poisson.hpp"
#include "fsl/spectral.hpp"

using namespace fsl;
using doctest::Approx;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("Godunov Riemann fluxes for Burgers") {
  auto f = FluxFunction::burgers();
  CHECK(godunov_flux(f, 1.0, -1.0) == Approx(0.5));
  CHECK(godunov_flux(f, -1.0, 1.0) == Approx(0.0));
  CHECK(godunov_flux(f, 2.0, 1.0) == Approx(2.0));
  CHECK(godunov_flux(f, -2.0, -1.0) == Approx(0.5));
  // Frame speed 0.5: G(u) = u^2/2 - u/2, minimum -1/8 at u = 1/2.
  CHECK(godunov_flux(f, -1.0, 1.0, 0, 0.5) == Approx(-0.125));
  // Without a closed-form inverse the interior minimum is found by bisection.
  auto cubic_like = FluxFunction::polynomial({0.0, 0.0, 0.5});
  CHECK(godunov_flux(cubic_like, -1.0, 1.0, 0, 0.5) == Approx(-0.125).epsilon(1e-12));
  CHECK(llf_flux(f, 1.0, 1.0) == Approx(0.5));
  CHECK(mc_slope(0.0, 1.0, 3.0) == Approx(1.5));
  CHECK(mc_slope(0.0, 1.0, 0.5) == 0.0);
}

TEST_CASE("scheme config validation") {
  SchemeConfig cfg;
  cfg.cfl = 1.5;
  CHECK_THROWS_WITH_AS(cfg.validate(), "CFL out of (0,1]", CflError);
  cfg.cfl = 0.4;
  cfg.viscosity = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_numerical_flux("llf") == NumericalFlux::local_lax_friedrichs);
}

TEST_CASE("zero flux step is the exact semigroup") {
  Grid g(1, 16.0, 512);
  auto u = Field::sample(g, [](Point x) { return std::exp(-x[0] * x[0]); });
  auto f = FluxFunction::zero();
  SchemeConfig cfg;
  double dt = stable_time_step(u, f, cfg);
  auto a = step_nonlinear(u, f, cfg, dt);
  auto b = heat_semigroup(u, dt);
  CHECK(max_abs_diff(a.values(), b.values()) < 1e-12);
  CHECK_THROWS_AS(step_nonlinear(u, FluxFunction::burgers(), cfg, 10 * dt), CflError);
}

TEST_CASE("linear evolution of step data matches the arctan solution") {
  Grid g(1, 32.0, 1024);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 0.0);
  auto u0 = Field::zeros(g, bg);
  auto traj = evolve_nonlinear(u0, FluxFunction::zero(), SchemeConfig{}, 1.0);
  const auto& u = traj.final_state();
  CHECK(u.time() == Approx(1.0));
  for (std::size_t i = 0; i < g.size(); i += 37) {
    double x = g.coord(i);
    CHECK(std::abs(u.total(i) + 2.0 / std::numbers::pi * std::atan(x / 1.0)) < 1e-6);
  }
}

TEST_CASE("constants are steady") {
  Grid g(1, 16.0, 256);
  auto u0 = Field::zeros(g, FarFieldProfile::constant(1, 0.7));
  auto traj = evolve_nonlinear(u0, FluxFunction::burgers(), SchemeConfig{}, 0.5);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(traj.final_state().total(i) == Approx(0.7).epsilon(1e-12));
}

TEST_CASE("Burgers rarefaction: total variation non-increasing and maximum principle") {
  Grid g(1, 64.0, 2048);
  auto bg = FarFieldProfile::jump(-1.0, 0.0, 0.5);
  auto u0 = Field::sample(g, [](Point x) { return 0.3 * std::exp(-(x[0] - 3) * (x[0] - 3)); }, bg);
  auto traj = evolve_nonlinear(u0, FluxFunction::burgers(), SchemeConfig{}, 3.0);
  const auto& d = traj.diagnostics();
  double tv0 = tv_norm(u0);
  double prev = tv0;
  for (const auto& row : d) {
    CHECK(row.tv <= prev + 1e-10);
    prev = row.tv;
  }
  CHECK(traj.max_principle_excess() < 1e-6);
}

TEST_CASE("Burgers shock: maximum principle, conservation, L1 contraction") {
  Grid g(1, 64.0, 2048);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 0.0);
  auto bump = [](Point x) { return 0.2 * std::exp(-x[0] * x[0] / 4.0); };
  auto u0 = Field::zeros(g, bg);
  auto w0 = Field::sample(g, bump, bg);
  SchemeConfig cfg;
  cfg.flux = NumericalFlux::godunov;
  // The monotone (first-order) scheme is L1-contractive; MUSCL is only TVD.
  cfg.second_order = false;
  std::vector<double> outs{0.5, 1.0, 1.5, 2.0};
  auto tu = evolve_nonlinear(u0, FluxFunction::burgers(), cfg, 2.0, outs);
  auto tw = evolve_nonlinear(w0, FluxFunction::burgers(), cfg, 2.0, outs);
  CHECK(tu.max_principle_excess() < 1e-6);
  REQUIRE(tu.snapshots().size() == 5);
  // w >= u, so on the box |u - w| gains exactly what the boundary fluxes bring
  // in from the tail outside; with that inflow removed the L1 distance must not
  // grow.
  auto accounted_at = [](const Trajectory& tr, double t) {
    for (std::size_t j = 0; j < tr.steps(); ++j)
      if (tr.diagnostics()[j].t >= t - 1e-12) return tr.accounted_mass_change()[j];
    return 0.0;
  };
  double prev = kInf;
  for (std::size_t k = 0; k < tu.snapshots().size(); ++k) {
    const auto& a = tu.snapshots()[k].field;
    const auto& b = tw.snapshots()[k].field;
    double inflow = k == 0 ? 0.0 : accounted_at(tw, a.time()) - accounted_at(tu, a.time());
    std::vector<double> diff(g.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
      diff[i] = a.values()[i] - b.values()[i];
      CHECK(diff[i] <= 1e-12);
    }
    double l1 = lq_norm(g, diff, 1.0) - inflow;
    CHECK(l1 <= prev + 1e-6);
    prev = l1;
  }
  // Perturbation mass changes only through the box boundary.
  double m0 = measure(w0).mass;
  for (std::size_t k = 0; k < tw.steps(); ++k)
    CHECK(std::abs(tw.diagnostics()[k].mass - m0 - tw.accounted_mass_change()[k]) < 1e-8);
}

TEST_CASE("trajectory CSV") {
  Grid g(1, 8.0, 64);
  auto traj = evolve_nonlinear(Field::zeros(g), FluxFunction::burgers(), SchemeConfig{}, 0.1);
  auto csv = traj.diagnostics_csv();
  CHECK(csv.rfind("t,sup_norm,tv,mass,max_grad,dt\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == traj.steps() + 1);
}

TEST_CASE("similarity frame: linear profile is steady and constants too") {
  Grid g(1, 32.0, 512);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 1.0);
  SimilarityIntegrator it(Field::zeros(g, bg), FluxFunction::zero(), SchemeConfig{});
  it.advance(200);
  CHECK(it.residual() < 1e-6);
  CHECK(it.state().sup_norm() == Approx(1.0));
  double vmax = 0.0;
  for (double v : it.state().values()) vmax = std::max(vmax, std::abs(v));
  CHECK(vmax < 1e-12);

  SimilarityIntegrator c(Field::zeros(g, FarFieldProfile::constant(1, -0.4)), FluxFunction::burgers(),
                         SchemeConfig{});
  c.advance(100);
  CHECK(c.residual() < 1e-12);
}

TEST_CASE("similarity frame: background at another scale is converted") {
  Grid g(1, 32.0, 512);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 2.0);
  auto U0 = Field::sample(g, [](Point x) { return 0.1 * std::exp(-x[0] * x[0]); }, bg);
  SimilarityIntegrator it(U0, FluxFunction::zero(), SchemeConfig{});
  CHECK(it.state().background()->scale() == 1.0);
  for (std::size_t i = 0; i < g.size(); i += 11) CHECK(it.state().total(i) == Approx(U0.total(i)).epsilon(1e-12));
}

TEST_CASE("similarity frame: sup norm non-increasing for Burgers") {
  Grid g(1, 16.0, 512);
  auto bg = FarFieldProfile::jump(1.0, 0.0, 1.0);
  auto U0 = Field::sample(g, [](Point x) { return 0.3 * std::exp(-x[0] * x[0]); }, bg);
  auto traj = evolve_similarity(U0, FluxFunction::burgers(), SchemeConfig{}, 1.0);
  double prev = U0.sup_norm();
  for (const auto& row : traj.diagnostics()) {
    CHECK(row.sup_norm <= prev + 1e-6);
    prev = std::max(prev, row.sup_norm);
  }
  CHECK_THROWS_AS(SimilarityIntegrator(Field::zeros(Grid(1, 1.5, 64), bg), FluxFunction::burgers(), SchemeConfig{}),
                  Error);
}

TEST_CASE("linear continuity: zero coefficient is the semigroup") {
  Grid g(1, 32.0, 512);
  auto v0 = Field::sample(g, [](Point x) { return std::exp(-x[0] * x[0]); });
  auto coeff = CoefficientTrajectory::constant(g, {0.0}, 0.0, 2.0);
  auto traj = evolve_linear_continuity(v0, coeff, SchemeConfig{}, 2.0);
  auto ref = heat_semigroup(v0, 2.0);
  CHECK(max_abs_diff(traj.final_state().values(), ref.values()) < 1e-10);
  CHECK_THROWS_AS(evolve_linear_continuity(v0, coeff, SchemeConfig{}, 3.0), Error);
}

TEST_CASE("linear continuity: constant drift translates the Poisson evolution") {
  Grid g(1, 32.0, 512);
  auto v0 = Field::sample(g, [](Point x) { return std::exp(-x[0] * x[0]); });
  const double c = 0.75, t = 1.5;
  auto coeff = CoefficientTrajectory::constant(g, {c}, 0.0, t);
  auto traj = evolve_linear_continuity(v0, coeff, SchemeConfig{}, t);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < g.size(); i += 5) pts.push_back({g.coord(i) - c * t, 0.0});
  auto oracle = poisson_convolve_at(v0, t, pts, ImageMode::periodic);
  for (std::size_t k = 0; k < pts.size(); ++k) CHECK(std::abs(traj.final_state().values()[5 * k] - oracle[k]) < 1e-6);
}

TEST_CASE("linear continuity: mass and positivity with variable drift") {
  Grid g(1, 32.0, 512);
  auto v0 = Field::sample(g, [](Point x) { return std::exp(-4 * (x[0] - 1) * (x[0] - 1)); });
  std::vector<double> times{0.0, 1.0, 2.0};
  std::vector<VectorField> samples;
  for (double s : times) {
    VectorField vf{g, {std::vector<double>(g.size())}};
    for (std::size_t i = 0; i < g.size(); ++i) vf.components[0][i] = -std::tanh(g.coord(i)) * (1 + 0.3 * s);
    samples.push_back(vf);
  }
  CoefficientTrajectory coeff(times, samples);
  auto traj = evolve_linear_continuity(v0, coeff, SchemeConfig{}, 2.0, {0.5, 1.0});
  double m0 = measure(v0).mass;
  for (const auto& row : traj.diagnostics()) CHECK(std::abs(row.mass - m0) < 1e-8);
  for (const auto& snap : traj.snapshots())
    for (double v : snap.field.values()) CHECK(v >= -1e-6);
  CHECK(traj.snapshots().size() == 4);
}

TEST_CASE("two-dimensional Burgers step keeps the maximum principle") {
  Grid g(2, 8.0, 64);
  std::vector<double> table(16);
  for (int j = 0; j < 16; ++j) table[j] = std::cos(2 * std::numbers::pi * j / 16);
  auto bg = FarFieldProfile::angular(table, 0.5);
  auto u0 = Field::zeros(g, bg);
  auto traj = evolve_nonlinear(u0, FluxFunction::burgers({1.0, 1.0}), SchemeConfig{}, 0.5);
  CHECK(traj.max_principle_excess() < 1e-6);
}
