#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "experiment_support.hpp"
#include "fsl/error.hpp"
#include "fsl/norms.hpp"
#include "fsl/spectral.hpp"

namespace fsl {

using namespace detail;

namespace {

const std::vector<double> kColumns{-10.0, -5.0, 0.0, 5.0, 10.0};
const std::vector<double> kTimes{0.25, 0.5, 0.75, 1.0};
constexpr double kWindow = 20.0;

/// g(x, t0 + s) for s in [0, 1] from the pair u (perturbed) and u~ (background only).
CoefficientTrajectory pair_coefficient(const ExperimentParams& p, const Grid& grid) {
  const auto f = make_flux(p);
  const auto bg = make_far_field(p, p.scale);
  Field u0(grid, perturbation_values(p, grid), bg);
  Field w0 = Field::zeros(grid, bg);
  std::vector<double> outputs;
  for (int k = 0; k <= 20; ++k) outputs.push_back(p.t_start + 0.05 * k);
  SchemeConfig cfg = p.scheme;
  auto u = evolve_nonlinear(u0, f, cfg, outputs.back(), outputs);
  auto w = evolve_nonlinear(w0, f, cfg, outputs.back(), outputs);
  std::vector<double> times;
  std::vector<VectorField> samples;
  for (double t : outputs) {
    auto pick = [&](const Trajectory& tr) -> const Field& {
      for (const auto& s : tr.snapshots())
        if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, t)) return s.field;
      throw Error("missing snapshot at t = " + format_double(t));
    };
    times.push_back(t - p.t_start);
    samples.push_back(g_coefficient(pick(u), pick(w), f));
  }
  return CoefficientTrajectory(std::move(times), std::move(samples));
}

std::vector<double> mollified_delta(const Grid& grid, double y, double eps) {
  return Field::sample(grid, [&](const Point& x) {
           const double d = (x[0] - y) / eps;
           return std::exp(-0.5 * d * d) / (std::sqrt(2.0 * std::numbers::pi) * eps);
         }).data();
}

}  // namespace

ExperimentReport verify_fundamental_bounds(const ExperimentParams& p) {
  if (p.dim != 1) throw Error("the fundamental-solution verifier is implemented for n = 1");
  ExperimentReport r;
  const Grid grid = make_grid(p);
  if (grid.half_width() < kWindow + 10.0) throw Error("fundamental-solution verifier needs X >= 30");
  const double eps = 8.0 * grid.spacing();
  const auto g = pair_coefficient(p, grid);
  const bool vanishing = g.sup_norm() == 0.0;
  r.add_constant("sup |g|", g.sup_norm());

  SchemeConfig cfg = p.scheme;
  std::vector<std::vector<Field>> gamma(kColumns.size());
  parallel_for(kColumns.size(), [&](std::size_t c) {
    Field d(grid, mollified_delta(grid, kColumns[c], eps));
    auto traj = evolve_linear_continuity(d, g, cfg, kTimes.back(), kTimes);
    for (double t : kTimes)
      for (const auto& s : traj.snapshots())
        if (std::abs(s.t - t) <= 1e-12) gamma[c].push_back(s.field);
    if (gamma[c].size() != kTimes.size()) throw Error("missing fundamental-solution snapshot");
  });

  double mass_err = 0.0, negativity = 0.0, c0 = 1.0;
  std::string worst_at;
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    const Field d(grid, mollified_delta(grid, kColumns[c], eps));
    Series col{"Gamma/P at y=" + format_double(kColumns[c]), "t", "max(Gamma/P, P/Gamma)", {}, {}};
    for (std::size_t j = 0; j < kTimes.size(); ++j) {
      const auto& G = gamma[c][j].data();
      const auto P = heat_semigroup(d, kTimes[j]).data();
      double mass = 0.0, peak = 0.0, worst = 1.0;
      for (double v : G) {
        mass += v * grid.spacing();
        peak = std::max(peak, v);
      }
      mass_err = std::max(mass_err, std::abs(mass - 1.0));
      for (std::size_t i = 0; i < G.size(); ++i) {
        negativity = std::max(negativity, -G[i] / peak);
        if (std::abs(grid.coord(i) - kColumns[c]) > kWindow) continue;
        const double q = G[i] > 0.0 ? std::max(G[i] / P[i], P[i] / G[i]) : kInf;
        if (q > worst) worst = q;
        if (q > c0) {
          c0 = q;
          worst_at = "y=" + format_double(kColumns[c]) + " t=" + format_double(kTimes[j]) +
                     " x=" + format_double(grid.coord(i));
        }
      }
      col.x.push_back(kTimes[j]);
      col.y.push_back(worst);
    }
    r.add_series(std::move(col));
  }
  r.add_constant("C0", c0);
  r.add_check("mass of Gamma", mass_err <= 1e-4, mass_err, 1e-4);
  r.add_check("positivity of Gamma", negativity <= 1e-6, negativity, 1e-6);
  if (vanishing) {
    r.add_check("Gamma equals P when g = 0", c0 - 1.0 <= 1e-3, c0 - 1.0, 1e-3, worst_at);
  } else {
    r.add_check("two-sided kernel bound", c0 <= 10.0, c0, 10.0, worst_at);
  }

  // Superposition: the solution from a combination of columns is the same
  // combination of the kernels.
  std::mt19937_64 rng(p.seed);
  std::vector<double> weights, v0(grid.size(), 0.0), expected(grid.size(), 0.0);
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    weights.push_back(uniform(rng, -1.0, 1.0));
    const auto d = mollified_delta(grid, kColumns[c], eps);
    for (std::size_t i = 0; i < d.size(); ++i) {
      v0[i] += weights[c] * d[i];
      expected[i] += weights[c] * gamma[c].back().data()[i];
    }
  }
  auto v = evolve_linear_continuity(Field(grid, v0), g, cfg, kTimes.back()).final_state();
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    err = std::max(err, std::abs(v.data()[i] - expected[i]));
    scale = std::max(scale, std::abs(expected[i]));
  }
  r.add_check("representation by Gamma", err <= 1e-4 * scale, err / scale, 1e-4);
  return r;
}

}  // namespace fsl
