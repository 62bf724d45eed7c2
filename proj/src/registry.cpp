#include <algorithm>

#include "experiment_support.hpp"
#include "fsl/error.hpp"

namespace fsl {

namespace {

ExperimentParams base() { return ExperimentParams{}; }

std::vector<ExperimentInfo> build_registry() {
  std::vector<ExperimentInfo> r;

  {
    auto p = base();
    p.perturbation = "unit_bump";
    r.push_back({"verify_decay_rates", "decay of |u - u^SS|_q against t^(n/q - n/p)",
                 "Theorem 1.1, Eq (1.6): diffusive rates of convergence to the self-similar solution",
                 "flux, jump data (a, mu, tau), perturbation v0, (p,q) list, time window and fit window",
                 "series |u - u^SS|_q(t) and the normalized ratio, fitted slopes with 95% intervals",
                 "|u(t) - u^SS(t)|_q <= C t^(n/q - n/p) |v0|_p, with o(1) in place of C when p > 1",
                 p, verify_decay_rates});
  }
  {
    auto p = base();
    p.t_end = 100.0;
    r.push_back({"verify_bv_convergence", "total variation of u - u^SS tends to zero",
                 "Theorem 1.2: convergence in BV for BV data (n = 1)",
                 "flux, jump data, BV perturbation, final time",
                 "series TV(u - u^SS)(t), TV(u)(t) and |omega| mass outside B(4t)",
                 "TV(u(t) - u^SS(t)) -> 0 and TV(u(t)) <= TV(u0)", p, verify_bv_convergence});
  }
  {
    auto p = base();
    r.push_back({"verify_alibaud", "controlled speed of propagation on random instances",
                 "Proposition 2.1, Eq (2.4): local L1 control by the Poisson-smoothed initial difference",
                 "flux, jump data, seed, number of (u0, u0~, x0, R, t) instances, grid pair",
                 "LHS/RHS ratio per instance, best constant per grid, tolerance 1e-3 + grid discrepancy",
                 "int_B(x0,R) |u - u~|(t) <= int_B(x0,R+Lt) P(t) * |u0 - u0~|", p, verify_alibaud});
  }
  {
    auto p = base();
    r.push_back({"verify_bv_formula", "weighted local BV bound on random instances",
                 "Corollary 2.2, Eq (2.5): weighted control of the derivative by the moving weight psi(x, t)",
                 "flux, jump data, seed, number of (u0, x0, R, t) instances, grid pair",
                 "LHS/RHS ratio per instance, best constant per grid",
                 "int psi(x - x0) |u_x(t)| <= int psi(x - x0, t) P(t) * |u0_x|", p, verify_bv_formula});
  }
  {
    auto p = base();
    p.points = 65536;
    p.half_width = 4.5;
    p.samples = 50;
    r.push_back({"verify_smoothing_lemma", "amalgam smoothing of the Poisson semigroup",
                 "Lemma 2.3: smoothing for the fractional heat equation in amalgam norms",
                 "(p, q1, q2) triples, seed, suite size, grid pair",
                 "worst ratio per time, fitted small-t exponent, uniform constant per grid",
                 "|P(t) * w|_{l^p L^q2} <= C t^(n/q2 - n/q1) |w|_{l^p L^q1} for t <= 1", p,
                 verify_smoothing_lemma});
  }
  {
    auto p = base();
    p.t_end = 1000.0;
    p.fit_t_max = 1000.0;
    r.push_back({"verify_regularity_decay", "scale-invariant derivative bounds along the trajectory",
                 "Proposition 2.4: t |grad u| + t^2 |grad^2 u| + t^(2+alpha) [grad^2 u]_alpha bounded",
                 "flux, jump data, perturbation, time window [t0, 1000 t0]",
                 "series of the three scaled quantities, growth slopes fitted on [fit_t_min, fit_t_max]",
                 "t |u_x| <~ 1, t^2 |u_xx| <~ 1, t^(2+alpha) [u_xx]_alpha <~ 1", p, verify_regularity_decay});
  }
  {
    auto p = base();
    r.push_back({"verify_fundamental_bounds", "fundamental solution of the linearized difference equation",
                 "Proposition 2.5: two-sided Poisson bounds, maximum principle and representation formula",
                 "flux and perturbation generating g, grid (bump width 8 dx)",
                 "fitted C0, mass and positivity defects, representation error",
                 "C0^-1 P <= Gamma <= C0 P, int Gamma = 1", p, verify_fundamental_bounds});
  }
  {
    auto p = base();
    p.perturbation = "two_bumps";
    p.norms = {{2.0, kInf}};
    r.push_back({"verify_localization_smoothing", "propagation of localization, then smoothing",
                 "Proposition 3.1, proof steps: Eq (3.3) localization and Eq (3.7) smoothing",
                 "flux, jump data, perturbation, (p, q), grid pair",
                 "constants C of both steps on both grids",
                 "|v(t)|_{l^p L^1} <~ |v0|_{l^p L^1} (t <= 1/2), |v(t)|_q <~ |v(1/2)|_{l^p L^1} (t in (3/4,1])", p,
                 verify_localization_smoothing});
  }
  {
    auto p = base();
    p.flux = "abs";
    p.t_end = 1e3;
    r.push_back({"verify_lipschitz_mode", "locally uniform convergence for Lipschitz fluxes",
                 "Remark 3.3: |u - u^SS| -> 0 uniformly on B(Rt) when f is only Lipschitz",
                 "Lipschitz flux, jump data, perturbation, radii {1, 4}",
                 "series sup_B(Rt) |u - u^SS|", "sup_B(Rt) |u - u^SS| -> 0", p, verify_lipschitz_mode});
  }
  {
    auto p = base();
    p.perturbation = "none";
    r.push_back({"verify_profile", "steady profile of the similarity equation",
                 "Eq (1.3) and the uniqueness statement of Section 1: u^SS(x,t) = U(x/t)",
                 "flux, far-field data h, grid, steady tolerance",
                 "profile snapshot, residual history, rescale defect",
                 "U is a steady state invariant under u -> u(lambda x, lambda t)", p, verify_profile});
  }
  {
    auto p = base();
    p.perturbation = "none";
    p.half_width = 256.5;
    r.push_back({"verify_tail", "algebraic tail of the profile", "Eq (1.7): |U(y) - h| ~ |y|^-1 as |y| -> inf",
                 "flux, jump data, fit window [r1, r2], tolerance",
                 "tail series, fitted exponent and amplitude, two-sided ratio",
                 "U(y) - h(y/|y|) = O(|y|^-n) with matching lower bound", p, verify_tail});
  }
  {
    auto p = base();
    p.flux = "zero";
    p.perturbation = "none";
    p.t_end = 1.0;
    p.runtime_limit = 10.0;
    r.push_back({"verify_linear_exactness", "zero flux reproduces the Poisson evolution of the step",
                 "Section 2, Eq (2.1): u = P(t) * u0 when f = 0",
                 "jump data, grid, final time", "relative sup error, runtime",
                 "u(x,t) = mu - (2a/pi) arctan(x/(tau + t))", p, verify_linear_exactness});
  }
  {
    auto p = base();
    p.flux = "linear:0.75";
    p.t_end = 1.0;
    r.push_back({"verify_refinement", "grid convergence and stability of measured constants",
                 "Eq (2.1) translated by f(u) = c u; constants of Proposition 2.1, Corollary 2.2 and Lemma 2.3",
                 "linear flux, perturbation, grid pair", "L1 errors and their ratio, constant spreads",
                 "error ratio >= 1.9 under halving dx; constants within 20%", p, verify_refinement});
  }
  {
    auto p = base();
    p.dim = 2;
    p.points = 256;
    p.half_width = 16.0;
    p.perturbation = "none";
    p.runtime_limit = 600.0;
    r.push_back({"verify_smoke_2d", "two-dimensional profiles",
                 "Eq (1.3) in n = 2 with f = 0: U = P(1) * h(x/|x|)",
                 "angular table of h, flux for the nonlinear smoke steps, grid",
                 "oracle error of the linear profile, runtime",
                 "the f = 0 profile is the Poisson evolution of h at t = 1", p, verify_smoke_2d});
  }
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> registry = build_registry();
  return registry;
}

const ExperimentInfo& find_experiment(const std::string& id) {
  const auto& reg = experiment_registry();
  for (const auto& info : reg)
    if (info.id == id || info.id == "verify_" + id) return info;
  throw Error("unknown experiment '" + id + "'");
}

ExperimentReport run_experiment(const std::string& id, const ExperimentParams& p) {
  const auto& info = find_experiment(id);
  detail::Stopwatch clock;
  ExperimentReport r;
  try {
    p.scheme.validate();
    r = info.run(p);
  } catch (const std::exception& e) {
    throw Error(info.id + ": " + e.what());
  }
  r.id = info.id;
  r.inputs = p.to_json();
  r.inputs_digest = p.digest();
  r.seed = p.seed;
  r.runtime_seconds = clock.seconds();
  r.finalize();
  return r;
}

}  // namespace fsl
