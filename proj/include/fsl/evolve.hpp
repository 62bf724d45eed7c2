#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fsl/field.hpp"
#include "fsl/flux.hpp"

namespace fsl {

enum class NumericalFlux { automatic, godunov, local_lax_friedrichs };
enum class Frame { physical, similarity };

struct SchemeConfig {
  /// automatic: Godunov when the flux is convex on the data range, else LLF.
  NumericalFlux flux = NumericalFlux::automatic;
  double cfl = 0.4;
  /// Vanishing viscosity eps (adds eps * Laplacian).
  double viscosity = 0.0;
  Frame frame = Frame::physical;
  /// Order s of Lambda^s.
  double order = 1.0;
  /// Throw when the discrete maximum principle fails by more than 1e-6.
  bool enforce_max_principle = true;
  /// MUSCL (MC limiter) reconstruction; false gives the first-order scheme.
  bool second_order = true;

  void validate() const;
};

std::string to_string(NumericalFlux flux);
NumericalFlux parse_numerical_flux(const std::string& name);

/// Godunov flux of G(u) = f_axis(u) - speed * u for the Riemann pair (ul, ur):
/// min of G over [ul, ur] when ul <= ur, max over [ur, ul] otherwise. Exact for
/// components that are convex or concave.
double godunov_flux(const FluxFunction& f, double ul, double ur, int axis = 0, double speed = 0.0);
/// Local Lax-Friedrichs flux of the same G.
double llf_flux(const FluxFunction& f, double ul, double ur, int axis = 0, double speed = 0.0);
/// Monotonized-central slope.
double mc_slope(double left, double center, double right);

struct StepDiagnostics {
  double t;
  double sup_norm;
  double tv;
  double mass;
  double max_grad;
  double dt;
};

struct Snapshot {
  double t;
  Field field;
};

/// Output of an integration. In the similarity frame `t` is s = log t.
class Trajectory {
 public:
  void add_snapshot(const Field& field);
  void add_step(const Field& field, double dt, double accounted_mass_change = 0.0);

  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  const std::vector<StepDiagnostics>& diagnostics() const { return diagnostics_; }
  const Field& final_state() const;
  std::size_t steps() const { return diagnostics_.size(); }
  /// Cumulative perturbation mass change explained by fluxes through the box
  /// boundary and by explicit sources, one entry per step.
  const std::vector<double>& accounted_mass_change() const { return accounted_; }

  /// Largest amount by which max u rose or min u fell relative to the data.
  double max_principle_excess() const { return excess_; }
  void record_excess(double e) { excess_ = std::max(excess_, e); }

  std::string diagnostics_csv() const;
  void write_diagnostics_csv(const std::string& path) const;

 private:
  std::vector<Snapshot> snapshots_;
  std::vector<StepDiagnostics> diagnostics_;
  std::vector<double> accounted_;
  double excess_ = 0.0;
};

/// Diagnostics of a single state (dt column left to the caller).
StepDiagnostics measure(const Field& u);

/// Largest step allowed by the CFL condition for the current state.
double stable_time_step(const Field& u, const FluxFunction& f, const SchemeConfig& cfg);

/// One Strang step: half exact semigroup, explicit SSP-RK2 finite-volume
/// convection of phi + v, half semigroup. The background scale advances by dt.
Field step_nonlinear(const Field& u, const FluxFunction& f, const SchemeConfig& cfg, double dt,
                     std::size_t step_index = 0);

Trajectory evolve_nonlinear(const Field& u0, const FluxFunction& f, const SchemeConfig& cfg, double t_end,
                            std::vector<double> output_times = {});

struct SimilarityOptions {
  /// Perturbation value imposed in the ghost cells beyond |y| = Y, as a
  /// function of (y, s). Empty means zero (pinned to the far-field profile).
  std::function<double(double, double)> inflow;
  /// Step size override; 0 uses the CFL value.
  double step = 0.0;
};

/// Integrator of U_s = y . grad U - div f(U) - Lambda U on the y-box. The
/// state is phi_1 + V with the background fixed at scale 1 and the f = 0
/// discrete operator of phi_1 removed, so V = 0 is steady when f = 0.
class SimilarityIntegrator {
 public:
  SimilarityIntegrator(const Field& U0, FluxFunction f, SchemeConfig cfg, SimilarityOptions options = {},
                       double s0 = 0.0);

  const Field& state() const { return state_; }
  double s() const { return s_; }
  double step_size() const { return ds_; }
  std::size_t steps_taken() const { return steps_; }
  /// sup |U^{k+1} - U^k| / ds of the last step.
  double residual() const { return residual_; }

  void step(Trajectory* trajectory = nullptr);
  void advance(std::size_t count, Trajectory* trajectory = nullptr);
  /// Steps until s >= target (fixed step size, may overshoot by < ds).
  void advance_to(double target, Trajectory* trajectory = nullptr);

 private:
  std::vector<double> rhs(const std::vector<double>& v, double s) const;

  FluxFunction f_;
  SchemeConfig cfg_;
  SimilarityOptions options_;
  Field state_;
  std::vector<double> phi_;
  std::vector<double> phi_operator_;
  double ds_ = 0.0;
  double s_ = 0.0;
  double residual_ = 0.0;
  std::size_t steps_ = 0;
  double range_lo_ = 0.0, range_hi_ = 0.0;
  bool godunov_ = true;
};

Trajectory evolve_similarity(const Field& U0, const FluxFunction& f, const SchemeConfig& cfg, double s_end,
                             SimilarityOptions options = {}, std::vector<double> output_s = {});

/// Time-dependent vector coefficient, piecewise linear in t between samples.
class CoefficientTrajectory {
 public:
  CoefficientTrajectory(std::vector<double> times, std::vector<VectorField> samples);
  static CoefficientTrajectory constant(const Grid& grid, std::vector<double> value, double t0, double t1);

  const Grid& grid() const { return samples_.front().grid; }
  double start() const { return times_.front(); }
  double end() const { return times_.back(); }
  int components() const { return static_cast<int>(samples_.front().components.size()); }
  /// g(t); throws outside [start, end].
  VectorField at(double t) const;
  double sup_norm() const;

 private:
  std::vector<double> times_;
  std::vector<VectorField> samples_;
};

/// Solves v_t + div(g v) + Lambda^s v = eps Laplacian v pseudo-spectrally
/// with an integrating-factor RK4 step. Linear in v0; the mean of v is
/// preserved to rounding.
Trajectory evolve_linear_continuity(const Field& v0, const CoefficientTrajectory& g, const SchemeConfig& cfg,
                                    double t_end, std::vector<double> output_times = {});

}  // namespace fsl
