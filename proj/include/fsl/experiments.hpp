#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fsl/evolve.hpp"
#include "fsl/norms.hpp"
#include "fsl/selfsimilar.hpp"

namespace fsl {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& name);

struct Series {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

struct FittedExponent {
  std::string name;
  double value = 0.0;
  /// Half width of the 95% confidence interval of the least-squares slope.
  double confidence = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

/// One asserted tolerance. A failed check names the offending instance.
struct Check {
  std::string name;
  bool passed = true;
  double measured = 0.0;
  double limit = 0.0;
  std::string detail;
};

/// One inequality instance LHS <= RHS (1 + tol).
struct BoundInstance {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool holds() const;
  double ratio() const;
};

struct ExperimentReport {
  std::string id;
  std::string inputs_digest;
  nlohmann::json inputs;
  std::uint64_t seed = 0;
  std::vector<Series> series;
  std::vector<FittedExponent> exponents;
  std::vector<BoundInstance> bounds;
  std::vector<Check> checks;
  /// Best constants observed (for example the largest LHS/RHS ratio).
  std::vector<std::pair<std::string, double>> constants;
  std::vector<std::string> notes;
  Verdict verdict = Verdict::pass;
  /// Set when a measurement hit the discretization floor.
  bool inconclusive = false;
  std::string inconclusive_reason;
  double runtime_seconds = 0.0;

  /// Artifacts written next to the report; not part of the JSON.
  std::vector<std::pair<std::string, Field>> snapshots;
  std::string diagnostics_csv;
  std::vector<std::pair<std::string, std::string>> files;

  void add_check(std::string name, bool passed, double measured, double limit, std::string detail = {});
  void add_series(Series s) { series.push_back(std::move(s)); }
  void add_constant(std::string name, double value) { constants.emplace_back(std::move(name), value); }
  void mark_inconclusive(std::string reason);
  const Check* find_check(const std::string& name) const;
  double constant(const std::string& name) const;
  /// fail if any check failed, else inconclusive if flagged, else pass.
  Verdict finalize();

  nlohmann::json to_json() const;
  static ExperimentReport from_json(const nlohmann::json& j);
};

/// Inputs shared by every verifier. Fields a verifier does not use are
/// ignored by it but still enter the digest.
struct ExperimentParams {
  std::string flux = "burgers";
  int dim = 1;
  /// Jump data h = mean - amplitude sign(x) (n = 1).
  double amplitude = 1.0;
  double mean = 0.0;
  /// Smoothing scale tau of the data phi_tau.
  double scale = 1.0;
  /// Angular table of h for n = 2; empty means cos(theta) sampled at 64 angles.
  std::vector<double> angular_table;
  std::size_t points = 4096;
  double half_width = 128.5;
  SchemeConfig scheme;

  /// bump, tail, indicator, two_bumps or none.
  std::string perturbation = "bump";
  double perturbation_amplitude = 0.5;
  double perturbation_width = 1.0;
  double tail_exponent = 0.55;
  /// (p, q) pairs for the decay verifier.
  std::vector<std::pair<double, double>> norms = {{1.0, kInf}};

  double t_start = 1.0;
  double t_end = 1e4;
  double fit_t_min = 10.0;
  double fit_t_max = 1e4;
  double slope_tolerance = 0.15;
  std::uint64_t seed = 20240611;
  int samples = 100;
  double profile_tolerance = 1e-8;
  double profile_s_max = 40.0;
  /// Coarse grid for refinement comparisons (0 means points / 2).
  std::size_t coarse_points = 0;
  /// (p, q1, q2) triples of the smoothing verifier.
  std::vector<std::array<double, 3>> smoothing_triples = {{kInf, 1.0, kInf}, {2.0, 1.0, 2.0}, {1.0, 1.0, kInf}};
  double tail_r1 = 10.0;
  double tail_r2 = 128.0;
  double tail_tolerance = 0.2;
  /// Wall-clock budget in seconds asserted by the verifier; 0 disables.
  double runtime_limit = 0.0;

  std::size_t coarse() const { return coarse_points ? coarse_points : points / 2; }

  nlohmann::json to_json() const;
  std::string digest() const;
};

FluxFunction make_flux(const ExperimentParams& p);
FarFieldProfile make_far_field(const ExperimentParams& p, double scale);
Grid make_grid(const ExperimentParams& p);

/// Least-squares slope of log y against log x with its 95% half width.
FittedExponent fit_log_slope(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi);

/// Shared, thread-safe cache of self-similar profiles keyed by their inputs.
const SelfSimilarProfile& cached_profile(const ExperimentParams& p);
const SelfSimilarProfile& cached_profile(const ExperimentParams& p, const Grid& grid);

ExperimentReport verify_decay_rates(const ExperimentParams& p);
ExperimentReport verify_bv_convergence(const ExperimentParams& p);
ExperimentReport verify_alibaud(const ExperimentParams& p);
ExperimentReport verify_bv_formula(const ExperimentParams& p);
ExperimentReport verify_smoothing_lemma(const ExperimentParams& p);
ExperimentReport verify_regularity_decay(const ExperimentParams& p);
ExperimentReport verify_fundamental_bounds(const ExperimentParams& p);
ExperimentReport verify_localization_smoothing(const ExperimentParams& p);
ExperimentReport verify_lipschitz_mode(const ExperimentParams& p);
ExperimentReport verify_profile(const ExperimentParams& p);
ExperimentReport verify_tail(const ExperimentParams& p);
ExperimentReport verify_linear_exactness(const ExperimentParams& p);
ExperimentReport verify_refinement(const ExperimentParams& p);
ExperimentReport verify_smoke_2d(const ExperimentParams& p);

struct ExperimentInfo {
  std::string id;
  std::string summary;
  std::string reference;
  std::string inputs;
  std::string outputs;
  std::string estimate;
  ExperimentParams defaults;
  std::function<ExperimentReport(const ExperimentParams&)> run;
};

const std::vector<ExperimentInfo>& experiment_registry();
/// Accepts the id with or without the "verify_" prefix.
const ExperimentInfo& find_experiment(const std::string& id);

/// Runs the verifier, stamping id, digest, seed and runtime, and finalizing
/// the verdict. Module errors propagate with the experiment id prepended.
ExperimentReport run_experiment(const std::string& id, const ExperimentParams& p);

/// Worker count: FSL_THREADS when set (>= 1), else hardware concurrency.
unsigned worker_count();

/// Runs jobs on up to worker_count() threads; results keep the job order.
/// The first exception is rethrown after all jobs finish.
template <class T>
std::vector<T> run_parallel(const std::vector<std::function<T()>>& jobs);

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fsl

#include "fsl/detail/parallel.hpp"
