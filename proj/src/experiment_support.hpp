#pragma once

#include <chrono>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fsl/experiments.hpp"

namespace fsl::detail {

/// Perturbation v0 of the selected kind evaluated at x.
double perturbation_at(const ExperimentParams& p, const Point& x);
std::vector<double> perturbation_values(const ExperimentParams& p, const Grid& grid, double stretch = 1.0);

/// Ghost values for tail data in the similarity frame, empty otherwise.
std::function<double(double, double)> perturbation_inflow(const ExperimentParams& p);

/// L^q norm of a - b over the grid (totals when backgrounds are attached).
double difference_norm(const Field& a, const Field& b, double q);
std::vector<double> difference(const Field& a, const Field& b);

/// Integral over the interval [x0 - R, x0 + R] with fractional end cells.
double ball_integral(const Grid& grid, std::span<const double> values, double x0, double radius);

/// Random bump mixture with `count` Gaussians, amplitudes in [-amp, amp],
/// centers in [-spread, spread] and widths in [w_lo, w_hi].
std::vector<double> random_bumps(std::mt19937_64& rng, const Grid& grid, int count, double amp, double spread,
                                 double w_lo, double w_hi);

double uniform(std::mt19937_64& rng, double lo, double hi);

std::string format_double(double v);
/// "(p,q)" with inf spelled out.
std::string pq_label(double p, double q);

/// Writes inf/nan as strings so reports stay valid JSON.
nlohmann::json number(double v);
double number_from(const nlohmann::json& j);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Dyadic-like sample times t0 * 10^(k / per_decade) up to t1 inclusive.
std::vector<double> log_times(double t0, double t1, int per_decade);

/// Copy of the params with a different grid size.
ExperimentParams with_points(const ExperimentParams& p, std::size_t points);

}  // namespace fsl::detail
