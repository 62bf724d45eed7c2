#include "experiment_support.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "fsl/error.hpp"
#include "fsl/norms.hpp"

namespace fsl::detail {

double perturbation_at(const ExperimentParams& p, const Point& x) {
  const double a = p.perturbation_amplitude;
  const double w = p.perturbation_width;
  const double r2 = x[0] * x[0] + (p.dim == 2 ? x[1] * x[1] : 0.0);
  const double gauss = std::exp(-0.5 * r2 / (w * w));
  if (p.perturbation == "none") return 0.0;
  if (p.perturbation == "bump") return a * gauss;
  if (p.perturbation == "unit_bump") return gauss / std::pow(std::sqrt(2.0 * std::numbers::pi) * w, p.dim);
  if (p.perturbation == "tail") return a * std::pow(1.0 + r2, -0.5 * p.tail_exponent);
  if (p.perturbation == "indicator") {
    bool inside = std::abs(x[0]) < 0.5 && (p.dim == 1 || std::abs(x[1]) < 0.5);
    return inside ? a : 0.0;
  }
  if (p.perturbation == "two_bumps") {
    auto g = [&](double c) {
      double dx = x[0] - c;
      return std::exp(-0.5 * (dx * dx + (p.dim == 2 ? x[1] * x[1] : 0.0)) / (w * w));
    };
    return a * (g(-5.0 * w) + g(5.0 * w));
  }
  throw Error("unknown perturbation kind '" + p.perturbation + "'");
}

std::vector<double> perturbation_values(const ExperimentParams& p, const Grid& grid, double stretch) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point x = grid.position(i);
    v[i] = perturbation_at(p, Point{stretch * x[0], stretch * x[1]});
  }
  return v;
}

std::function<double(double, double)> perturbation_inflow(const ExperimentParams& p) {
  if (p.perturbation != "tail") return {};
  return [a = p.perturbation_amplitude, beta = p.tail_exponent](double y, double s) {
    double x = y * std::exp(s);
    return a * std::pow(1.0 + x * x, -0.5 * beta);
  };
}

std::vector<double> difference(const Field& a, const Field& b) {
  auto x = a.total_values();
  auto y = b.total_values();
  if (x.size() != y.size()) throw Error("difference of fields on different grids");
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
  return x;
}

double difference_norm(const Field& a, const Field& b, double q) {
  auto d = difference(a, b);
  return lq_norm(a.grid(), d, q);
}

double ball_integral(const Grid& grid, std::span<const double> values, double x0, double radius) {
  if (grid.dim() != 1) throw Error("ball integrals are implemented for n = 1");
  const double dx = grid.spacing();
  const double lo = x0 - radius, hi = x0 + radius;
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.points(); ++i) {
    double c = grid.coord(i);
    double len = std::min(hi, c + 0.5 * dx) - std::max(lo, c - 0.5 * dx);
    if (len > 0.0) acc += len * values[i];
  }
  return acc;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> random_bumps(std::mt19937_64& rng, const Grid& grid, int count, double amp, double spread,
                                 double w_lo, double w_hi) {
  std::vector<double> v(grid.size(), 0.0);
  for (int k = 0; k < count; ++k) {
    double a = uniform(rng, -amp, amp);
    double c0 = uniform(rng, -spread, spread);
    double c1 = grid.dim() == 2 ? uniform(rng, -spread, spread) : 0.0;
    double w = std::exp(uniform(rng, std::log(w_lo), std::log(w_hi)));
    for (std::size_t i = 0; i < v.size(); ++i) {
      Point x = grid.position(i);
      double r2 = (x[0] - c0) * (x[0] - c0) + (grid.dim() == 2 ? (x[1] - c1) * (x[1] - c1) : 0.0);
      v[i] += a * std::exp(-0.5 * r2 / (w * w));
    }
  }
  return v;
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

std::string pq_label(double p, double q) {
  auto s = [](double v) { return std::isinf(v) ? std::string("inf") : format_double(v); };
  return "(" + s(p) + "," + s(q) + ")";
}

nlohmann::json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from(const nlohmann::json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error("bad number '" + s + "' in report");
  }
  return j.get<double>();
}

std::vector<double> log_times(double t0, double t1, int per_decade) {
  if (!(t0 > 0.0 && t1 > t0)) throw Error("log time grid needs 0 < t0 < t1");
  std::vector<double> out;
  const double steps = std::log10(t1 / t0) * per_decade;
  const int n = static_cast<int>(std::ceil(steps - 1e-9));
  for (int k = 0; k <= n; ++k) out.push_back(std::min(t1, t0 * std::pow(10.0, static_cast<double>(k) / per_decade)));
  return out;
}

ExperimentParams with_points(const ExperimentParams& p, std::size_t points) {
  ExperimentParams q = p;
  q.points = points;
  return q;
}

}  // namespace fsl::detail
