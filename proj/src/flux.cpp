#include "fsl/flux.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsl/error.hpp"

namespace fsl {

namespace {

double sign(double u) { return (u > 0.0) - (u < 0.0); }

}  // namespace

FluxFunction FluxFunction::zero(int dim) {
  if (dim != 1 && dim != 2) throw Error("flux dimension must be 1 or 2");
  FluxFunction f;
  f.name_ = "zero";
  f.f_ = [](double) { return 0.0; };
  f.df_ = [](double) { return 0.0; };
  f.d2f_ = [](double) { return 0.0; };
  f.inverse_df_ = [](double) { return std::optional<double>{}; };
  f.weights_.assign(dim, 1.0);
  f.is_zero_ = true;
  return f;
}

FluxFunction FluxFunction::burgers(std::vector<double> axis_weights) {
  if (axis_weights.empty() || axis_weights.size() > 2) throw Error("flux dimension must be 1 or 2");
  FluxFunction f;
  f.name_ = "burgers";
  f.f_ = [](double u) { return 0.5 * u * u; };
  f.df_ = [](double u) { return u; };
  f.d2f_ = [](double) { return 1.0; };
  f.inverse_df_ = [](double c) { return std::optional<double>(c); };
  f.weights_ = std::move(axis_weights);
  return f;
}

FluxFunction FluxFunction::linear(std::vector<double> velocity) {
  if (velocity.empty() || velocity.size() > 2) throw Error("flux dimension must be 1 or 2");
  FluxFunction f;
  f.name_ = "linear";
  f.f_ = [](double u) { return u; };
  f.df_ = [](double) { return 1.0; };
  f.d2f_ = [](double) { return 0.0; };
  f.inverse_df_ = [](double) { return std::optional<double>{}; };
  f.weights_ = std::move(velocity);
  return f;
}

FluxFunction FluxFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw Error("polynomial flux needs at least one coefficient");
  FluxFunction f;
  f.name_ = "polynomial";
  auto eval = [](const std::vector<double>& c, double u) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  };
  std::vector<double> d1, d2;
  for (std::size_t j = 1; j < coeffs.size(); ++j) d1.push_back(coeffs[j] * static_cast<double>(j));
  for (std::size_t j = 1; j < d1.size(); ++j) d2.push_back(d1[j] * static_cast<double>(j));
  if (d1.empty()) d1.push_back(0.0);
  if (d2.empty()) d2.push_back(0.0);
  f.f_ = [eval, coeffs](double u) { return eval(coeffs, u); };
  f.df_ = [eval, d1](double u) { return eval(d1, u); };
  f.d2f_ = [eval, d2](double u) { return eval(d2, u); };
  f.inverse_df_ = [](double) { return std::optional<double>{}; };
  f.weights_ = {1.0};
  f.is_zero_ = std::all_of(coeffs.begin() + 1, coeffs.end(), [](double c) { return c == 0.0; });
  return f;
}

FluxFunction FluxFunction::absolute() {
  FluxFunction f;
  f.name_ = "abs";
  f.f_ = [](double u) { return std::abs(u); };
  f.df_ = [](double u) { return sign(u); };
  f.d2f_ = [](double) { return 0.0; };
  f.inverse_df_ = [](double c) {
    // Subgradient of |u| contains c only at u = 0 when |c| < 1.
    return std::abs(c) < 1.0 ? std::optional<double>(0.0) : std::optional<double>{};
  };
  f.weights_ = {1.0};
  f.smoothness_ = Smoothness::lipschitz;
  return f;
}

FluxFunction FluxFunction::half_abs_square() {
  FluxFunction f;
  f.name_ = "half_abs_square";
  f.f_ = [](double u) { return 0.5 * std::abs(u) * u; };
  f.df_ = [](double u) { return std::abs(u); };
  f.d2f_ = [](double u) { return sign(u); };
  f.inverse_df_ = [](double) { return std::optional<double>{}; };
  f.weights_ = {1.0};
  f.smoothness_ = Smoothness::c1alpha;
  return f;
}

FluxFunction FluxFunction::preset(const std::string& name, int dim) {
  if (name == "zero") return zero(dim);
  if (name == "burgers") return dim == 1 ? burgers({1.0}) : burgers({1.0, 1.0});
  if (name == "linear") return dim == 1 ? linear({1.0}) : linear({1.0, 1.0});
  if (dim != 1) throw Error("flux preset '" + name + "' is only available for n = 1");
  if (name == "abs") return absolute();
  if (name == "half_abs_square") return half_abs_square();
  if (name == "cubic") return polynomial({0.0, 0.0, 0.0, 1.0});
  throw Error("unknown flux preset '" + name + "'");
}

double FluxFunction::lipschitz_on(double m) const {
  if (!(m >= 0.0)) throw Error("lipschitz_on needs m >= 0");
  double wmax = 0.0;
  for (double w : weights_) wmax = std::max(wmax, std::abs(w));
  if (is_zero_ || wmax == 0.0) return 0.0;
  // Dense sample containing the 1024-point linspace of [-m, m] as a subset,
  // plus the exact presets' extreme points.
  const int coarse = 1023, refine = 16;
  const int count = coarse * refine + 1;
  double best = 0.0;
  for (int i = 0; i < count; ++i) {
    double u = -m + 2.0 * m * static_cast<double>(i) / static_cast<double>(count - 1);
    best = std::max(best, std::abs(df_(u)));
  }
  best = std::max({best, std::abs(df_(m)), std::abs(df_(-m)), std::abs(df_(0.0))});
  return best * wmax;
}

bool FluxFunction::convex_on(double m) const {
  if (is_zero_) return true;
  const int count = 2049;
  bool up = true, down = true;
  for (double w : weights_) {
    for (int i = 0; i < count; ++i) {
      double u = -m + 2.0 * m * static_cast<double>(i) / (count - 1);
      double c = w * d2f_(u);
      if (c < -1e-13) up = false;
      if (c > 1e-13) down = false;
    }
  }
  // Linear components are both convex and concave; treat as convex.
  return up || (up && down);
}

std::optional<double> FluxFunction::critical_point(double speed, int axis) const {
  double w = weights_[axis];
  if (w == 0.0) return std::nullopt;
  return inverse_df_(speed / w);
}

FluxFunction parse_flux(const std::string& spec, int dim) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) return FluxFunction::preset(spec, dim);
  std::string kind = spec.substr(0, colon);
  std::vector<double> numbers;
  std::stringstream in(spec.substr(colon + 1));
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      numbers.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error("flux spec '" + spec + "': '" + item + "' is not a number");
    }
  }
  if (kind == "linear") {
    if (static_cast<int>(numbers.size()) != dim) throw Error("flux spec '" + spec + "' needs one velocity per axis");
    return FluxFunction::linear(numbers);
  }
  if (kind == "poly") {
    if (dim != 1) throw Error("polynomial fluxes are only available for n = 1");
    return FluxFunction::polynomial(numbers);
  }
  throw Error("unknown flux kind '" + kind + "' in '" + spec + "'");
}

}  // namespace fsl
