#include "fsl/selfsimilar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fsl/snapshot.hpp"

namespace fsl {

namespace {

double sup_total(const Field& u) {
  double m = 0.0;
  for (double v : u.total_values()) m = std::max(m, std::abs(v));
  return m;
}

bool is_monotone(const Field& u, const FarFieldProfile& h, double floor) {
  if (u.grid().dim() != 1) return false;
  double dir = h.far_value(Point{1.0, 0.0}) - h.far_value(Point{-1.0, 0.0});
  if (dir == 0.0) return false;
  dir = dir > 0.0 ? 1.0 : -1.0;
  auto v = u.total_values();
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (dir * (v[i + 1] - v[i]) < -floor) return false;
  return true;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) throw Error("tail fit needs at least two points in the window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

}  // namespace

Field SelfSimilarProfile::at_time(double t) const {
  if (!(t > 0.0)) throw Error("self-similar slice needs t > 0");
  if (t == 1.0) return profile;
  return rescale(profile, 1.0 / t, std::nullopt, 0.0).field;
}

double SelfSimilarProfile::value(double y) const {
  const Grid& g = profile.grid();
  if (g.dim() != 1) throw Error("point evaluation of a profile is implemented for n = 1 only");
  if (std::abs(y) > g.half_width()) throw Error("profile evaluation outside the box");
  double pt[1] = {y};
  return h.value(y) + trig_interpolate(profile.values(), g.half_width(), pt)[0];
}

int derivative_sign_changes(const Field& u, double floor) {
  if (u.grid().dim() != 1) throw Error("sign changes of the derivative are defined for n = 1 only");
  auto v = u.total_values();
  int changes = 0;
  int last = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    double d = v[i + 1] - v[i];
    if (std::abs(d) <= floor) continue;
    int sign = d > 0.0 ? 1 : -1;
    if (last != 0 && sign != last) ++changes;
    last = sign;
  }
  return changes;
}

SelfSimilarProfile compute_profile(const FarFieldProfile& h, const FluxFunction& f, const SchemeConfig& cfg,
                                   const Grid& grid, const ProfileOptions& options) {
  if (h.dim() != grid.dim()) throw Error("far-field profile dimension does not match the grid");
  if (!(options.tolerance > 0.0) || !(options.check_interval > 0.0) || !(options.s_max > 0.0))
    throw Error("profile tolerance, check interval and s_max must be positive");
  cfg.validate();
  auto unit = h.with_scale(1.0);
  SelfSimilarProfile out{.profile = Field::zeros(grid, unit, 1.0), .h = unit, .flux_name = f.name(), .history = {}};
  if (unit.is_constant()) {
    out.monotone = true;
    out.sign_changes = grid.dim() == 1 ? 0 : -1;
    out.history.push_back({0.0, 0.0, 0.0, out.sign_changes});
    return out;
  }

  SimilarityIntegrator integrator(Field::zeros(grid, unit, 0.0), f, cfg, options.similarity, 0.0);
  std::vector<double> previous = integrator.state().data();
  while (true) {
    integrator.advance_to(integrator.s() + options.check_interval);
    const Field& state = integrator.state();
    double change = 0.0;
    for (std::size_t i = 0; i < previous.size(); ++i)
      change = std::max(change, std::abs(state.data()[i] - previous[i]));
    previous = state.data();
    const double scale = std::max(sup_total(state), 1e-300);
    int changes = grid.dim() == 1 ? derivative_sign_changes(state, 1e-12 * scale) : -1;
    out.history.push_back({integrator.s(), integrator.residual(), change, changes});
    const double tol = options.tolerance * scale;
    if (integrator.residual() < tol && change < tol) break;
    if (integrator.s() >= options.s_max)
      throw NonConvergence("self-similar profile did not converge by s = " + std::to_string(options.s_max) +
                               " (residual " + std::to_string(integrator.residual()) + ")",
                           out.history);
  }

  const Field& state = integrator.state();
  out.profile = Field(grid, state.data(), state.background(), 1.0);
  out.residual = out.history.back().residual;
  out.change = out.history.back().change;
  out.s_final = integrator.s();
  const double scale = sup_total(out.profile);
  out.truncation = out.profile.boundary_annulus_sup() + options.tolerance * scale;
  out.sign_changes = out.history.back().sign_changes;
  out.monotone = is_monotone(out.profile, unit, 1e-13 * scale);
  return out;
}

TailFit fit_tail(const SelfSimilarProfile& profile, double r1, double r2) {
  if (profile.h.is_constant()) throw Error("tail fit refused: the profile is identically constant");
  const Grid& grid = profile.profile.grid();
  if (!(r1 > 0.0 && r2 > r1)) throw Error("tail window needs 0 < r1 < r2");
  if (r2 > 0.8 * grid.half_width()) throw Error("tail window exceeds 0.8 Y");
  const auto total = profile.profile.total_values();
  const double floor = 10.0 * profile.truncation;

  std::vector<double> lx, ly, nx, ny, px, py;
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Point y = grid.position(i);
    double r = std::hypot(y[0], y[1]);
    if (r < r1 || r > r2) continue;
    double d = std::abs(total[i] - profile.h.far_value(Point{y[0] / r, y[1] / r}));
    if (!(d > floor))
      throw Error("tail fit refused: |U - h| = " + std::to_string(d) + " at |y| = " + std::to_string(r) +
                  " is below 10x the truncation estimate");
    double weighted = d * std::sqrt(1.0 + r * r);
    hi = std::max(hi, weighted);
    lo = std::min(lo, weighted);
    lx.push_back(std::log(r));
    ly.push_back(std::log(d));
    if (grid.dim() == 1) {
      (y[0] < 0.0 ? nx : px).push_back(lx.back());
      (y[0] < 0.0 ? ny : py).push_back(ly.back());
    }
  }
  auto all = least_squares(lx, ly);
  TailFit fit;
  fit.slope = all.slope;
  fit.amplitude = std::exp(all.intercept);
  fit.residual = all.rms;
  fit.ratio = hi / lo;
  fit.points = lx.size();
  if (grid.dim() == 1) {
    fit.slope_negative = least_squares(nx, ny).slope;
    fit.slope_positive = least_squares(px, py).slope;
  } else {
    fit.slope_negative = fit.slope_positive = fit.slope;
  }
  return fit;
}

InvarianceDefect rescale_defect(const SelfSimilarProfile& profile, const FluxFunction& f, const SchemeConfig& cfg,
                                double lambda) {
  if (!(lambda > 1.0)) throw Error("rescale defect needs lambda > 1");
  const Grid& grid = profile.profile.grid();
  SimilarityIntegrator integrator(profile.profile, f, cfg, {}, 0.0);
  integrator.advance_to(std::log(lambda));
  Field similarity_slice(grid, integrator.state().data(), integrator.state().background(), 1.0);
  Field physical = rescale(similarity_slice, 1.0 / lambda, std::nullopt, 0.0).field;
  Field back = rescale(physical, lambda, std::nullopt, 0.0).field;
  auto a = back.total_values();
  auto b = profile.profile.total_values();
  const double reach = grid.half_width() / lambda - grid.spacing();
  double defect = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Point y = grid.position(i);
    if (std::max(std::abs(y[0]), std::abs(y[1])) > reach) continue;
    defect = std::max(defect, std::abs(a[i] - b[i]));
  }
  return {defect, interpolation_tolerance(profile.profile)};
}

double steady_step_defect(const SelfSimilarProfile& profile, const FluxFunction& f, const SchemeConfig& cfg,
                          double dt) {
  Field next = step_nonlinear(profile.profile, f, cfg, dt);
  Field expected = profile.at_time(1.0 + dt);
  auto a = next.total_values();
  auto b = expected.total_values();
  double defect = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) defect = std::max(defect, std::abs(a[i] - b[i]));
  return defect;
}

std::string profile_summary(const SelfSimilarProfile& profile, const TailFit* tail) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "flux = " << profile.flux_name << "\n";
  out << "dim = " << profile.profile.grid().dim() << "\n";
  out << "points = " << profile.profile.grid().points() << "\n";
  out << "half_width = " << profile.profile.grid().half_width() << "\n";
  out << "residual = " << profile.residual << "\n";
  out << "change = " << profile.change << "\n";
  out << "s_final = " << profile.s_final << "\n";
  out << "truncation = " << profile.truncation << "\n";
  out << "monotone = " << (profile.monotone ? "true" : "false") << "\n";
  out << "sign_changes = " << profile.sign_changes << "\n";
  if (tail) {
    out << "tail_slope = " << tail->slope << "\n";
    out << "tail_amplitude = " << tail->amplitude << "\n";
    out << "tail_residual = " << tail->residual << "\n";
    out << "tail_ratio = " << tail->ratio << "\n";
    out << "tail_slope_negative = " << tail->slope_negative << "\n";
    out << "tail_slope_positive = " << tail->slope_positive << "\n";
  }
  for (const auto& r : profile.history)
    out << "history = " << r.s << " " << r.residual << " " << r.change << " " << r.sign_changes << "\n";
  return out.str();
}

void export_profile(const SelfSimilarProfile& profile, const std::string& base, const TailFit* tail) {
  write_snapshot(profile.profile, base + ".fsl");
  std::ofstream out(base + ".txt");
  if (!out) throw Error("cannot write profile report " + base + ".txt");
  out << profile_summary(profile, tail);
  if (!out) throw Error("failed writing profile report " + base + ".txt");
}

}  // namespace fsl
