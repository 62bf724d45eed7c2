#include <algorithm>
#include <cmath>
#include <random>

#include "experiment_support.hpp"
#include "fsl/error.hpp"
#include "fsl/norms.hpp"
#include "fsl/spectral.hpp"

namespace fsl {

using namespace detail;

namespace {

constexpr double kBoundFloor = 1e-3;
constexpr int kPairs = 10;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{seed, index};
  return std::mt19937_64(seq);
}

/// Snapshots of a physical-frame run at the requested times.
/// Snapshots at `times`; `boundary_mass`, when given, receives the cumulative
/// perturbation mass that crossed the box boundary up to each time.
std::vector<Field> run_to(const Field& u0, const FluxFunction& f, const SchemeConfig& cfg,
                          const std::vector<double>& times, std::vector<double>* boundary_mass = nullptr) {
  auto traj = evolve_nonlinear(u0, f, cfg, times.back(), times);
  auto at = [](double a, double t) { return std::abs(a - t) <= 1e-12 * std::max(1.0, t); };
  std::vector<Field> out;
  if (boundary_mass) boundary_mass->clear();
  for (double t : times) {
    auto it = std::find_if(traj.snapshots().begin(), traj.snapshots().end(),
                           [&](const Snapshot& s) { return at(s.t, t); });
    if (it == traj.snapshots().end()) throw Error("missing snapshot at t = " + format_double(t));
    out.push_back(it->field);
    if (boundary_mass) {
      const auto& steps = traj.diagnostics();
      auto st = std::find_if(steps.begin(), steps.end(), [&](const StepDiagnostics& d) { return at(d.t, t); });
      if (st == steps.end()) throw Error("missing step at t = " + format_double(t));
      boundary_mass->push_back(traj.accounted_mass_change()[static_cast<std::size_t>(st - steps.begin())]);
    }
  }
  return out;
}

std::vector<double> abs_values(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  return v;
}

struct Instance {
  std::size_t pair;
  double x0;
  double radius;
  std::size_t time;
};

std::vector<Instance> draw_instances(std::uint64_t seed, int samples, std::size_t n_times) {
  auto rng = stream(seed, 1000);
  std::vector<Instance> out;
  const int per_pair = (samples + kPairs - 1) / kPairs;
  for (int k = 0; k < kPairs; ++k)
    for (int i = 0; i < per_pair && static_cast<int>(out.size()) < samples; ++i) {
      double x0 = uniform(rng, -10.0, 10.0);
      double radius = uniform(rng, 0.5, 4.0);
      auto t = std::uniform_int_distribution<std::size_t>(0, n_times - 1)(rng);
      out.push_back({static_cast<std::size_t>(k), x0, radius, t});
    }
  return out;
}

struct Measured {
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<std::string> labels;
  double contraction_excess = 0.0;
  double boundary_mass = 0.0;
};

double max_ratio(const Measured& m) {
  double c = 0.0;
  for (std::size_t i = 0; i < m.lhs.size(); ++i) c = std::max(c, m.rhs[i] > 0.0 ? m.lhs[i] / m.rhs[i] : 0.0);
  return c;
}

/// Grid-to-grid change of the instance ratios: the discretization part of the
/// tolerance of an inequality check.
double grid_discrepancy(const Measured& fine, const Measured& coarse) {
  double d = 0.0;
  for (std::size_t i = 0; i < fine.lhs.size(); ++i) {
    double scale = std::max(fine.rhs[i], coarse.rhs[i]);
    if (scale > 0.0) d = std::max(d, std::abs(fine.lhs[i] - coarse.lhs[i]) / scale);
  }
  return d;
}

void record_bounds(ExperimentReport& r, const std::string& what, const Measured& fine, const Measured& coarse,
                   std::size_t n_fine, std::size_t n_coarse) {
  const double tol = kBoundFloor + grid_discrepancy(fine, coarse);
  std::size_t failures = 0;
  std::string first;
  double worst = 0.0;
  for (std::size_t i = 0; i < fine.lhs.size(); ++i) {
    BoundInstance b{fine.labels[i], fine.lhs[i], fine.rhs[i], tol};
    if (!b.holds()) {
      if (failures++ == 0) first = b.label;
    }
    worst = std::max(worst, b.ratio());
    r.bounds.push_back(std::move(b));
  }
  r.add_check(what + " holds on all instances", failures == 0, worst, 1.0 + tol,
              failures == 0 ? std::to_string(fine.lhs.size()) + " instances"
                            : std::to_string(failures) + " violations, first " + first);
  r.add_constant("max ratio N=" + std::to_string(n_fine), max_ratio(fine));
  r.add_constant("max ratio N=" + std::to_string(n_coarse), max_ratio(coarse));
  r.add_constant("tolerance", tol);
  Series ratios{what + " ratio", "instance", "LHS / RHS", {}, {}};
  for (std::size_t i = 0; i < fine.lhs.size(); ++i) {
    ratios.x.push_back(static_cast<double>(i));
    ratios.y.push_back(fine.rhs[i] > 0.0 ? fine.lhs[i] / fine.rhs[i] : 0.0);
  }
  r.add_series(std::move(ratios));
}

const std::vector<double> kBoundTimes{0.25, 0.5, 1.0, 2.0};

Measured measure_alibaud(const ExperimentParams& p, const Grid& grid, const std::vector<Instance>& instances) {
  const auto f = make_flux(p);
  const auto bg = make_far_field(p, p.scale);
  Measured m;
  for (int k = 0; k < kPairs; ++k) {
    auto rng = stream(p.seed, static_cast<std::uint64_t>(k));
    auto v = random_bumps(rng, grid, 3, 0.5, 10.0, 0.5, 3.0);
    auto w = random_bumps(rng, grid, 3, 0.5, 10.0, 0.5, 3.0);
    Field u0(grid, v, bg), w0(grid, w, bg);
    const double lip = f.lipschitz_on(std::max(u0.sup_norm(), w0.sup_norm()));
    std::vector<double> inflow_u, inflow_w;
    auto u = run_to(u0, f, p.scheme, kBoundTimes, &inflow_u);
    auto uw = run_to(w0, f, p.scheme, kBoundTimes, &inflow_w);
    const auto diff0 = abs_values(difference(u0, w0));
    const double l1_0 = lq_norm(grid, diff0, 1.0);
    std::vector<std::vector<double>> diff, heat;
    for (std::size_t j = 0; j < kBoundTimes.size(); ++j) {
      diff.push_back(abs_values(difference(u[j], uw[j])));
      heat.push_back(heat_semigroup(Field(grid, diff0), kBoundTimes[j]).data());
      const double through_boundary = std::abs(inflow_u[j] - inflow_w[j]);
      const double l1 = lq_norm(grid, diff.back(), 1.0);
      m.boundary_mass = std::max(m.boundary_mass, through_boundary);
      m.contraction_excess = std::max(m.contraction_excess, (l1 - l1_0 - through_boundary) / l1_0);
    }
    for (const auto& in : instances) {
      if (in.pair != static_cast<std::size_t>(k)) continue;
      const double t = kBoundTimes[in.time];
      m.lhs.push_back(ball_integral(grid, diff[in.time], in.x0, in.radius));
      m.rhs.push_back(ball_integral(grid, heat[in.time], in.x0, in.radius + lip * t));
      m.labels.push_back("pair " + std::to_string(k) + " x0=" + format_double(in.x0) + " R=" +
                         format_double(in.radius) + " t=" + format_double(t));
    }
  }
  return m;
}

/// Discrete derivative at the faces x_i + dx/2; the periodic wrap face is dropped.
std::vector<double> face_derivative(const Field& u) {
  auto tot = u.total_values();
  const double dx = u.grid().spacing();
  std::vector<double> w(tot.size(), 0.0);
  for (std::size_t i = 0; i + 1 < tot.size(); ++i) w[i] = std::abs(tot[i + 1] - tot[i]) / dx;
  return w;
}

Measured measure_bv_formula(const ExperimentParams& p, const Grid& grid, const std::vector<Instance>& instances) {
  const auto f = make_flux(p);
  const auto bg = make_far_field(p, p.scale);
  const double dx = grid.spacing();
  Measured m;
  for (int k = 0; k < kPairs; ++k) {
    auto rng = stream(p.seed, static_cast<std::uint64_t>(k));
    Field u0(grid, random_bumps(rng, grid, 3, 0.5, 10.0, 0.5, 3.0), bg);
    const double lip = f.lipschitz_on(u0.sup_norm());
    auto u = run_to(u0, f, p.scheme, kBoundTimes);
    const auto w0 = face_derivative(u0);
    std::vector<std::vector<double>> w, heat;
    for (std::size_t j = 0; j < kBoundTimes.size(); ++j) {
      w.push_back(face_derivative(u[j]));
      heat.push_back(heat_semigroup(Field(grid, w0), kBoundTimes[j]).data());
    }
    for (const auto& in : instances) {
      if (in.pair != static_cast<std::size_t>(k)) continue;
      const double t = kBoundTimes[in.time];
      // Shifting the center by -dx/2 evaluates the weight at the faces.
      const Point center{in.x0 - 0.5 * dx, 0.0};
      m.lhs.push_back(weighted_l1(grid, w[in.time], MovingWeight(center, in.radius)));
      m.rhs.push_back(weighted_l1(grid, heat[in.time], MovingWeight(center, in.radius, lip, t)));
      m.labels.push_back("datum " + std::to_string(k) + " x0=" + format_double(in.x0) + " R=" +
                         format_double(in.radius) + " t=" + format_double(t));
    }
  }
  return m;
}

void require_1d(const ExperimentParams& p, const std::string& what) {
  if (p.dim != 1) throw Error(what + " is implemented for n = 1");
}

}  // namespace

ExperimentReport verify_alibaud(const ExperimentParams& p) {
  require_1d(p, "the local contraction verifier");
  ExperimentReport r;
  const auto instances = draw_instances(p.seed, p.samples, kBoundTimes.size());
  const Grid fine = make_grid(p);
  const Grid coarse = make_grid(with_points(p, p.coarse()));
  auto runs = run_parallel<Measured>({[&] { return measure_alibaud(p, fine, instances); },
                                      [&] { return measure_alibaud(p, coarse, instances); }});
  record_bounds(r, "local L1 contraction", runs[0], runs[1], fine.points(), coarse.points());
  const double excess = std::max(runs[0].contraction_excess, 0.0);
  r.add_check("global L1 contraction of the pairs net of boundary inflow", excess <= 1e-6, excess, 1e-6,
              "relative to the initial distance");
  r.add_constant("mass through the box boundary", runs[0].boundary_mass);
  return r;
}

ExperimentReport verify_bv_formula(const ExperimentParams& p) {
  require_1d(p, "the local BV verifier");
  ExperimentReport r;
  const auto instances = draw_instances(p.seed, p.samples, kBoundTimes.size());
  const Grid fine = make_grid(p);
  const Grid coarse = make_grid(with_points(p, p.coarse()));
  auto runs = run_parallel<Measured>({[&] { return measure_bv_formula(p, fine, instances); },
                                      [&] { return measure_bv_formula(p, coarse, instances); }});
  record_bounds(r, "weighted BV bound", runs[0], runs[1], fine.points(), coarse.points());
  return r;
}

namespace {

/// Test data for the smoothing estimate. Member 0 is the narrowest bump,
/// which realizes the sharp rate at the smallest sampled time.
std::vector<std::vector<double>> smoothing_suite(const ExperimentParams& p, const Grid& grid, double w_min) {
  std::vector<std::vector<double>> suite;
  auto rng = stream(p.seed, 0);
  for (int k = 0; k < p.samples; ++k) {
    if (k == 0) {
      suite.push_back(Field::sample(grid, [&](const Point& x) {
                        return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]) / (w_min * w_min));
                      }).data());
    } else if (k % 5 == 0) {
      const double c = std::floor(uniform(rng, -2.0, 3.0));
      const double a = uniform(rng, 0.5, 1.5);
      suite.push_back(Field::sample(grid, [&](const Point& x) {
                        bool in = x[0] >= c && x[0] < c + 1.0;
                        if (grid.dim() == 2) in = in && x[1] >= 0.0 && x[1] < 1.0;
                        return in ? a : 0.0;
                      }).data());
    } else {
      suite.push_back(random_bumps(rng, grid, 1 + k % 3, 1.0, 3.0, w_min, 1.0));
    }
  }
  return suite;
}

struct SmoothingRun {
  std::vector<double> times;
  /// worst[triple][time] = max over the suite of |P_t * w|_{p,q2} / |w|_{p,q1}.
  std::vector<std::vector<double>> worst;
  /// The same ratio for the narrowest bump alone.
  std::vector<std::vector<double>> narrowest;
};

SmoothingRun measure_smoothing(const ExperimentParams& p, const Grid& grid, const std::vector<double>& times,
                               double w_min) {
  const auto suite = smoothing_suite(p, grid, w_min);
  SmoothingRun out{times, std::vector<std::vector<double>>(p.smoothing_triples.size(),
                                                           std::vector<double>(times.size(), 0.0))};
  std::vector<std::vector<std::vector<double>>> ratios(suite.size());
  parallel_for(suite.size(), [&](std::size_t k) {
    const Field w(grid, suite[k]);
    ratios[k].assign(p.smoothing_triples.size(), std::vector<double>(times.size(), 0.0));
    for (std::size_t j = 0; j < times.size(); ++j) {
      const auto pw = heat_semigroup(w, times[j], p.scheme.order);
      for (std::size_t i = 0; i < p.smoothing_triples.size(); ++i) {
        const auto& [pp, q1, q2] = p.smoothing_triples[i];
        const double den = amalgam_norm(w, {pp, q1});
        if (den > 0.0) ratios[k][i][j] = amalgam_norm(pw, {pp, q2}) / den;
      }
    }
  });
  for (const auto& rk : ratios)
    for (std::size_t i = 0; i < rk.size(); ++i)
      for (std::size_t j = 0; j < times.size(); ++j) out.worst[i][j] = std::max(out.worst[i][j], rk[i][j]);
  out.narrowest = ratios.front();
  return out;
}

std::string triple_label(const std::array<double, 3>& t) {
  auto s = [](double v) { return std::isinf(v) ? std::string("inf") : format_double(v); };
  return "(" + s(t[0]) + "," + s(t[1]) + "," + s(t[2]) + ")";
}

}  // namespace

/// Upper end of the small-time window: well above the narrowest width and
/// well below the unit cube.
constexpr double kSmallTime = 0.0625;

ExperimentReport verify_smoothing_lemma(const ExperimentParams& p) {
  ExperimentReport r;
  if (p.samples < 1) throw Error("smoothing verifier needs at least one datum");
  std::vector<double> times;
  for (int k = 7; k >= 1; --k) times.push_back(std::ldexp(1.0, -k));
  const Grid fine = make_grid(p);
  const Grid coarse = make_grid(with_points(p, p.coarse()));
  const double w_min = 1e-3;
  if (w_min < 2.0 * coarse.spacing())
    throw Error("smoothing verifier needs at least 2 cells per narrowest width on the coarse grid");
  const auto runs = std::vector<SmoothingRun>{measure_smoothing(p, fine, times, w_min),
                                              measure_smoothing(p, coarse, times, w_min)};
  const double n = p.dim;
  for (std::size_t i = 0; i < p.smoothing_triples.size(); ++i) {
    const auto& tr = p.smoothing_triples[i];
    const std::string label = triple_label(tr);
    const double expected = -n * (1.0 / tr[1] - 1.0 / tr[2]);
    const auto& worst = runs[0].worst[i];
    r.add_series({"worst ratio " + label, "t", "max |P_t w|/|w|", times, worst});
    r.add_series({"narrowest bump ratio " + label, "t", "|P_t w|/|w|", times, runs[0].narrowest[i]});
    r.add_constant("suite envelope slope " + label, fit_log_slope(times, worst, times.front(), times.back()).value);
    auto fit = fit_log_slope(times, runs[0].narrowest[i], times.front(), kSmallTime);
    fit.name = "smoothing exponent " + label;
    fit.expected = expected;
    fit.tolerance = 0.1;
    r.exponents.push_back(fit);
    r.add_check(fit.name, std::abs(fit.value - expected) <= fit.tolerance, fit.value, fit.tolerance,
                "expected " + format_double(expected));
    for (std::size_t g = 0; g < runs.size(); ++g) {
      double c = 0.0;
      for (std::size_t j = 0; j < times.size(); ++j)
        c = std::max(c, runs[g].worst[i][j] / std::pow(times[j], expected));
      const std::size_t pts = g == 0 ? fine.points() : coarse.points();
      r.add_constant("C " + label + " N=" + std::to_string(pts), c);
      if (g == 0) r.add_check("uniform constant " + label + " is finite", std::isfinite(c), c, kInf);
    }
    if (tr[0] == tr[1] && tr[1] == tr[2]) {
      const double m = *std::max_element(worst.begin(), worst.end());
      r.add_check("Young bound " + label, m <= 1.0 + 1e-6, m, 1.0 + 1e-6);
    }
  }
  return r;
}

ExperimentReport verify_localization_smoothing(const ExperimentParams& p) {
  require_1d(p, "the localization verifier");
  ExperimentReport r;
  const auto [pp, qq] = p.norms.front();
  const std::vector<double> early{0.0625, 0.125, 0.25, 0.5};
  const std::vector<double> late{0.8, 0.9, 1.0};
  std::vector<double> times = early;
  times.insert(times.end(), late.begin(), late.end());
  const Grid fine = make_grid(p);
  const Grid coarse = make_grid(with_points(p, p.coarse()));

  auto measure = [&](const Grid& grid) {
    const auto f = make_flux(p);
    const auto bg = make_far_field(p, p.scale);
    Field u0(grid, perturbation_values(p, grid), bg), w0(grid, std::vector<double>(grid.size(), 0.0), bg);
    auto u = run_to(u0, f, p.scheme, times);
    auto w = run_to(w0, f, p.scheme, times);
    const double base = amalgam_norm(grid, difference(u0, w0), {pp, 1.0});
    if (!(base > 0.0)) throw Error("localization verifier needs a nonzero perturbation");
    double c1 = 0.0, c2 = 0.0, mid = 0.0;
    std::vector<double> series;
    for (std::size_t j = 0; j < times.size(); ++j) {
      auto v = difference(u[j], w[j]);
      const double loc = amalgam_norm(grid, v, {pp, 1.0});
      series.push_back(loc);
      if (j < early.size()) c1 = std::max(c1, loc / base);
      if (times[j] == 0.5) mid = loc;
      if (j >= early.size()) c2 = std::max(c2, lq_norm(grid, v, qq) / mid);
    }
    return std::vector<double>{c1, c2};
  };
  auto cs = run_parallel<std::vector<double>>({[&] { return measure(fine); }, [&] { return measure(coarse); }});
  const std::string label = pq_label(pp, qq);
  const char* names[] = {"C localization", "C smoothing"};
  for (int k = 0; k < 2; ++k) {
    const double a = cs[0][k], b = cs[1][k];
    r.add_constant(std::string(names[k]) + " N=" + std::to_string(fine.points()), a);
    r.add_constant(std::string(names[k]) + " N=" + std::to_string(coarse.points()), b);
    r.add_check(std::string(names[k]) + " " + label + " is finite", std::isfinite(a), a, kInf);
    const double spread = std::abs(a - b) / std::max(a, b);
    r.add_check(std::string(names[k]) + " stable under refinement", spread <= 0.2, spread, 0.2);
    if (make_flux(p).is_zero()) r.add_check(std::string(names[k]) + " at most 10 for f = 0", a <= 10.0, a, 10.0);
  }
  return r;
}

}  // namespace fsl
