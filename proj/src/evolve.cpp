#include "fsl/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fsl/error.hpp"
#include "fsl/spectral.hpp"

namespace fsl {

namespace {

constexpr double kMaxPrincipleTol = 1e-6;

struct Range {
  double lo, hi;
};

Range value_range(const Field& u) {
  Range r{u.total(0), u.total(0)};
  for (std::size_t i = 1; i < u.grid().size(); ++i) {
    double v = u.total(i);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  if (u.background()) {
    r.lo = std::min(r.lo, u.background()->min_value());
    r.hi = std::max(r.hi, u.background()->max_value());
  }
  return r;
}

double bound_of(const Range& r) { return std::max(std::abs(r.lo), std::abs(r.hi)); }

bool resolve_godunov(const FluxFunction& f, const SchemeConfig& cfg, double m) {
  switch (cfg.flux) {
    case NumericalFlux::godunov: return true;
    case NumericalFlux::local_lax_friedrichs: return false;
    default: return f.smoothness() != Smoothness::lipschitz && f.convex_on(m);
  }
}

const SpectralOperator& cached_semigroup(const Grid& grid, double t, double order, double eps) {
  struct Entry {
    Grid grid;
    double t, order, eps;
    SpectralOperator op;
  };
  thread_local std::vector<Entry> cache;
  for (auto& e : cache)
    if (e.grid == grid && e.t == t && e.order == order && e.eps == eps) return e.op;
  if (cache.size() > 8) cache.erase(cache.begin());
  cache.push_back({grid, t, order, eps, SpectralOperator::semigroup(grid, t, order, eps)});
  return cache.back().op;
}

void check_finite(const std::vector<double>& v, const char* what, std::size_t step) {
  for (double x : v)
    if (!std::isfinite(x)) throw NonFiniteError(what, step);
}

Point line_point(const Grid& grid, int axis, std::size_t line, long k) {
  double along = -grid.half_width() + static_cast<double>(k) * grid.spacing();
  if (grid.dim() == 1) return {along, 0.0};
  double across = grid.coord(line);
  return axis == 0 ? Point{along, across} : Point{across, along};
}

std::size_t line_index(const Grid& grid, int axis, std::size_t line, std::size_t k) {
  if (grid.dim() == 1) return k;
  return axis == 0 ? grid.index(k, line) : grid.index(line, k);
}

double axis_tv(const Grid& grid, const std::vector<double>& u) {
  const std::size_t n = grid.points();
  double tv = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j) {
      tv += std::abs(u[grid.index(i, j + 1)] - u[grid.index(i, j)]);
      tv += std::abs(u[grid.index(j + 1, i)] - u[grid.index(j, i)]);
    }
  return tv * grid.spacing();
}

}  // namespace

void SchemeConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw CflError("CFL out of (0,1]");
  if (!(viscosity >= 0.0)) throw Error("viscosity must be nonnegative");
  if (!(order > 0.0 && order <= 2.0)) throw Error("fractional order s must lie in (0, 2]");
}

std::string to_string(NumericalFlux flux) {
  switch (flux) {
    case NumericalFlux::godunov: return "godunov";
    case NumericalFlux::local_lax_friedrichs: return "llf";
    default: return "automatic";
  }
}

NumericalFlux parse_numerical_flux(const std::string& name) {
  if (name == "automatic" || name == "auto") return NumericalFlux::automatic;
  if (name == "godunov") return NumericalFlux::godunov;
  if (name == "llf" || name == "local_lax_friedrichs" || name == "local-lax-friedrichs")
    return NumericalFlux::local_lax_friedrichs;
  throw Error("unknown numerical flux '" + name + "'");
}

namespace {

struct GeneralFlux {
  const FluxFunction& f;
  double value(double u, int axis) const { return f.value(u, axis); }
  double derivative(double u, int axis) const { return f.derivative(u, axis); }
  std::optional<double> critical_point(double speed, int axis) const { return f.critical_point(speed, axis); }
};

// u^2/2 times the axis weight, inlined.
struct BurgersFlux {
  double weight[2];
  double value(double u, int axis) const { return 0.5 * weight[axis] * u * u; }
  double derivative(double u, int axis) const { return weight[axis] * u; }
  std::optional<double> critical_point(double speed, int axis) const {
    if (weight[axis] == 0.0) return std::nullopt;
    return speed / weight[axis];
  }
};

template <class F>
double godunov_impl(const F& f, double ul, double ur, int axis, double speed) {
  auto G = [&](double u) { return f.value(u, axis) - speed * u; };
  auto dG = [&](double u) { return f.derivative(u, axis) - speed; };
  const bool want_min = ul <= ur;
  double gl = G(ul), gr = G(ur);
  double best = want_min ? std::min(gl, gr) : std::max(gl, gr);
  double lo = std::min(ul, ur), hi = std::max(ul, ur);
  double dlo = dG(lo), dhi = dG(hi);
  if (lo < hi && dlo * dhi < 0.0) {
    double star;
    auto closed = f.critical_point(speed, axis);
    if (closed && *closed >= lo && *closed <= hi) {
      star = *closed;
    } else {
      double a = lo, b = hi;
      for (int it = 0; it < 80 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
        double m = 0.5 * (a + b);
        if ((dG(m) < 0.0) == (dlo < 0.0)) a = m; else b = m;
      }
      star = 0.5 * (a + b);
    }
    double gs = G(star);
    best = want_min ? std::min(best, gs) : std::max(best, gs);
  }
  return best;
}

template <class F>
double llf_impl(const F& f, double ul, double ur, int axis, double speed) {
  double gl = f.value(ul, axis) - speed * ul, gr = f.value(ur, axis) - speed * ur;
  double alpha = std::max(std::abs(f.derivative(ul, axis) - speed), std::abs(f.derivative(ur, axis) - speed));
  return 0.5 * (gl + gr) - 0.5 * alpha * (ur - ul);
}

}  // namespace

namespace {

template <class F, class Ghost, class Speed>
void convective_rhs_with(const Grid& grid, const std::vector<double>& u, const F& f, bool godunov, bool muscl,
                         Ghost& ghost, Speed& speed, std::vector<double>& out, double* outflow);

// Finite-volume divergence along every axis, accumulated as out -= div F.
// `ghost(axis, line, k)` supplies total values for k in {-2, -1, N, N+1};
// `speed(axis, face_coord)` is the frame velocity subtracted from f.
// `outflow`, when given, receives the net flux through the box boundary.
template <class Ghost, class Speed>
void convective_rhs(const Grid& grid, const std::vector<double>& u, const FluxFunction& f, bool godunov,
                    bool muscl, Ghost&& ghost, Speed&& speed, std::vector<double>& out,
                    double* outflow = nullptr) {
  if (f.name() == "burgers") {
    BurgersFlux bf{{f.axis_weight(0), f.dim() > 1 ? f.axis_weight(1) : 0.0}};
    convective_rhs_with(grid, u, bf, godunov, muscl, ghost, speed, out, outflow);
  } else {
    convective_rhs_with(grid, u, GeneralFlux{f}, godunov, muscl, ghost, speed, out, outflow);
  }
}

template <class F, class Ghost, class Speed>
void convective_rhs_with(const Grid& grid, const std::vector<double>& u, const F& f, bool godunov, bool muscl,
                         Ghost& ghost, Speed& speed, std::vector<double>& out, double* outflow) {
  const double cross = grid.dim() == 1 ? 1.0 : grid.spacing();
  if (outflow) *outflow = 0.0;
  const std::size_t n = grid.points();
  const std::size_t lines = grid.dim() == 1 ? 1 : n;
  const double dx = grid.spacing();
  thread_local std::vector<double> b, slope, flux;
  b.resize(n + 4);
  slope.assign(n + 4, 0.0);
  flux.resize(n + 1);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    for (std::size_t line = 0; line < lines; ++line) {
      const std::size_t stride = (grid.dim() == 2 && axis == 0) ? n : 1;
      const std::size_t offset = grid.dim() == 1 ? 0 : (axis == 0 ? line : line * n);
      for (std::size_t k = 0; k < n; ++k) b[k + 2] = u[offset + k * stride];
      b[0] = ghost(axis, line, -2);
      b[1] = ghost(axis, line, -1);
      b[n + 2] = ghost(axis, line, static_cast<long>(n));
      b[n + 3] = ghost(axis, line, static_cast<long>(n) + 1);
      if (muscl)
        for (std::size_t j = 1; j <= n + 2; ++j) slope[j] = mc_slope(b[j - 1], b[j], b[j + 1]);
      for (std::size_t face = 0; face <= n; ++face) {
        double ul = b[face + 1] + 0.5 * slope[face + 1];
        double ur = b[face + 2] - 0.5 * slope[face + 2];
        double c = speed(axis, grid.coord(face) - 0.5 * dx);
        flux[face] = godunov ? godunov_impl(f, ul, ur, axis, c) : llf_impl(f, ul, ur, axis, c);
      }
      for (std::size_t k = 0; k < n; ++k) out[offset + k * stride] -= (flux[k + 1] - flux[k]) / dx;
      if (outflow) *outflow += (flux[n] - flux[0]) * cross;
    }
  }
}

}  // namespace

double godunov_flux(const FluxFunction& f, double ul, double ur, int axis, double speed) {
  return godunov_impl(GeneralFlux{f}, ul, ur, axis, speed);
}

double llf_flux(const FluxFunction& f, double ul, double ur, int axis, double speed) {
  return llf_impl(GeneralFlux{f}, ul, ur, axis, speed);
}

double mc_slope(double left, double center, double right) {
  double a = center - left, b = right - center;
  if (a * b <= 0.0) return 0.0;
  double c = 0.5 * (a + b);
  double m = std::min({std::abs(c), 2.0 * std::abs(a), 2.0 * std::abs(b)});
  return a > 0.0 ? m : -m;
}

void Trajectory::add_snapshot(const Field& field) {
  if (!snapshots_.empty() && !(field.time() > snapshots_.back().t))
    throw Error("snapshot times must be strictly increasing");
  snapshots_.push_back({field.time(), field});
}

void Trajectory::add_step(const Field& field, double dt, double accounted_mass_change) {
  auto d = measure(field);
  d.dt = dt;
  diagnostics_.push_back(d);
  double prev = accounted_.empty() ? 0.0 : accounted_.back();
  accounted_.push_back(prev + accounted_mass_change);
}

const Field& Trajectory::final_state() const {
  if (snapshots_.empty()) throw Error("trajectory has no snapshots");
  return snapshots_.back().field;
}

std::string Trajectory::diagnostics_csv() const {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "t,sup_norm,tv,mass,max_grad,dt\n";
  for (const auto& d : diagnostics_)
    os << d.t << ',' << d.sup_norm << ',' << d.tv << ',' << d.mass << ',' << d.max_grad << ',' << d.dt << '\n';
  return os.str();
}

void Trajectory::write_diagnostics_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << diagnostics_csv();
}

StepDiagnostics measure(const Field& u) {
  const Grid& g = u.grid();
  auto total = u.total_values();
  StepDiagnostics d{};
  d.t = u.time();
  d.sup_norm = u.sup_norm();
  double mass = 0.0;
  for (double v : u.values()) mass += v;
  d.mass = mass * g.cell_volume();
  double grad = 0.0;
  const std::size_t n = g.points();
  if (g.dim() == 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) grad = std::max(grad, std::abs(total[i + 1] - total[i]));
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) tv += std::abs(total[i + 1] - total[i]);
    if (u.background()) {
      tv += std::abs(total.front() - u.background()->far_value(Point{-1.0, 0.0}));
      tv += std::abs(total.back() - u.background()->far_value(Point{1.0, 0.0}));
    } else {
      tv += std::abs(total.front() - total.back());
    }
    d.tv = tv;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j + 1 < n; ++j) {
        grad = std::max(grad, std::abs(total[g.index(i, j + 1)] - total[g.index(i, j)]));
        grad = std::max(grad, std::abs(total[g.index(j + 1, i)] - total[g.index(j, i)]));
      }
    d.tv = axis_tv(g, total);
  }
  d.max_grad = grad / g.spacing();
  return d;
}

double stable_time_step(const Field& u, const FluxFunction& f, const SchemeConfig& cfg) {
  cfg.validate();
  double lip = f.lipschitz_on(bound_of(value_range(u)));
  return cfg.cfl * u.grid().spacing() / (u.grid().dim() * std::max(1.0, lip));
}

namespace {

double local_speed(const Field& u, const FluxFunction& f) {
  double best = 0.0;
  for (int axis = 0; axis < f.dim(); ++axis) {
    for (std::size_t i = 0; i < u.grid().size(); ++i)
      best = std::max(best, std::abs(f.derivative(u.total(i), axis)));
    if (u.background()) {
      best = std::max(best, std::abs(f.derivative(u.background()->min_value(), axis)));
      best = std::max(best, std::abs(f.derivative(u.background()->max_value(), axis)));
    }
  }
  return best;
}

Field step_impl(const Field& u, const FluxFunction& f, const SchemeConfig& cfg, double dt, std::size_t index,
                bool godunov, double* mass_change = nullptr) {
  if (mass_change) *mass_change = 0.0;
  const Grid& grid = u.grid();
  const auto& bg = u.background();
  std::vector<double> v = u.data();
  const auto& half = cached_semigroup(grid, 0.5 * dt, cfg.order, cfg.viscosity);
  half.apply_in_place(v);

  const double tau_mid = bg ? bg->scale() + 0.5 * dt : 0.0;
  const bool viscous_background = bg && cfg.viscosity > 0.0 && !bg->is_constant();
  if (!f.is_zero() || viscous_background) {
    std::optional<FarFieldProfile> mid;
    std::vector<double> phi(grid.size(), 0.0);
    if (bg) {
      mid = bg->with_scale(tau_mid);
      for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = mid->value(grid.position(i));
    }
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = phi[i] + v[i];

    std::vector<double> source(grid.size(), 0.0);
    if (viscous_background)
      for (std::size_t i = 0; i < source.size(); ++i) source[i] = cfg.viscosity * mid->laplacian(grid.position(i));

    double outflow = 0.0, stage_outflow = 0.0;
    auto rhs = [&](const std::vector<double>& state) {
      std::vector<double> out = source;
      if (f.is_zero()) return out;
      const std::size_t n = grid.points();
      auto ghost = [&](int axis, std::size_t line, long k) {
        std::size_t wrapped = static_cast<std::size_t>((k + static_cast<long>(n)) % static_cast<long>(n));
        std::size_t idx = line_index(grid, axis, line, wrapped);
        if (!mid) return state[idx];
        return mid->value(line_point(grid, axis, line, k)) + (state[idx] - phi[idx]);
      };
      auto speed = [](int, double) { return 0.0; };
      convective_rhs(grid, state, f, godunov, cfg.second_order, ghost, speed, out, &stage_outflow);
      outflow += 0.5 * stage_outflow;
      return out;
    };

    auto k1 = rhs(w);
    std::vector<double> w1(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) w1[i] = w[i] + dt * k1[i];
    auto k2 = rhs(w1);
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = 0.5 * (w[i] + w1[i] + dt * k2[i]) - phi[i];
    if (mass_change) {
      double src = 0.0;
      for (double x : source) src += x;
      *mass_change = dt * (src * grid.cell_volume() - outflow);
    }
  }

  half.apply_in_place(v);
  check_finite(v, "non-finite value in nonlinear step", index);
  std::optional<FarFieldProfile> next;
  if (bg) next = bg->with_scale(bg->scale() + dt);
  return Field(grid, std::move(v), std::move(next), u.time() + dt);
}

void check_compatible(const Field& u, const FluxFunction& f, const SchemeConfig& cfg) {
  cfg.validate();
  if (f.dim() != u.grid().dim()) throw Error("flux dimension does not match the grid");
  if (u.has_background() && cfg.order != 1.0 && !u.background()->is_constant())
    throw Error("a non-constant background requires s = 1");
}

}  // namespace

Field step_nonlinear(const Field& u, const FluxFunction& f, const SchemeConfig& cfg, double dt,
                     std::size_t step_index) {
  check_compatible(u, f, cfg);
  if (!(dt > 0.0)) throw Error("time step must be positive");
  double limit = cfg.cfl * u.grid().spacing() / (u.grid().dim() * std::max(1.0, local_speed(u, f)));
  if (dt > limit * (1.0 + 1e-9)) throw CflError("time step violates the CFL condition");
  bool godunov = resolve_godunov(f, cfg, bound_of(value_range(u)));
  return step_impl(u, f, cfg, dt, step_index, godunov);
}

Trajectory evolve_nonlinear(const Field& u0, const FluxFunction& f, const SchemeConfig& cfg, double t_end,
                            std::vector<double> output_times) {
  check_compatible(u0, f, cfg);
  if (!(t_end > u0.time())) throw Error("t_end must exceed the initial time");
  std::sort(output_times.begin(), output_times.end());
  output_times.erase(std::unique(output_times.begin(), output_times.end()), output_times.end());
  std::erase_if(output_times, [&](double t) { return t <= u0.time() || t >= t_end; });
  output_times.push_back(t_end);

  const Range range0 = value_range(u0);
  const double dt_max = stable_time_step(u0, f, cfg);
  const bool godunov = resolve_godunov(f, cfg, bound_of(range0));

  Trajectory traj;
  traj.add_snapshot(u0);
  Field u = u0;
  std::size_t step = 0, next_out = 0;
  while (next_out < output_times.size()) {
    double target = output_times[next_out];
    double dt = std::min(dt_max, target - u.time());
    bool hit = dt >= target - u.time() - 1e-12 * std::max(1.0, std::abs(target));
    if (hit) dt = target - u.time();
    double accounted = 0.0;
    u = step_impl(u, f, cfg, dt, step++, godunov, &accounted);
    if (hit) u = u.with_time(target);
    traj.add_step(u, dt, accounted);
    Range r = value_range(u);
    double excess = std::max({0.0, r.hi - range0.hi, range0.lo - r.lo});
    traj.record_excess(excess);
    if (cfg.enforce_max_principle && excess > kMaxPrincipleTol)
      throw Error("maximum principle violated by " + std::to_string(excess) + " at step " + std::to_string(step));
    if (hit) {
      traj.add_snapshot(u);
      ++next_out;
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Similarity frame

SimilarityIntegrator::SimilarityIntegrator(const Field& U0, FluxFunction f, SchemeConfig cfg,
                                           SimilarityOptions options, double s0)
    : f_(std::move(f)), cfg_(cfg), options_(std::move(options)), state_(U0), s_(s0) {
  check_compatible(U0, f_, cfg_);
  const Grid& grid = U0.grid();
  if (U0.has_background() && U0.background()->scale() != 1.0) {
    auto bg = *U0.background();
    auto unit = bg.with_scale(1.0);
    std::vector<double> v = U0.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += bg.value(grid.position(i)) - unit.value(grid.position(i));
    state_ = Field(grid, std::move(v), unit, s0);
  } else {
    state_ = U0.with_time(s0);
  }
  Range r = value_range(state_);
  range_lo_ = r.lo;
  range_hi_ = r.hi;
  const double lip = f_.lipschitz_on(bound_of(r));
  godunov_ = resolve_godunov(f_, cfg_, bound_of(r));
  const double Y = grid.half_width();
  if (!(Y > lip + 1.0)) throw Error("similarity box too small: need Y > max characteristic speed + 1");
  ds_ = options_.step > 0.0 ? options_.step : cfg_.cfl * grid.spacing() / (grid.dim() * std::max(1.0, lip + Y));

  phi_.assign(grid.size(), 0.0);
  if (state_.background())
    for (std::size_t i = 0; i < phi_.size(); ++i) phi_[i] = state_.background()->value(grid.position(i));
  // Discrete f = 0 operator applied to phi.
  phi_operator_.assign(grid.size(), 0.0);
  if (state_.background()) {
    auto zero = FluxFunction::zero(grid.dim());
    const auto& bg = *state_.background();
    auto ghost = [&](int axis, std::size_t line, long k) { return bg.value(line_point(grid, axis, line, k)); };
    auto speed = [](int, double y) { return y; };
    convective_rhs(grid, phi_, zero, true, cfg_.second_order, ghost, speed, phi_operator_);
    for (std::size_t i = 0; i < phi_.size(); ++i) phi_operator_[i] -= grid.dim() * phi_[i];
  }
}

std::vector<double> SimilarityIntegrator::rhs(const std::vector<double>& v, double s) const {
  const Grid& grid = state_.grid();
  const std::size_t n = grid.points();
  std::vector<double> total(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) total[i] = phi_[i] + v[i];
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = -grid.dim() * total[i] - phi_operator_[i];
  const auto& bg = state_.background();
  auto ghost = [&](int axis, std::size_t line, long k) {
    Point p = line_point(grid, axis, line, k);
    double base = bg ? bg->value(p) : 0.0;
    double pert = 0.0;
    if (options_.inflow) {
      pert = options_.inflow(p[axis], s);
    } else if (!bg) {
      long clamped = std::clamp<long>(k, 0, static_cast<long>(n) - 1);
      pert = v[line_index(grid, axis, line, static_cast<std::size_t>(clamped))];
    }
    return base + pert;
  };
  auto speed = [](int, double y) { return y; };
  convective_rhs(grid, total, f_, godunov_, cfg_.second_order, ghost, speed, out);
  return out;
}

void SimilarityIntegrator::step(Trajectory* trajectory) {
  const Grid& grid = state_.grid();
  std::vector<double> v = state_.data();
  const std::vector<double> before = v;
  const auto& half = cached_semigroup(grid, 0.5 * ds_, cfg_.order, cfg_.viscosity);
  half.apply_in_place(v);
  auto k1 = rhs(v, s_);
  std::vector<double> v1(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) v1[i] = v[i] + ds_ * k1[i];
  auto k2 = rhs(v1, s_ + ds_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (v[i] + v1[i] + ds_ * k2[i]);
  half.apply_in_place(v);
  check_finite(v, "non-finite value in similarity step", steps_);
  double change = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) change = std::max(change, std::abs(v[i] - before[i]));
  residual_ = change / ds_;
  s_ += ds_;
  ++steps_;
  state_ = Field(grid, std::move(v), state_.background(), s_);
  if (trajectory) {
    trajectory->add_step(state_, ds_);
    if (!options_.inflow) {
      Range r = value_range(state_);
      double excess = std::max({0.0, r.hi - range_hi_, range_lo_ - r.lo});
      trajectory->record_excess(excess);
      if (cfg_.enforce_max_principle && excess > kMaxPrincipleTol)
        throw Error("maximum principle violated by " + std::to_string(excess) + " in the similarity frame");
    }
  }
}

void SimilarityIntegrator::advance(std::size_t count, Trajectory* trajectory) {
  for (std::size_t k = 0; k < count; ++k) step(trajectory);
}

void SimilarityIntegrator::advance_to(double target, Trajectory* trajectory) {
  while (s_ < target - 1e-12 * std::max(1.0, std::abs(target))) step(trajectory);
}

Trajectory evolve_similarity(const Field& U0, const FluxFunction& f, const SchemeConfig& cfg, double s_end,
                             SimilarityOptions options, std::vector<double> output_s) {
  SimilarityIntegrator integrator(U0, f, cfg, std::move(options), U0.time());
  if (!(s_end > integrator.s())) throw Error("s_end must exceed the initial s");
  std::sort(output_s.begin(), output_s.end());
  std::erase_if(output_s, [&](double s) { return s <= integrator.s() || s >= s_end; });
  output_s.push_back(s_end);
  Trajectory traj;
  traj.add_snapshot(integrator.state());
  for (double target : output_s) {
    integrator.advance_to(target, &traj);
    if (integrator.s() > traj.snapshots().back().t) traj.add_snapshot(integrator.state());
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Linear continuity equation

CoefficientTrajectory::CoefficientTrajectory(std::vector<double> times, std::vector<VectorField> samples)
    : times_(std::move(times)), samples_(std::move(samples)) {
  if (times_.empty() || times_.size() != samples_.size()) throw Error("coefficient trajectory is malformed");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1])) throw Error("coefficient times must be strictly increasing");
  for (const auto& s : samples_) {
    if (!(s.grid == samples_.front().grid)) throw Error("coefficient samples live on different grids");
    if (s.components.size() != static_cast<std::size_t>(s.grid.dim()))
      throw Error("coefficient needs one component per axis");
  }
}

CoefficientTrajectory CoefficientTrajectory::constant(const Grid& grid, std::vector<double> value, double t0,
                                                      double t1) {
  if (value.size() != static_cast<std::size_t>(grid.dim())) throw Error("coefficient needs one value per axis");
  VectorField vf{grid, {}};
  for (double c : value) vf.components.emplace_back(grid.size(), c);
  return CoefficientTrajectory({t0, t1}, {vf, vf});
}

VectorField CoefficientTrajectory::at(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(end()));
  if (t < start() - slack || t > end() + slack) throw Error("coefficient trajectory does not cover the time range");
  if (times_.size() == 1 || t <= start()) return samples_.front();
  if (t >= end()) return samples_.back();
  std::size_t k = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
  VectorField out = samples_[k - 1];
  for (std::size_t c = 0; c < out.components.size(); ++c)
    for (std::size_t i = 0; i < out.components[c].size(); ++i)
      out.components[c][i] = (1.0 - w) * samples_[k - 1].components[c][i] + w * samples_[k].components[c][i];
  return out;
}

double CoefficientTrajectory::sup_norm() const {
  double m = 0.0;
  for (const auto& s : samples_) m = std::max(m, s.sup_norm());
  return m;
}

Trajectory evolve_linear_continuity(const Field& v0, const CoefficientTrajectory& g, const SchemeConfig& cfg,
                                    double t_end, std::vector<double> output_times) {
  cfg.validate();
  if (v0.has_background()) throw Error("linear continuity evolves perturbations without background");
  if (!(v0.grid() == g.grid())) throw Error("coefficient grid does not match the data");
  const double t0 = v0.time();
  if (!(t_end > t0)) throw Error("t_end must exceed the initial time");
  if (g.start() > t0 + 1e-12 || g.end() < t_end - 1e-12)
    throw Error("coefficient trajectory does not cover the time range");

  const Grid& grid = v0.grid();
  FourierTransform& ft = FourierTransform::local(grid);
  const std::size_t m = ft.spectral_size();
  std::vector<double> symbol(m);
  for (std::size_t k = 0; k < m; ++k) {
    auto xi = ft.wave_vector(k);
    double r = std::hypot(xi[0], xi[1]);
    symbol[k] = (r == 0.0 ? 0.0 : std::pow(r, cfg.order)) + cfg.viscosity * r * r;
  }

  // -div(g v) in Fourier space.
  auto transport = [&](const std::vector<Complex>& vhat, double t, std::vector<Complex>& out) {
    std::vector<double> v(grid.size());
    ft.backward(vhat, v);
    VectorField gt = g.at(t);
    out.assign(m, Complex(0.0, 0.0));
    std::vector<double> prod(grid.size());
    std::vector<Complex> spec;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = gt.components[axis][i] * v[i];
      ft.forward(prod, spec);
      for (std::size_t k = 0; k < m; ++k)
        if (!ft.is_nyquist(k)) out[k] -= Complex(0.0, ft.wave_vector(k)[axis]) * spec[k];
    }
  };

  std::sort(output_times.begin(), output_times.end());
  std::erase_if(output_times, [&](double t) { return t <= t0 || t >= t_end; });
  output_times.push_back(t_end);
  const double dt_max = cfg.cfl * grid.spacing() / (grid.dim() * std::max(1.0, g.sup_norm()));

  Trajectory traj;
  traj.add_snapshot(v0);
  std::vector<Complex> vhat;
  ft.forward(v0.values(), vhat);
  double t = t0;
  std::size_t step = 0;
  std::vector<Complex> k1, k2, k3, k4, tmp(m);
  std::vector<double> values(grid.size());
  for (double target : output_times) {
    while (t < target - 1e-12 * std::max(1.0, std::abs(target))) {
      double dt = std::min(dt_max, target - t);
      if (target - t - dt < 1e-12 * std::max(1.0, std::abs(target))) dt = target - t;
      // Lawson RK4 in the variable w = exp(t A) vhat.
      std::vector<double> eh(m), ef(m);
      for (std::size_t k = 0; k < m; ++k) {
        eh[k] = std::exp(-0.5 * dt * symbol[k]);
        ef[k] = eh[k] * eh[k];
      }
      transport(vhat, t, k1);
      for (std::size_t k = 0; k < m; ++k) tmp[k] = eh[k] * (vhat[k] + 0.5 * dt * k1[k]);
      transport(tmp, t + 0.5 * dt, k2);
      for (std::size_t k = 0; k < m; ++k) tmp[k] = eh[k] * vhat[k] + 0.5 * dt * k2[k];
      transport(tmp, t + 0.5 * dt, k3);
      for (std::size_t k = 0; k < m; ++k) tmp[k] = ef[k] * vhat[k] + dt * eh[k] * k3[k];
      transport(tmp, t + dt, k4);
      for (std::size_t k = 0; k < m; ++k)
        vhat[k] = ef[k] * vhat[k] + dt / 6.0 * (ef[k] * k1[k] + 2.0 * eh[k] * (k2[k] + k3[k]) + k4[k]);
      t += dt;
      ft.backward(vhat, values);
      check_finite(values, "non-finite value in linear continuity step", step);
      ++step;
      traj.add_step(Field(grid, values, std::nullopt, t), dt);
    }
    t = target;
    traj.add_snapshot(Field(grid, values, std::nullopt, t));
  }
  return traj;
}

}  // namespace fsl
