#include "fsl/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fsl/error.hpp"
#include "fsl/spectral.hpp"

namespace fsl {

Field::Field(Grid grid, std::vector<double> values, std::optional<FarFieldProfile> background, double time)
    : grid_(grid), values_(std::move(values)), background_(std::move(background)), time_(time) {
  if (values_.size() != grid_.size())
    throw Error("field has " + std::to_string(values_.size()) + " samples, grid expects " +
                std::to_string(grid_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw Error("field contains non-finite samples");
  if (background_ && background_->dim() != grid_.dim()) throw Error("background dimension differs from grid");
}

Field Field::zeros(const Grid& grid, std::optional<FarFieldProfile> background, double time) {
  return Field(grid, std::vector<double>(grid.size(), 0.0), std::move(background), time);
}

double Field::total(std::size_t i) const {
  if (!background_) return values_[i];
  return background_->value(grid_.position(i)) + values_[i];
}

std::vector<double> Field::total_values() const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = total(i);
  return out;
}

Field Field::flattened() const { return Field(grid_, total_values(), std::nullopt, time_); }

Field Field::with_time(double t) const { return Field(grid_, values_, background_, t); }

Field Field::with_values(std::vector<double> values) const {
  return Field(grid_, std::move(values), background_, time_);
}

double Field::boundary_annulus_sup() const {
  const double inner = 0.9 * grid_.half_width();
  double best = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    auto p = grid_.position(i);
    double r = grid_.dim() == 1 ? std::abs(p[0]) : std::max(std::abs(p[0]), std::abs(p[1]));
    if (r >= inner) best = std::max(best, std::abs(values_[i]));
  }
  return best;
}

double Field::sup_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) best = std::max(best, std::abs(total(i)));
  if (background_) best = std::max({best, std::abs(background_->min_value()), std::abs(background_->max_value())});
  return best;
}

double VectorField::sup_norm() const {
  double best = 0.0;
  for (const auto& c : components)
    for (double v : c) best = std::max(best, std::abs(v));
  return best;
}

Field make_shock_data(const Grid& grid, const FarFieldProfile& profile, std::vector<double> perturbation) {
  if (perturbation.size() != grid.size())
    throw Error("perturbation has " + std::to_string(perturbation.size()) + " samples, grid expects " +
                std::to_string(grid.size()));
  if (profile.dim() != grid.dim()) throw Error("far-field profile dimension differs from grid");
  return Field(grid, std::move(perturbation), profile, 0.0);
}

std::vector<double> trig_interpolate(std::span<const double> samples, double half_width,
                                     std::span<const double> points) {
  const std::size_t n = samples.size();
  // Direct DFT of the samples; n is modest wherever this is used.
  std::vector<std::complex<double>> coeff = real_dft(samples);
  const double omega = std::numbers::pi / half_width;
  std::vector<double> out(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    double phase = omega * (points[p] + half_width);
    std::complex<double> step(std::cos(phase), std::sin(phase));
    std::complex<double> e(1.0, 0.0);
    double acc = coeff[0].real();
    for (std::size_t k = 1; k <= n / 2; ++k) {
      e *= step;
      if (k % 64 == 0) e = std::polar(1.0, phase * static_cast<double>(k));
      if (2 * k == n)
        acc += coeff[k].real() * e.real();
      else
        acc += 2.0 * (coeff[k] * e).real();
    }
    out[p] = acc / static_cast<double>(n);
  }
  return out;
}

namespace {

// Resample periodic samples onto per-axis target points (tensor grid).
std::vector<double> resample(const Grid& src, std::span<const double> values, std::span<const double> ax,
                             double scale, double& coverage) {
  const std::size_t n = src.points();
  const double x_max = src.half_width();
  std::vector<double> pts(ax.size());
  std::vector<char> inside(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) {
    pts[i] = scale * ax[i];
    inside[i] = pts[i] >= -x_max && pts[i] <= x_max - src.spacing();
  }
  std::size_t in_count = std::count(inside.begin(), inside.end(), 1);
  if (src.dim() == 1) {
    coverage = static_cast<double>(in_count) / static_cast<double>(ax.size());
    auto out = trig_interpolate(values, x_max, pts);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (!inside[i]) out[i] = 0.0;
    return out;
  }
  coverage = std::pow(static_cast<double>(in_count) / static_cast<double>(ax.size()), 2);
  const std::size_t m = ax.size();
  // Along the last axis for every source row, then along the first axis.
  std::vector<double> stage(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = trig_interpolate(values.subspan(i * n, n), x_max, pts);
    std::copy(row.begin(), row.end(), stage.begin() + static_cast<std::ptrdiff_t>(i * m));
  }
  std::vector<double> out(m * m);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = stage[i * m + j];
    auto col = trig_interpolate(column, x_max, pts);
    for (std::size_t i = 0; i < m; ++i) out[i * m + j] = (inside[i] && inside[j]) ? col[i] : 0.0;
  }
  return out;
}

}  // namespace

RescaleResult rescale(const Field& u, double lambda, std::optional<Grid> target, double min_coverage) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error("rescale needs lambda > 0");
  Grid dst = target.value_or(u.grid());
  if (dst.dim() != u.grid().dim()) throw Error("rescale target grid dimension differs");
  std::vector<double> axis(dst.points());
  for (std::size_t i = 0; i < axis.size(); ++i) axis[i] = dst.coord(i);
  double coverage = 1.0;
  std::vector<double> values = resample(u.grid(), u.values(), axis, lambda, coverage);
  if (coverage < min_coverage)
    throw Error("rescale by " + std::to_string(lambda) + " under-covers the target box (coverage " +
                std::to_string(coverage) + ")");
  std::optional<FarFieldProfile> bg;
  if (u.background()) bg = u.background()->with_scale(u.background()->scale() / lambda);
  return {Field(dst, std::move(values), std::move(bg), u.time() / lambda), coverage};
}

VectorField g_coefficient(const Field& u, const Field& us, const FluxFunction& f) {
  if (!(u.grid() == us.grid())) throw Error("g_coefficient needs fields on the same grid");
  if (f.dim() != u.grid().dim()) throw Error("flux dimension differs from grid");
  auto a = u.total_values();
  auto b = us.total_values();
  VectorField g{u.grid(), {}};
  for (int k = 0; k < f.dim(); ++k) {
    std::vector<double> comp(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      double diff = a[i] - b[i];
      if (std::abs(diff) < 1e-12 * (1.0 + std::abs(a[i]) + std::abs(b[i])))
        comp[i] = f.derivative(a[i], k);
      else
        comp[i] = (f.value(a[i], k) - f.value(b[i], k)) / diff;
    }
    g.components.push_back(std::move(comp));
  }
  return g;
}

double interpolation_tolerance(const Field& field) {
  const Grid& g = field.grid();
  if (g.dim() != 1) {
    // Row-wise estimate along the last axis, worst row.
    double worst = 0.0;
    const std::size_t n = g.points();
    for (std::size_t i = 0; i < n; i += std::max<std::size_t>(1, n / 32)) {
      Grid line(1, g.half_width(), n);
      std::vector<double> row(field.values().begin() + static_cast<std::ptrdiff_t>(i * n),
                              field.values().begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
      worst = std::max(worst, interpolation_tolerance(Field(line, row)));
    }
    return worst;
  }
  const std::size_t n = g.points();
  std::vector<double> even(n / 2), odd_points(n / 2), odd(n / 2);
  for (std::size_t i = 0; i < n / 2; ++i) {
    even[i] = field.values()[2 * i];
    odd[i] = field.values()[2 * i + 1];
    odd_points[i] = g.coord(2 * i + 1);
  }
  auto est = trig_interpolate(even, g.half_width(), odd_points);
  double worst = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) worst = std::max(worst, std::abs(est[i] - odd[i]));
  return worst;
}

}  // namespace fsl
