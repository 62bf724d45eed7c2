#include "fsl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "fsl/error.hpp"

namespace fsl {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FourierTransform::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

FourierTransform::FourierTransform(const Grid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  const int n = static_cast<int>(grid.points());
  spectral_size_ = grid.dim() == 1 ? grid.points() / 2 + 1 : grid.points() * (grid.points() / 2 + 1);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->real = fftw_alloc_real(grid.size());
  plans_->spec = fftw_alloc_complex(spectral_size_);
  if (grid.dim() == 1) {
    plans_->fwd = fftw_plan_dft_r2c_1d(n, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_dft_c2r_1d(n, plans_->spec, plans_->real, FFTW_ESTIMATE);
  } else {
    plans_->fwd = fftw_plan_dft_r2c_2d(n, n, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_dft_c2r_2d(n, n, plans_->spec, plans_->real, FFTW_ESTIMATE);
  }
}

FourierTransform::~FourierTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->bwd);
  fftw_free(plans_->real);
  fftw_free(plans_->spec);
}

FourierTransform& FourierTransform::local(const Grid& grid) {
  thread_local std::map<std::tuple<int, double, std::size_t>, std::unique_ptr<FourierTransform>> cache;
  auto key = std::make_tuple(grid.dim(), grid.half_width(), grid.points());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<FourierTransform>(grid)).first;
  return *it->second;
}

void FourierTransform::forward(std::span<const double> in, std::vector<Complex>& out) {
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->fwd);
  out.resize(spectral_size_);
  std::memcpy(static_cast<void*>(out.data()), plans_->spec, spectral_size_ * sizeof(fftw_complex));
}

void FourierTransform::backward(std::span<const Complex> in, std::span<double> out) {
  std::memcpy(plans_->spec, static_cast<const void*>(in.data()), spectral_size_ * sizeof(fftw_complex));
  fftw_execute(plans_->bwd);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = plans_->real[i] * scale;
}

std::array<double, 2> FourierTransform::wave_vector(std::size_t k) const {
  const std::size_t n = grid_.points();
  const double base = std::numbers::pi / grid_.half_width();
  if (grid_.dim() == 1) return {base * static_cast<double>(k), 0.0};
  const std::size_t half = n / 2 + 1;
  std::size_t row = k / half, col = k % half;
  double kr = row <= n / 2 ? static_cast<double>(row) : static_cast<double>(row) - static_cast<double>(n);
  return {base * kr, base * static_cast<double>(col)};
}

bool FourierTransform::is_nyquist(std::size_t k) const {
  const std::size_t n = grid_.points();
  if (grid_.dim() == 1) return k == n / 2;
  const std::size_t half = n / 2 + 1;
  return k / half == n / 2 || k % half == n / 2;
}

std::vector<Complex> real_dft(std::span<const double> samples) {
  const int n = static_cast<int>(samples.size());
  std::vector<Complex> out(samples.size() / 2 + 1);
  double* in;
  fftw_complex* spec;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    in = fftw_alloc_real(samples.size());
    spec = fftw_alloc_complex(out.size());
    plan = fftw_plan_dft_r2c_1d(n, in, spec, FFTW_ESTIMATE);
  }
  std::copy(samples.begin(), samples.end(), in);
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(out.data()), spec, out.size() * sizeof(fftw_complex));
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(spec);
  }
  return out;
}

namespace {

template <class Symbol>
std::vector<double> build_symbol(const Grid& grid, Symbol&& fn) {
  FourierTransform& ft = FourierTransform::local(grid);
  std::vector<double> s(ft.spectral_size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    auto xi = ft.wave_vector(k);
    s[k] = fn(std::hypot(xi[0], xi[1]));
  }
  return s;
}

void check_order(double order) {
  if (!(order > 0.0 && order <= 2.0)) throw Error("fractional order s must lie in (0, 2]");
}

}  // namespace

SpectralOperator SpectralOperator::fractional_power(const Grid& grid, double order) {
  check_order(order);
  auto s = build_symbol(grid, [order](double xi) { return xi == 0.0 ? 0.0 : std::pow(xi, order); });
  return SpectralOperator(grid, Kind::fractional_power, order, std::move(s));
}

SpectralOperator SpectralOperator::semigroup(const Grid& grid, double t, double order, double viscosity) {
  check_order(order);
  if (!(t >= 0.0)) throw Error("semigroup time must be nonnegative");
  auto s = build_symbol(grid, [=](double xi) {
    double p = xi == 0.0 ? 0.0 : std::pow(xi, order);
    return std::exp(-t * p - viscosity * t * xi * xi);
  });
  return SpectralOperator(grid, Kind::semigroup, order, std::move(s));
}

std::vector<double> SpectralOperator::apply(std::span<const double> values) const {
  std::vector<double> out(values.begin(), values.end());
  apply_in_place(out);
  return out;
}

void SpectralOperator::apply_in_place(std::span<double> values) const {
  FourierTransform& ft = FourierTransform::local(grid_);
  thread_local std::vector<Complex> spec;
  ft.forward(values, spec);
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= symbol_[k];
  ft.backward(spec, values);
}

Field apply_lambda(const Field& field, double order) {
  check_order(order);
  if (field.has_background() && order != 1.0)
    throw Error("Lambda^s of a non-decaying background is only available for s = 1");
  auto out = SpectralOperator::fractional_power(field.grid(), order).apply(field.values());
  if (field.has_background()) {
    const auto& bg = *field.background();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bg.lambda_value(field.grid().position(i));
  }
  return Field(field.grid(), std::move(out), std::nullopt, field.time());
}

Field heat_semigroup(const Field& field, double t, double order) {
  if (!(t >= 0.0)) throw Error("heat_semigroup needs t >= 0");
  check_order(order);
  if (field.has_background() && order != 1.0)
    throw Error("the background evolves in closed form only for s = 1");
  if (t == 0.0) return field;
  auto out = SpectralOperator::semigroup(field.grid(), t, order).apply(field.values());
  std::optional<FarFieldProfile> bg;
  if (field.background()) bg = field.background()->with_scale(field.background()->scale() + t);
  return Field(field.grid(), std::move(out), std::move(bg), field.time() + t);
}

std::vector<double> spectral_derivative(const Grid& grid, std::span<const double> values, int axis) {
  FourierTransform& ft = FourierTransform::local(grid);
  thread_local std::vector<Complex> spec;
  ft.forward(values, spec);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (ft.is_nyquist(k)) {
      spec[k] = 0.0;
      continue;
    }
    spec[k] *= Complex(0.0, ft.wave_vector(k)[axis]);
  }
  std::vector<double> out(values.size());
  ft.backward(spec, out);
  return out;
}

}  // namespace fsl
