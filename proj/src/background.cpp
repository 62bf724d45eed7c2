#include "fsl/background.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fsl/error.hpp"

namespace fsl {

namespace {

constexpr double kPi = std::numbers::pi;

// Disk radius r(rho) = (sqrt(rho^2+1) - 1)/rho of the angular Poisson series
// and its first two derivatives.
struct DiskRadius {
  double r, dr, d2r;
};

DiskRadius disk_radius(double rho) {
  double s = std::sqrt(rho * rho + 1.0);
  double r = rho / (s + 1.0);
  double dr = 1.0 / (s * (s + 1.0));
  double ds = rho / s;
  double d2r = -ds * (2.0 * s + 1.0) / (s * s * (s + 1.0) * (s + 1.0));
  return {r, dr, d2r};
}

}  // namespace

FarFieldProfile FarFieldProfile::jump(double amplitude, double mean, double scale) {
  if (!std::isfinite(amplitude) || !std::isfinite(mean)) throw Error("jump parameters must be finite");
  if (!(scale >= 0.0)) throw Error("reference scale tau must be nonnegative");
  FarFieldProfile p;
  p.dim_ = 1;
  p.scale_ = scale;
  p.amplitude_ = amplitude;
  p.mean_ = mean;
  p.h_min_ = mean - std::abs(amplitude);
  p.h_max_ = mean + std::abs(amplitude);
  return p;
}

FarFieldProfile FarFieldProfile::angular(std::vector<double> h_table, double scale) {
  if (h_table.size() < 4) throw Error("angular table needs at least 4 samples");
  if (!(scale >= 0.0)) throw Error("reference scale tau must be nonnegative");
  for (double h : h_table)
    if (!std::isfinite(h)) throw Error("angular table contains a non-finite value");
  FarFieldProfile p;
  p.dim_ = 2;
  p.scale_ = scale;
  auto ang = std::make_shared<Angular>();
  const std::size_t m = h_table.size();
  ang->table_size = m;
  ang->modes.resize(m / 2 + 1);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double theta = 2.0 * kPi * static_cast<double>(j * k % m) / static_cast<double>(m);
      acc += h_table[j] * std::complex<double>(std::cos(theta), -std::sin(theta));
    }
    ang->modes[k] = acc / static_cast<double>(m);
  }
  p.angular_ = std::move(ang);
  // Extremes of the trigonometric interpolant, sampled densely.
  p.table_ = std::move(h_table);
  p.h_min_ = p.h_max_ = p.angular_sum(1.0, 0.0, 0);
  const int dense = 4096;
  for (int j = 0; j < dense; ++j) {
    double v = p.angular_sum(1.0, 2.0 * kPi * j / dense, 0);
    p.h_min_ = std::min(p.h_min_, v);
    p.h_max_ = std::max(p.h_max_, v);
  }
  double spread = p.h_max_ - p.h_min_;
  if (spread < 1e-14 * (1.0 + std::abs(p.h_max_))) p.h_min_ = p.h_max_ = p.angular_->modes[0].real();
  return p;
}

FarFieldProfile FarFieldProfile::constant(int dim, double value, double scale) {
  if (dim == 1) return jump(0.0, value, scale);
  return angular(std::vector<double>(8, value), scale);
}

FarFieldProfile FarFieldProfile::with_scale(double tau) const {
  if (!(tau >= 0.0)) throw Error("reference scale tau must be nonnegative");
  FarFieldProfile p = *this;
  p.scale_ = tau;
  return p;
}

bool FarFieldProfile::operator==(const FarFieldProfile& other) const {
  return dim_ == other.dim_ && scale_ == other.scale_ && amplitude_ == other.amplitude_ &&
         mean_ == other.mean_ && table_ == other.table_;
}

// sum_k w_k Re(hat h_k base^k (ik)^d e^{ik theta}); base = 1 gives h(theta).
double FarFieldProfile::angular_sum(double base, double theta, int deriv_theta) const {
  const auto& modes = angular_->modes;
  const std::size_t m = angular_->table_size;
  double acc = modes[0].real() * (deriv_theta == 0 ? 1.0 : 0.0);
  double power = 1.0;
  for (std::size_t k = 1; k < modes.size(); ++k) {
    power *= base;
    double weight = (2 * k == m) ? 1.0 : 2.0;
    std::complex<double> e(std::cos(k * theta), std::sin(k * theta));
    std::complex<double> term = modes[k] * e * power;
    double kk = static_cast<double>(k);
    if (deriv_theta == 1) term *= std::complex<double>(0.0, kk);
    if (deriv_theta == 2) term *= -kk * kk;
    acc += weight * term.real();
  }
  return acc;
}

double FarFieldProfile::far_value(const Point& x) const {
  if (dim_ == 1) {
    if (x[0] > 0.0) return mean_ - amplitude_;
    if (x[0] < 0.0) return mean_ + amplitude_;
    return mean_;
  }
  if (x[0] == 0.0 && x[1] == 0.0) return angular_->modes[0].real();
  return angular_sum(1.0, std::atan2(x[1], x[0]), 0);
}

double FarFieldProfile::value(const Point& x) const {
  if (scale_ == 0.0) return far_value(x);
  if (dim_ == 1) return mean_ - (2.0 * amplitude_ / kPi) * std::atan(x[0] / scale_);
  double rho = std::hypot(x[0], x[1]) / scale_;
  if (rho == 0.0) return angular_->modes[0].real();
  return angular_sum(disk_radius(rho).r, std::atan2(x[1], x[0]), 0);
}

double FarFieldProfile::lambda_value(const Point& x) const {
  if (!(scale_ > 0.0)) throw Error("Lambda of the reference requires tau > 0");
  if (dim_ == 1) return -(2.0 * amplitude_ / kPi) * x[0] / (scale_ * scale_ + x[0] * x[0]);
  // Lambda phi_tau = -d/dtau phi_tau = (1/tau) rho d/drho Phi(rho, theta).
  double rho = std::hypot(x[0], x[1]) / scale_;
  if (rho == 0.0) return 0.0;
  double theta = std::atan2(x[1], x[0]);
  DiskRadius d = disk_radius(rho);
  const auto& modes = angular_->modes;
  const std::size_t m = angular_->table_size;
  double acc = 0.0;
  double power = 1.0;  // r^{k-1}
  for (std::size_t k = 1; k < modes.size(); ++k) {
    double weight = (2 * k == m) ? 1.0 : 2.0;
    std::complex<double> e(std::cos(k * theta), std::sin(k * theta));
    acc += weight * (modes[k] * e).real() * static_cast<double>(k) * power * d.dr;
    power *= d.r;
  }
  return rho * acc / scale_;
}

Point FarFieldProfile::gradient(const Point& x) const {
  if (dim_ == 1) {
    if (scale_ == 0.0) return {0.0, 0.0};
    return {-(2.0 * amplitude_ / kPi) * scale_ / (scale_ * scale_ + x[0] * x[0]), 0.0};
  }
  if (scale_ == 0.0) throw Error("gradient of the reference requires tau > 0");
  double rho = std::max(std::hypot(x[0], x[1]) / scale_, 1e-12);
  double theta = std::atan2(x[1], x[0]);
  DiskRadius d = disk_radius(rho);
  const auto& modes = angular_->modes;
  const std::size_t m = angular_->table_size;
  double d_rho = 0.0, d_theta = 0.0, power = 1.0;
  for (std::size_t k = 1; k < modes.size(); ++k) {
    double weight = (2 * k == m) ? 1.0 : 2.0;
    double kk = static_cast<double>(k);
    std::complex<double> c = modes[k] * std::complex<double>(std::cos(k * theta), std::sin(k * theta));
    d_rho += weight * c.real() * kk * power * d.dr;
    power *= d.r;
    d_theta += weight * (c * std::complex<double>(0.0, kk)).real() * power;
  }
  double ct = std::cos(theta), st = std::sin(theta);
  double gx = ct * d_rho - st * d_theta / rho;
  double gy = st * d_rho + ct * d_theta / rho;
  return {gx / scale_, gy / scale_};
}

double FarFieldProfile::laplacian(const Point& x) const {
  if (dim_ == 1) {
    if (scale_ == 0.0) return 0.0;
    double s2 = scale_ * scale_ + x[0] * x[0];
    return (2.0 * amplitude_ / kPi) * 2.0 * x[0] * scale_ / (s2 * s2);
  }
  if (scale_ == 0.0) throw Error("laplacian of the reference requires tau > 0");
  double rho = std::max(std::hypot(x[0], x[1]) / scale_, 1e-6);
  double theta = std::atan2(x[1], x[0]);
  DiskRadius d = disk_radius(rho);
  const auto& modes = angular_->modes;
  const std::size_t m = angular_->table_size;
  double acc = 0.0;
  for (std::size_t k = 1; k < modes.size(); ++k) {
    double weight = (2 * k == m) ? 1.0 : 2.0;
    double kk = static_cast<double>(k);
    double c = weight * (modes[k] * std::complex<double>(std::cos(k * theta), std::sin(k * theta))).real();
    double g = std::pow(d.r, kk);
    double g1 = kk * std::pow(d.r, kk - 1.0) * d.dr;
    double g2 = kk * std::pow(d.r, kk - 1.0) * d.d2r;
    if (k >= 2) g2 += kk * (kk - 1.0) * std::pow(d.r, kk - 2.0) * d.dr * d.dr;
    acc += c * (g2 + g1 / rho - kk * kk * g / (rho * rho));
  }
  return acc / (scale_ * scale_);
}

}  // namespace fsl
