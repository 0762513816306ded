#include "solitonlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "solitonlab/kernels.hpp"

namespace solitonlab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

ModelConstants ModelConstants::create(int m, double lambda) {
  if (m < 2 || m > 4) throw Error("exponent m must be 2, 3 or 4 (got " + std::to_string(m) + ")");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("lambda must be a finite non-negative number");
  ModelConstants c;
  c.m = m;
  c.lambda = lambda;
  c.lambda0 = (5.0 - m) / (m + 3.0);
  c.p = 4.0 / (m + 3.0);
  c.theta = 1.0 / (m - 1.0) - 0.25;
  return c;
}

Grid1D Grid1D::create(double x_min, double x_max, std::size_t n) {
  if (!(x_max > x_min)) throw Error("grid requires x_max > x_min");
  if (n < 8 || n % 2 != 0) throw Error("grid size must be even and at least 8");
  return Grid1D{x_min, x_max, n};
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = node(i);
  return x;
}

struct PeriodicSpectral::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  std::size_t n = 0;

  explicit Plans(std::size_t size) : n(size) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

PeriodicSpectral::PeriodicSpectral(const Grid1D& grid) : grid_(grid), plans_(std::make_unique<Plans>(grid.n)) {
  k_.resize(modes());
  const double base = 2.0 * std::numbers::pi / grid_.length();
  for (std::size_t j = 0; j < k_.size(); ++j) k_[j] = base * static_cast<double>(j);
}

PeriodicSpectral::~PeriodicSpectral() = default;
PeriodicSpectral::PeriodicSpectral(PeriodicSpectral&&) noexcept = default;
PeriodicSpectral& PeriodicSpectral::operator=(PeriodicSpectral&&) noexcept = default;

void PeriodicSpectral::forward(std::span<const double> u, std::span<cplx> uhat) {
  std::copy(u.begin(), u.end(), plans_->real);
  fftw_execute(plans_->fwd);
  auto* s = reinterpret_cast<cplx*>(plans_->spec);
  std::copy(s, s + modes(), uhat.begin());
}

void PeriodicSpectral::inverse(std::span<const cplx> uhat, std::span<double> u) {
  auto* s = reinterpret_cast<cplx*>(plans_->spec);
  std::copy(uhat.begin(), uhat.end(), s);
  fftw_execute(plans_->inv);
  const double scale = 1.0 / static_cast<double>(grid_.n);
  for (std::size_t i = 0; i < grid_.n; ++i) u[i] = plans_->real[i] * scale;
}

std::vector<double> PeriodicSpectral::derivative(std::span<const double> u, int order) {
  std::vector<cplx> uh(modes());
  forward(u, uh);
  const std::size_t nyq = grid_.n / 2;
  for (std::size_t j = 0; j < uh.size(); ++j) {
    if (order % 2 == 1 && j == nyq) {
      uh[j] = 0.0;
      continue;
    }
    uh[j] *= std::pow(cplx(0.0, k_[j]), order);
  }
  std::vector<double> out(grid_.n);
  inverse(uh, out);
  return out;
}

std::vector<double> PeriodicSpectral::antiderivative(std::span<const double> u) {
  std::vector<cplx> uh(modes());
  forward(u, uh);
  uh[0] = 0.0;
  uh[grid_.n / 2] = 0.0;
  for (std::size_t j = 1; j < grid_.n / 2; ++j) uh[j] /= cplx(0.0, k_[j]);
  std::vector<double> out(grid_.n);
  inverse(uh, out);
  return out;
}

double PeriodicSpectral::integrate(std::span<const double> u) const {
  return grid_.h() * kernels::omp::sum(u);
}

double PeriodicSpectral::l2_norm(std::span<const double> u) const {
  return std::sqrt(grid_.h() * kernels::omp::dot(u, u));
}

double PeriodicSpectral::h1_norm(std::span<const double> u) {
  const auto d1 = derivative(u, 1);
  return std::sqrt(grid_.h() * (kernels::omp::dot(u, u) + kernels::omp::dot(d1, d1)));
}

double PeriodicSpectral::h2_norm(std::span<const double> u) {
  const auto d1 = derivative(u, 1);
  const auto d2 = derivative(u, 2);
  return std::sqrt(grid_.h() * (kernels::omp::dot(u, u) + kernels::omp::dot(d1, d1) + kernels::omp::dot(d2, d2)));
}

TrigInterpolant::TrigInterpolant(const Grid1D& grid, std::span<const double> samples) : grid_(grid) {
  PeriodicSpectral sp(grid);
  coeff_.resize(sp.modes());
  sp.forward(samples, coeff_);
  k_ = sp.wavenumbers();
}

double TrigInterpolant::operator()(double x) const {
  double out = 0.0;
  kernels::omp::trig_eval(coeff_, k_, grid_.x_min, grid_.n, std::span<const double>(&x, 1), std::span<double>(&out, 1));
  return out;
}

void TrigInterpolant::evaluate(std::span<const double> x, std::span<double> out) const {
  kernels::omp::trig_eval(coeff_, k_, grid_.x_min, grid_.n, x, out);
}

}  // namespace solitonlab
