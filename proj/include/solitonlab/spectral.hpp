#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "solitonlab/model.hpp"

namespace solitonlab {

using cplx = std::complex<double>;

// Real-to-complex Fourier transforms and spectral calculus on a periodic grid.
// An instance owns scratch buffers and must not be shared between threads.
class PeriodicSpectral {
 public:
  explicit PeriodicSpectral(const Grid1D& grid);
  ~PeriodicSpectral();
  PeriodicSpectral(const PeriodicSpectral&) = delete;
  PeriodicSpectral& operator=(const PeriodicSpectral&) = delete;
  PeriodicSpectral(PeriodicSpectral&&) noexcept;
  PeriodicSpectral& operator=(PeriodicSpectral&&) noexcept;

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return grid_.n; }
  std::size_t modes() const { return grid_.n / 2 + 1; }
  // Angular wavenumbers k_j = 2*pi*j/L for j = 0..n/2.
  const std::vector<double>& wavenumbers() const { return k_; }

  // Unnormalized forward transform (sum_j u_j e^{-i k x_j}).
  void forward(std::span<const double> u, std::span<cplx> uhat);
  // Inverse transform including the 1/n factor.
  void inverse(std::span<const cplx> uhat, std::span<double> u);

  std::vector<double> derivative(std::span<const double> u, int order);
  // Mean-zero antiderivative; the caller fixes the constant.
  std::vector<double> antiderivative(std::span<const double> u);

  double integrate(std::span<const double> u) const;
  double l2_norm(std::span<const double> u) const;
  double h1_norm(std::span<const double> u);
  double h2_norm(std::span<const double> u);

 private:
  struct Plans;
  Grid1D grid_;
  std::vector<double> k_;
  std::unique_ptr<Plans> plans_;
};

// Evaluates the band-limited trigonometric interpolant of grid samples at arbitrary points.
class TrigInterpolant {
 public:
  TrigInterpolant() = default;
  TrigInterpolant(const Grid1D& grid, std::span<const double> samples);
  double operator()(double x) const;
  void evaluate(std::span<const double> x, std::span<double> out) const;
  const Grid1D& grid() const { return grid_; }

 private:
  Grid1D grid_;
  std::vector<cplx> coeff_;
  std::vector<double> k_;
};

}  // namespace solitonlab
