#include "solitonlab/kernels.hpp"

#include <array>
#include <cmath>

namespace solitonlab::kernels {

namespace {

inline double ipow(double u, int m) {
  switch (m) {
    case 2: return u * u;
    case 3: return u * u * u;
    case 4: {
      const double u2 = u * u;
      return u2 * u2;
    }
    default: return std::pow(u, m);
  }
}

inline double series_term(std::size_t j, std::size_t n, cplx coeff, cplx phase) {
  const double w = (j == 0 || 2 * j == n) ? 1.0 : 2.0;
  return w * (coeff.real() * phase.real() - coeff.imag() * phase.imag());
}

template <class Body>
double blocked_reduce(std::size_t n, Body body) {
  std::array<double, kReductionBlocks> partial{};
  const std::size_t blocks = kReductionBlocks;
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = n * b / blocks;
    const std::size_t hi = n * (b + 1) / blocks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += body(i);
    partial[b] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace

namespace serial {

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * c[i];
  return s;
}

void power_product(std::span<const double> coeff, std::span<const double> u, int m, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = coeff[i] * ipow(u[i], m);
}

void stage(std::span<const cplx> e2, std::span<const cplx> q, std::span<const cplx> v,
           std::span<const cplx> nv, std::span<cplx> out) {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = e2[i] * v[i] + q[i] * nv[i];
}

void stage_c(std::span<const cplx> e2, std::span<const cplx> q, std::span<const cplx> a,
             std::span<const cplx> nb, std::span<const cplx> nu, std::span<cplx> out) {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = e2[i] * a[i] + q[i] * (2.0 * nb[i] - nu[i]);
}

void combine(std::span<const cplx> e, std::span<const cplx> f1, std::span<const cplx> f2,
             std::span<const cplx> f3, std::span<const cplx> nu, std::span<const cplx> na,
             std::span<const cplx> nb, std::span<const cplx> nc, std::span<cplx> u) {
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = e[i] * u[i] + f1[i] * nu[i] + 2.0 * f2[i] * (na[i] + nb[i]) + f3[i] * nc[i];
}

void multiply(std::span<const cplx> symbol, std::span<cplx> data) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= symbol[i];
}

double spectral_energy(std::span<const cplx> uhat, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < uhat.size(); ++j) {
    const double w = (j == 0 || 2 * j == n) ? 1.0 : 2.0;
    s += w * std::norm(uhat[j]);
  }
  return s / static_cast<double>(n);
}

void trig_eval(std::span<const cplx> coeff, std::span<const double> k, double x0, std::size_t n,
               std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < coeff.size(); ++j) {
      const double arg = k[j] * (x[i] - x0);
      s += series_term(j, n, coeff[j], cplx(std::cos(arg), std::sin(arg)));
    }
    out[i] = s / static_cast<double>(n);
  }
}

}  // namespace serial

namespace omp {

double sum(std::span<const double> a) {
  return blocked_reduce(a.size(), [&](std::size_t i) { return a[i]; });
}

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_reduce(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
  return blocked_reduce(a.size(), [&](std::size_t i) { return a[i] * b[i] * c[i]; });
}

void power_product(std::span<const double> coeff, std::span<const double> u, int m, std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = coeff[i] * ipow(u[i], m);
}

void stage(std::span<const cplx> e2, std::span<const cplx> q, std::span<const cplx> v,
           std::span<const cplx> nv, std::span<cplx> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = e2[i] * v[i] + q[i] * nv[i];
}

void stage_c(std::span<const cplx> e2, std::span<const cplx> q, std::span<const cplx> a,
             std::span<const cplx> nb, std::span<const cplx> nu, std::span<cplx> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = e2[i] * a[i] + q[i] * (2.0 * nb[i] - nu[i]);
}

void combine(std::span<const cplx> e, std::span<const cplx> f1, std::span<const cplx> f2,
             std::span<const cplx> f3, std::span<const cplx> nu, std::span<const cplx> na,
             std::span<const cplx> nb, std::span<const cplx> nc, std::span<cplx> u) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    u[i] = e[i] * u[i] + f1[i] * nu[i] + 2.0 * f2[i] * (na[i] + nb[i]) + f3[i] * nc[i];
}

void multiply(std::span<const cplx> symbol, std::span<cplx> data) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= symbol[i];
}

double spectral_energy(std::span<const cplx> uhat, std::size_t n) {
  const double s = blocked_reduce(uhat.size(), [&](std::size_t j) {
    const double w = (j == 0 || 2 * j == n) ? 1.0 : 2.0;
    return w * std::norm(uhat[j]);
  });
  return s / static_cast<double>(n);
}

// Phases are advanced by a complex recurrence instead of one sin/cos per term.
void trig_eval(std::span<const cplx> coeff, std::span<const double> k, double x0, std::size_t n,
               std::span<const double> x, std::span<double> out) {
  const std::ptrdiff_t npts = static_cast<std::ptrdiff_t>(x.size());
  const double dk = coeff.size() > 1 ? k[1] - k[0] : 0.0;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < npts; ++i) {
    const double arg = dk * (x[i] - x0);
    const cplx step(std::cos(arg), std::sin(arg));
    cplx phase(1.0, 0.0);
    double s = 0.0;
    for (std::size_t j = 0; j < coeff.size(); ++j) {
      if (j % 64 == 0) {
        const double a = k[j] * (x[i] - x0);
        phase = cplx(std::cos(a), std::sin(a));
      }
      s += series_term(j, n, coeff[j], phase);
      phase *= step;
    }
    out[i] = s / static_cast<double>(n);
  }
}

}  // namespace omp

}  // namespace solitonlab::kernels
