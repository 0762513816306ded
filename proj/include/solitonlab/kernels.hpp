#pragma once

#include <complex>
#include <span>

// Pointwise and reduction kernels used by the solver and the diagnostics.
// The serial namespace is the plain reference; the omp namespace is the
// production path. Its reductions use a fixed block partition so results do
// not depend on the thread count.
namespace solitonlab::kernels {

using cplx = std::complex<double>;

namespace serial {
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c);
void power_product(std::span<const double> coeff, std::span<const double> u, int m, std::span<double> out);
void stage(std::span<const cplx> e2, std::span<const cplx> q, std::span<const cplx> v,
           std::span<const cplx> nv, std::span<cplx> out);
void stage_c(std::span<const cplx> e2, std::span<const cplx> q, std::span<const cplx> a,
             std::span<const cplx> nb, std::span<const cplx> nu, std::span<cplx> out);
void combine(std::span<const cplx> e, std::span<const cplx> f1, std::span<const cplx> f2,
             std::span<const cplx> f3, std::span<const cplx> nu, std::span<const cplx> na,
             std::span<const cplx> nb, std::span<const cplx> nc, std::span<cplx> u);
void multiply(std::span<const cplx> symbol, std::span<cplx> data);
double spectral_energy(std::span<const cplx> uhat, std::size_t n);
void trig_eval(std::span<const cplx> coeff, std::span<const double> k, double x0, std::size_t n,
               std::span<const double> x, std::span<double> out);
}  // namespace serial

namespace omp {
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c);
void power_product(std::span<const double> coeff, std::span<const double> u, int m, std::span<double> out);
void stage(std::span<const cplx> e2, std::span<const cplx> q, std::span<const cplx> v,
           std::span<const cplx> nv, std::span<cplx> out);
void stage_c(std::span<const cplx> e2, std::span<const cplx> q, std::span<const cplx> a,
             std::span<const cplx> nb, std::span<const cplx> nu, std::span<cplx> out);
void combine(std::span<const cplx> e, std::span<const cplx> f1, std::span<const cplx> f2,
             std::span<const cplx> f3, std::span<const cplx> nu, std::span<const cplx> na,
             std::span<const cplx> nb, std::span<const cplx> nc, std::span<cplx> u);
void multiply(std::span<const cplx> symbol, std::span<cplx> data);
double spectral_energy(std::span<const cplx> uhat, std::size_t n);
void trig_eval(std::span<const cplx> coeff, std::span<const double> k, double x0, std::size_t n,
               std::span<const double> x, std::span<double> out);
}  // namespace omp

// Number of fixed blocks used by the deterministic reductions.
inline constexpr std::size_t kReductionBlocks = 64;

}  // namespace solitonlab::kernels
