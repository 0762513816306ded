#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/kernels.hpp"
#include "solitonlab/pde.hpp"

namespace sk = solitonlab::kernels;
using solitonlab::cplx;

namespace {

std::vector<double> field(std::size_t n) {
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(0.001 * static_cast<double>(i)) + 0.5;
  return u;
}

std::vector<cplx> spectrum(std::size_t n) {
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = cplx(std::cos(0.01 * i), std::sin(0.02 * i));
  return v;
}

template <auto Fn>
void BM_power_product(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = field(n), u = field(n);
  std::vector<double> out(n);
  for (auto _ : st) {
    Fn(a, u, 3, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n));
}

template <auto Fn>
void BM_dot(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = field(n), b = field(n);
  for (auto _ : st) benchmark::DoNotOptimize(Fn(a, b));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n));
}

template <auto Fn>
void BM_combine(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto e = spectrum(n), f1 = spectrum(n), f2 = spectrum(n), f3 = spectrum(n);
  const auto na = spectrum(n), nb = spectrum(n), nc = spectrum(n), nu = spectrum(n);
  auto u = spectrum(n);
  for (auto _ : st) {
    Fn(e, f1, f2, f3, nu, na, nb, nc, u);
    benchmark::DoNotOptimize(u.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(n));
}

void BM_solver_step(benchmark::State& st) {
  solitonlab::SimConfig cfg;
  cfg.constants = solitonlab::ModelConstants::create(3, 0.1);
  cfg.potential = solitonlab::default_potential();
  cfg.epsilon = 0.05;
  cfg.grid = solitonlab::Grid1D::centered(300.0, static_cast<std::size_t>(st.range(0)));
  cfg.exec = st.range(1) != 0 ? solitonlab::Exec::parallel : solitonlab::Exec::serial;
  solitonlab::Simulator sim(cfg, solitonlab::default_time_step(cfg.grid));
  sim.set_state(solitonlab::initialize_soliton(cfg));
  for (auto _ : st) sim.step();
  st.SetLabel(st.range(1) != 0 ? "omp" : "serial");
}

constexpr std::int64_t kSmall = 1 << 14;
constexpr std::int64_t kLarge = 1 << 18;

}  // namespace

BENCHMARK(BM_power_product<sk::serial::power_product>)->Name("power_product/serial")->Range(kSmall, kLarge);
BENCHMARK(BM_power_product<sk::omp::power_product>)->Name("power_product/omp")->Range(kSmall, kLarge);
BENCHMARK(BM_dot<sk::serial::dot>)->Name("dot/serial")->Range(kSmall, kLarge);
BENCHMARK(BM_dot<sk::omp::dot>)->Name("dot/omp")->Range(kSmall, kLarge);
BENCHMARK(BM_combine<sk::serial::combine>)->Name("etdrk4_combine/serial")->Range(kSmall, kLarge);
BENCHMARK(BM_combine<sk::omp::combine>)->Name("etdrk4_combine/omp")->Range(kSmall, kLarge);
BENCHMARK(BM_solver_step)->Args({16384, 0})->Args({16384, 1})->Args({32768, 0})->Args({32768, 1});

BENCHMARK_MAIN();
