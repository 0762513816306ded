#include <doctest.h>

#include <cmath>
#include <numbers>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/pde.hpp"
#include "solitonlab/soliton.hpp"

using namespace solitonlab;

namespace {

SimConfig uniform_medium(int m, double lambda, double half_width, std::size_t n) {
  SimConfig cfg;
  cfg.constants = ModelConstants::create(m, lambda);
  cfg.potential.family = PotentialFamily::constant;
  cfg.potential.a_plus = 1.0;
  cfg.epsilon = 0.1;
  cfg.grid = Grid1D::centered(half_width, n);
  return cfg;
}

SimConfig ramp(double eps, double half_width, std::size_t n) {
  SimConfig cfg;
  cfg.constants = ModelConstants::create(3, 0.1);
  cfg.potential = default_potential();
  cfg.epsilon = eps;
  cfg.grid = Grid1D::centered(half_width, n);
  const double T = interaction_time(0.1, eps);
  cfg.t_start = -T;
  cfg.t_end = T;
  cfg.record_every = 0.25;
  return cfg;
}

double l2_diff(const Grid1D& g, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * g.h());
}

}  // namespace

TEST_CASE("default time step") {
  CHECK(default_time_step(Grid1D::centered(100.0, 4000)) == doctest::Approx(5e-3));
  CHECK(default_time_step(Grid1D::centered(100.0, 1000)) == doctest::Approx(1e-2));
}

TEST_CASE("traveling soliton in a uniform medium") {
  auto error_at = [](int m, double c, double dt, RunDiagnostics* diag) {
    auto cfg = uniform_medium(m, 0.1, 100.0, 4096);
    cfg.t_start = 0.0;
    cfg.t_end = 10.0;
    cfg.record_every = 1.0;
    cfg.dt = dt;
    const auto res = run(cfg, soliton_state(cfg, c, -20.0, 1.0, 0.0));
    if (diag) *diag = res.diagnostics;
    const auto exact = soliton_state(cfg, c, -20.0 + (c - 0.1) * 10.0, 1.0, 10.0);
    return l2_diff(cfg.grid, res.final_state.u, exact.u);
  };
  for (int m : {2, 3, 4}) {
    for (double c : {1.0, 1.5}) {
      RunDiagnostics d;
      CAPTURE(m);
      CAPTURE(c);
      CHECK(error_at(m, c, 5e-4, &d) < 1e-6);
      CHECK(d.energy_drift < 1e-8);
      CHECK(d.l1_drift < 1e-10);
      CHECK(d.warnings.empty());
    }
  }
  const double coarse = error_at(3, 1.5, 2e-3, nullptr), fine = error_at(3, 1.5, 1e-3, nullptr);
  CHECK(std::log2(coarse / fine) > 3.5);
}

TEST_CASE("zero field stays zero") {
  auto cfg = ramp(0.1, 150.0, 1024);
  SimState s;
  s.t = cfg.t_start;
  s.u.assign(cfg.grid.n, 0.0);
  cfg.t_end = cfg.t_start + 1.0;
  const auto res = run(cfg, s);
  for (double v : res.final_state.u) CHECK(v == 0.0);
}

TEST_CASE("initial invariants") {
  const auto cfg = ramp(0.05, 750.0, 16384);
  const auto s = initialize_soliton(cfg);
  CHECK(s.t == doctest::Approx(-interaction_time(0.1, 0.05)));
  const auto inv = compute_invariants(cfg, s);
  CHECK(inv.M == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(inv.L1 == doctest::Approx(std::sqrt(2.0) * std::numbers::pi).epsilon(1e-10));
  CHECK(inv.boundary_max < 1e-10);

  auto narrow = cfg;
  narrow.grid = Grid1D::centered(30.0, 1024);
  CHECK_THROWS_AS(initialize_soliton(narrow), Error);
}

TEST_CASE("mass budget through the ramp") {
  const auto cfg = ramp(0.1, 150.0, 4096);
  const auto res = run(cfg, initialize_soliton(cfg));
  const auto& d = res.diagnostics;
  CHECK(d.max_mass_increase <= 1e-12);
  CHECK(d.l1_drift < 1e-10);
  for (std::size_t i = 1; i < res.records.size(); ++i) CHECK(res.records[i].M <= res.records[i - 1].M + 1e-12);
  CHECK(res.records.back().M < res.records.front().M);

  const auto rep = mass_derivative_check(res.records);
  CHECK(rep.samples > 10);
  CHECK(rep.max_rel_mismatch < 1e-3);
  CHECK(rep.max_rel_mismatch_hat < 1e-2);
}

TEST_CASE("serial and parallel execution agree") {
  auto cfg = ramp(0.1, 150.0, 2048);
  cfg.t_end = cfg.t_start + 5.0;
  auto serial = cfg;
  serial.exec = Exec::serial;
  const auto a = run(cfg, initialize_soliton(cfg));
  const auto b = run(serial, initialize_soliton(serial));
  CHECK(l2_diff(cfg.grid, a.final_state.u, b.final_state.u) < 1e-12);
  CHECK(a.records.back().M == doctest::Approx(b.records.back().M).epsilon(1e-13));
}

TEST_CASE("snapshots honour stride and start time") {
  auto cfg = ramp(0.1, 150.0, 1024);
  cfg.t_end = cfg.t_start + 2.0;
  cfg.snapshot_every = 0.5;
  cfg.snapshot_from = cfg.t_start + 1.0;
  std::vector<double> times;
  run(cfg, initialize_soliton(cfg), [&](const SimState& s) { times.push_back(s.t); });
  REQUIRE(times.size() == 3);
  CHECK(times.front() == doctest::Approx(cfg.t_start + 1.0));
  CHECK(times.back() == doctest::Approx(cfg.t_end));
}

TEST_CASE("bad run configurations are rejected") {
  auto cfg = ramp(0.1, 150.0, 1024);
  cfg.t_end = cfg.t_start;
  CHECK_THROWS_AS(run(cfg, initialize_soliton(cfg)), Error);
  cfg.t_end = cfg.t_start + 1.0;
  SimState wrong;
  wrong.u.assign(512, 0.0);
  CHECK_THROWS_AS(run(cfg, wrong), Error);
}
