#include <doctest.h>

#include <cmath>
#include <random>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/soliton.hpp"

using namespace solitonlab;

TEST_CASE("interaction time") {
  CHECK(interaction_time(0.0, 0.05) == doctest::Approx(20.6081).epsilon(1e-4));
  CHECK(interaction_time(0.1, 0.05) == doctest::Approx(std::pow(0.05, -1.01) / 0.9).epsilon(1e-14));
  CHECK_THROWS_AS(interaction_time(0.1, 0.0), Error);
  CHECK_THROWS_AS(interaction_time(1.0, 0.05), Error);
}

TEST_CASE("trajectory starts from the prescribed datum") {
  const auto k = ModelConstants::create(3, 0.1);
  const double eps = 0.05, T = interaction_time(0.1, eps);
  const auto traj = integrate_adiabatic(k, default_potential(), eps, T);
  CHECK(traj.t_start() == doctest::Approx(-T));
  CHECK(traj.samples().front().c == 1.0);
  CHECK(traj.samples().front().rho == doctest::Approx(-(1.0 - 0.1) * T));
  CHECK(traj.t_end() == doctest::Approx(T));
  const auto mid = traj.at(0.0);
  const auto [dc, drho] = traj.rates(mid);
  CHECK(drho == doctest::Approx(mid.c - 0.1));
  CHECK(dc > 0.0);
}

TEST_CASE("critical lambda freezes the speed") {
  const auto k = ModelConstants::create(3, 1.0 / 3.0);
  const auto traj = integrate_adiabatic(k, default_potential(), 0.05, 3 * interaction_time(k.lambda, 0.05));
  for (const auto& s : traj.samples()) CHECK(s.c == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("property: first integral is conserved") {
  std::mt19937_64 rng(3);
  for (int m : {2, 3, 4}) {
    const double l0 = ModelConstants::create(m, 0.0).lambda0;
    std::uniform_real_distribution<double> ul(0.0, 0.95 * l0), ue(0.02, 0.2), ug(0.5, 3.0);
    for (int i = 0; i < 6; ++i) {
      const double lambda = ul(rng), eps = ue(rng);
      const auto k = ModelConstants::create(m, lambda);
      const auto traj = integrate_adiabatic(k, default_potential(ug(rng)), eps, 2 * interaction_time(lambda, eps));
      CAPTURE(m);
      CAPTURE(lambda);
      CAPTURE(eps);
      CHECK(first_integral_residual(traj) < 1e-8);
      const auto& last = traj.final_state();
      CHECK(c_from_first_integral(traj, last.rho) == doctest::Approx(last.c).epsilon(1e-8));
      for (std::size_t j = 1; j < traj.samples().size(); ++j) CHECK(traj.samples()[j].c >= traj.samples()[j - 1].c - 1e-12);
    }
  }
}

TEST_CASE("fixed-step Runge-Kutta converges at fourth order") {
  const auto k = ModelConstants::create(3, 0.1);
  const double eps = 0.1, T = interaction_time(0.1, eps);
  AdiabaticOptions tight;
  tight.rtol = 1e-13;
  tight.atol = 1e-14;
  const auto ref = integrate_adiabatic(k, default_potential(), eps, T, tight).final_state();
  const auto coarse = integrate_adiabatic_fixed(k, default_potential(), eps, T, 0.8).final_state();
  const auto fine = integrate_adiabatic_fixed(k, default_potential(), eps, T, 0.4).final_state();
  const double e1 = std::abs(coarse.rho - ref.rho), e2 = std::abs(fine.rho - ref.rho);
  CHECK(e2 < e1);
  CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("exit bounds hold for theory-range parameters") {
  for (int m : {2, 3, 4}) {
    const double l0 = ModelConstants::create(m, 0.0).lambda0;
    for (double frac : {0.0, 0.4}) {
      for (double eps : {0.1, 0.05}) {
        const auto k = ModelConstants::create(m, frac * l0);
        const auto traj = integrate_adiabatic(k, default_potential(), eps, interaction_time(k.lambda, eps));
        const auto rep = exit_bounds_check(traj);
        CAPTURE(m);
        CAPTURE(frac);
        CAPTURE(eps);
        CHECK(rep.rho_within);
        CHECK(rep.c_within);
        CHECK(rep.c_exit <= rep.c_infinity);
      }
    }
  }
  const auto k = ModelConstants::create(3, 0.1);
  const auto short_traj = integrate_adiabatic(k, default_potential(), 0.05, 0.0);
  CHECK_THROWS_AS(exit_bounds_check(short_traj), Error);
}

TEST_CASE("speed approaches the asymptotic value after a steep ramp") {
  for (int m : {2, 3, 4}) {
    const double lambda = 0.3 * ModelConstants::create(m, 0.0).lambda0;
    const auto k = ModelConstants::create(m, lambda);
    const double eps = 0.01;
    const auto traj = integrate_adiabatic(k, default_potential(8.0), eps, interaction_time(lambda, eps));
    CAPTURE(m);
    CHECK(traj.final_state().c == doctest::Approx(solve_c_infinity(m, lambda)).epsilon(1e-6));
  }
}
