#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "solitonlab/soliton.hpp"
#include "solitonlab/spectral.hpp"

using namespace solitonlab;

namespace {

// Independent profile: integrate Q'' = Q - Q^m from the crest with classical RK4.
// The crest height follows from the first integral Q'^2 = Q^2 - 2 Q^{m+1}/(m+1).
double shoot_Q(int m, double x_target) {
  double q = std::pow((m + 1) / 2.0, 1.0 / (m - 1));
  double dq = 0.0;
  const int steps = 20000;
  const double h = x_target / steps;
  auto f = [m](double a, double b) { return std::array<double, 2>{b, a - std::pow(a, m)}; };
  for (int i = 0; i < steps; ++i) {
    const auto k1 = f(q, dq);
    const auto k2 = f(q + 0.5 * h * k1[0], dq + 0.5 * h * k1[1]);
    const auto k3 = f(q + 0.5 * h * k2[0], dq + 0.5 * h * k2[1]);
    const auto k4 = f(q + h * k3[0], dq + h * k3[1]);
    q += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    dq += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  }
  return q;
}

// Bisection on the defining relation of the asymptotic speed.
double bisect_c_infinity(int m, double lambda) {
  const auto k = ModelConstants::create(m, lambda);
  const double r = lambda / k.lambda0;
  const double rhs = std::pow(2.0, k.p) * std::pow(1.0 - r, 1.0 - k.lambda0);
  auto g = [&](double c) { return std::pow(c, k.lambda0) * std::pow(c - r, 1.0 - k.lambda0) - rhs; };
  double lo = std::max(1.0, r), hi = 64.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double trapezoid(const std::vector<double>& f, double h) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * h;
}

}  // namespace

TEST_CASE("closed-form soliton matches a shooting integration") {
  for (int m : {2, 3, 4}) {
    const auto k = ModelConstants::create(m, 0.0);
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
      CAPTURE(m);
      CAPTURE(x);
      CHECK(eval_Q(k, x) == doctest::Approx(shoot_Q(m, x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("soliton crest heights and scaling") {
  CHECK(eval_Q(ModelConstants::create(2, 0.0), 0.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(eval_Q(ModelConstants::create(3, 0.0), 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const auto k3 = ModelConstants::create(3, 0.0);
  CHECK(eval_Qc(k3, 4.0, 0.0) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(eval_Qc(k3, 4.0, 0.3) == doctest::Approx(2.0 * eval_Q(k3, 0.6)).epsilon(1e-14));
}

TEST_CASE("model constants") {
  const auto k2 = ModelConstants::create(2, 0.1);
  CHECK(k2.lambda0 == doctest::Approx(0.6));
  CHECK(k2.p == doctest::Approx(0.8));
  CHECK(k2.theta == doctest::Approx(0.75));
  const auto k3 = ModelConstants::create(3, 0.1);
  CHECK(k3.lambda0 == doctest::Approx(1.0 / 3.0));
  CHECK(k3.theta == doctest::Approx(0.25));
  const auto k4 = ModelConstants::create(4, 0.0);
  CHECK(k4.lambda0 == doctest::Approx(1.0 / 7.0));
  CHECK(k4.p == doctest::Approx(4.0 / 7.0));
  CHECK_THROWS_AS(ModelConstants::create(5, 0.0), Error);
  CHECK_THROWS_AS(ModelConstants::create(3, -0.1), Error);
}

TEST_CASE("derivatives agree with centered differences") {
  const double d = 1e-4;
  for (int m : {2, 3, 4}) {
    const auto k = ModelConstants::create(m, 0.0);
    for (double c : {0.7, 1.0, 1.6}) {
      for (double x : {-2.3, -0.4, 0.9, 3.1}) {
        CAPTURE(m);
        CAPTURE(c);
        CAPTURE(x);
        const double dq = (eval_Qc(k, c, x + d) - eval_Qc(k, c, x - d)) / (2 * d);
        const double d2q = (eval_Qc(k, c, x + d) - 2 * eval_Qc(k, c, x) + eval_Qc(k, c, x - d)) / (d * d);
        const double lq = (eval_Qc(k, c + d, x) - eval_Qc(k, c - d, x)) / (2 * d);
        CHECK(eval_dQc(k, c, x) == doctest::Approx(dq).epsilon(1e-7));
        CHECK(eval_d2Qc(k, c, x) == doctest::Approx(d2q).epsilon(1e-5));
        CHECK(eval_LambdaQc(k, c, x) == doctest::Approx(lq).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("phi is the logarithmic derivative of Q") {
  const auto k3 = ModelConstants::create(3, 0.0);
  CHECK(eval_phi(k3, 1.0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
  for (int m : {2, 3, 4}) {
    const auto k = ModelConstants::create(m, 0.0);
    for (double x : {-3.0, -0.5, 0.25, 2.0}) {
      CHECK(eval_phi(k, x) == doctest::Approx(-eval_dQ(k, x) / eval_Q(k, x)).epsilon(1e-12));
      CHECK(eval_phic(k, 2.25, x) == doctest::Approx(1.5 * eval_phi(k, 1.5 * x)).epsilon(1e-14));
      const double d = 1e-4;
      CHECK(eval_dphi(k, x) == doctest::Approx((eval_phi(k, x + d) - eval_phi(k, x - d)) / (2 * d)).epsilon(1e-7));
      CHECK(eval_d2phi(k, x) ==
            doctest::Approx((eval_dphi(k, x + d) - eval_dphi(k, x - d)) / (2 * d)).epsilon(1e-6));
    }
  }
}

TEST_CASE("V0 solves its linear equation") {
  CHECK(eval_V0(ModelConstants::create(3, 0.0), 0.0) == doctest::Approx(-2.0).epsilon(1e-13));
  const double d = 1e-3;
  for (int m : {2, 3, 4}) {
    const auto k = ModelConstants::create(m, 0.0);
    for (double x : {-2.0, -0.7, 0.0, 1.2, 2.5}) {
      CAPTURE(m);
      CAPTURE(x);
      const double v2 = (eval_V0(k, x + d) - 2 * eval_V0(k, x) + eval_V0(k, x - d)) / (d * d);
      const double Lv = -v2 + eval_V0(k, x) - m * std::pow(eval_Q(k, x), m - 1) * eval_V0(k, x);
      CHECK(Lv == doctest::Approx(m * std::pow(eval_Q(k, x), m - 1)).epsilon(1e-5));
    }
  }
}

TEST_CASE("integrals of the soliton") {
  CHECK(exact_integral_Q(3) == doctest::Approx(std::sqrt(2.0) * std::numbers::pi).epsilon(1e-13));
  CHECK(exact_integral_Q2(3) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(exact_integral_Q(2) == doctest::Approx(6.0).epsilon(1e-13));
  CHECK(exact_integral_Q2(2) == doctest::Approx(6.0).epsilon(1e-13));
  const auto k3 = ModelConstants::create(3, 0.0);
  CHECK(integral_Q2(k3, 1.0) == doctest::Approx(2.0 * std::tanh(1.0)).epsilon(1e-12));

  const auto id = soliton_identities(k3, 1.0);
  CHECK(id.mass == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(id.int_Qmp1 == doctest::Approx(16.0 / 3.0).epsilon(1e-10));
  CHECK(id.energy == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
  for (int m : {2, 3, 4}) {
    for (double c : {0.6, 1.0, 1.7}) {
      const auto r = soliton_identities(ModelConstants::create(m, 0.1), c);
      CAPTURE(m);
      CAPTURE(c);
      CHECK(r.max_rel_error < 1e-9);
    }
  }
}

TEST_CASE("linearized operator: kernel and signature") {
  const auto k = ModelConstants::create(3, 0.0);
  const auto prof = SolitonProfile::sample(k, 1.0, Grid1D::centered(30.0, 1024));
  const auto Ldq = apply_L(prof, prof.dQ);
  double worst = 0.0;
  for (double v : Ldq) worst = std::max(worst, std::abs(v));
  CHECK(worst < 1e-9);
  CHECK(quadratic_form(prof, prof.Q) == doctest::Approx(-32.0 / 3.0).epsilon(1e-9));

  // B on Q^{(m+1)/2} against a direct trapezoid of the quadratic form.
  const double h = prof.grid.h();
  std::vector<double> w(prof.x.size()), integrand(prof.x.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::pow(prof.Q[i], 2.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double dw = 2.0 * prof.Q[i] * prof.dQ[i];
    integrand[i] = dw * dw + w[i] * w[i] - 3.0 * prof.Q[i] * prof.Q[i] * w[i] * w[i];
  }
  CHECK(quadratic_form(prof, w) == doctest::Approx(trapezoid(integrand, h)).epsilon(1e-8));
  CHECK(quadratic_form(prof, w) < 0.0);
}

TEST_CASE("property: B is positive on the orthogonal complement of Q and Q'") {
  std::mt19937_64 rng(20261018);
  std::normal_distribution<double> nd;
  for (int m : {2, 3, 4}) {
    const auto k = ModelConstants::create(m, 0.0);
    const auto prof = SolitonProfile::sample(k, 1.0, Grid1D::centered(30.0, 512));
    const double h = prof.grid.h();
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> w(prof.x.size());
      const double x0 = 4.0 * (nd(rng) * 0.5), s = 0.5 + std::abs(nd(rng));
      const std::array<double, 4> amp{nd(rng), nd(rng), nd(rng), nd(rng)};
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double z = (prof.x[i] - x0) / s;
        w[i] = std::exp(-z * z) * (amp[0] + amp[1] * z + amp[2] * z * z + amp[3] * std::sin(3 * z));
      }
      for (const auto* basis : {&prof.Q, &prof.dQ}) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          num += w[i] * (*basis)[i];
          den += (*basis)[i] * (*basis)[i];
        }
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= num / den * (*basis)[i];
      }
      double norm = 0.0;
      for (double v : w) norm += v * v * h;
      CAPTURE(m);
      CAPTURE(trial);
      CHECK(quadratic_form(prof, w) > 0.0);
      CHECK(quadratic_form(prof, w) / norm > 0.0);
    }
    CHECK(coercivity_constant(k, 1.0, 256) > 0.0);
  }
}

TEST_CASE("asymptotic speed matches a bisection oracle") {
  for (int m : {2, 3, 4}) {
    const auto l0 = ModelConstants::create(m, 0.0).lambda0;
    for (double frac : {0.0, 0.2, 0.5, 0.9}) {
      const double lambda = frac * l0;
      CAPTURE(m);
      CAPTURE(lambda);
      const double c = solve_c_infinity(m, lambda);
      CHECK(c == doctest::Approx(bisect_c_infinity(m, lambda)).epsilon(1e-10));
      CHECK(std::abs(c_infinity_residual(m, lambda, c)) < 1e-10);
    }
  }
  CHECK(solve_c_infinity(2, 0.3) == doctest::Approx(bisect_c_infinity(2, 0.3)).epsilon(1e-10));
  CHECK(solve_c_infinity(3, 0.0) == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-12));
  CHECK(solve_c_infinity(3, 1.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(solve_c_infinity(3, 0.4), Error);
}

TEST_CASE("property: asymptotic speed decreases in lambda") {
  std::mt19937_64 rng(7);
  for (int m : {2, 3, 4}) {
    const double l0 = ModelConstants::create(m, 0.0).lambda0;
    std::uniform_real_distribution<double> ud(0.0, l0);
    for (int i = 0; i < 25; ++i) {
      double a = ud(rng), b = ud(rng);
      if (a > b) std::swap(a, b);
      if (b - a < 1e-6) continue;
      CHECK(solve_c_infinity(m, a) > solve_c_infinity(m, b));
      CHECK(solve_c_infinity(m, b) >= 1.0);
    }
  }
}
