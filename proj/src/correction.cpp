#include "solitonlab/correction.hpp"

#include <cmath>

#include "solitonlab/kernels.hpp"
#include "solitonlab/soliton.hpp"

namespace solitonlab {

namespace {

double ipow(double u, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= u;
  return r;
}

std::size_t next_pow2(double v) {
  std::size_t n = 8;
  while (static_cast<double>(n) < v) n *= 2;
  return n;
}

constexpr double kTimeStep = 1e-4;

}  // namespace

CorrectionProfiles build_correction_profiles(const ModelConstants& k, const Grid1D& grid, ModelProblemMethod method) {
  CorrectionProfiles p;
  p.constants = k;
  p.tilde = solve_model_problem(k, sample_F_tilde(k, grid), grid, method);
  p.hat = solve_model_problem(k, sample_F_hat(k, grid), grid, method);
  return p;
}

double beta_tilde_exact(int m) { return -3.0 * exact_integral_Q(m) / (2.0 * (m + 3.0)); }
double beta_hat_exact(int m) { return exact_integral_Q(m) / (2.0 * (5.0 - m)); }

ShelfAmplitudes shelf_amplitudes(const CorrectionProfiles& prof, const PotentialSpec& spec, double eps, double c,
                                 double rho) {
  const auto& k = prof.constants;
  const int m = k.m;
  const Jet3 a = spec.eval(eps * rho);
  const double at = std::pow(a.v, 1.0 / (m - 1.0));
  ShelfAmplitudes s;
  s.h = a.d1 / ipow(at, m);
  s.scale = s.h * std::pow(c, 1.0 / (m - 1.0) - 0.5);
  s.b = s.h * std::pow(c, 1.0 / (m - 1.0) - 1.0) * (prof.beta_tilde() + k.lambda * prof.beta_hat() / c);
  s.plateau = -2.0 * s.b * std::sqrt(c);
  return s;
}

void assemble_Ac_shelf(const CorrectionProfiles& prof, const PotentialSpec& spec, double eps, double c, double rho,
                       std::span<const double> y, std::span<double> out) {
  const ShelfAmplitudes s = shelf_amplitudes(prof, spec, eps, c, rho);
  const double sc = std::sqrt(c);
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = s.b * (eval_phic(prof.constants, c, y[i]) - sc);
}

void assemble_Ac(const CorrectionProfiles& prof, const PotentialSpec& spec, double eps, double c, double rho,
                 std::span<const double> y, std::span<double> out) {
  const ShelfAmplitudes s = shelf_amplitudes(prof, spec, eps, c, rho);
  const double sc = std::sqrt(c);
  const double L = prof.tilde.grid.x_max;
  const double lam_c = prof.constants.lambda / c;
  // Localized parts are interpolated only where sqrt(c) y lies inside the profile grid.
  std::vector<double> arg;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double z = sc * y[i];
    if (z >= prof.tilde.grid.x_min && z <= L) {
      arg.push_back(z);
      idx.push_back(i);
    }
  }
  std::vector<double> at(arg.size()), ah(arg.size(), 0.0);
  prof.tilde.eval_localized(arg, at);
  if (lam_c != 0.0) prof.hat.eval_localized(arg, ah);
  assemble_Ac_shelf(prof, spec, eps, c, rho, y, out);
  for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] += s.scale * (at[j] + lam_c * ah[j]);
}

double cutoff_eta(double s) {
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double u = 0.5 * (s + 1.0);
  const double g0 = std::exp(-1.0 / u), g1 = std::exp(-1.0 / (1.0 - u));
  return g0 / (g0 + g1);
}

double cutoff_deta(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double u = 0.5 * (s + 1.0);
  const double g0 = std::exp(-1.0 / u), g1 = std::exp(-1.0 / (1.0 - u));
  const double dg0 = g0 / (u * u), dg1 = -g1 / ((1.0 - u) * (1.0 - u));
  const double den = g0 + g1;
  return 0.5 * (dg0 * g1 - g0 * dg1) / (den * den);
}

void cutoff_Asharp(std::span<const double> y, double eps, std::span<double> field) {
  for (std::size_t i = 0; i < y.size(); ++i) field[i] *= cutoff_eta(eps * y[i] + 2.0);
}

ApproximateSolution::ApproximateSolution(const CorrectionProfiles& prof, const PotentialSpec& spec, double eps,
                                         double t_end_multiple, double target_h)
    : prof_(prof),
      spec_(spec),
      k_(prof.constants),
      eps_(eps),
      T_(interaction_time(prof.constants.lambda, eps)),
      traj_(integrate_adiabatic(prof.constants, spec, eps, t_end_multiple * T_ + 1.0)),
      ygrid_(),
      sp_([&] {
        const double lo = -3.0 / eps - 40.0, hi = 40.0;
        ygrid_ = Grid1D::create(lo, hi, next_pow2((hi - lo) / target_h));
        return ygrid_;
      }()) {
  y_ = ygrid_.nodes();
}

std::vector<double> ApproximateSolution::soliton_part(double t) const {
  const AdiabaticState s = traj_.at(t);
  const double at = std::pow(spec_.a(eps_ * s.rho), 1.0 / (k_.m - 1.0));
  std::vector<double> out(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) out[i] = eval_Qc(k_, s.c, y_[i]) / at;
  return out;
}

std::vector<double> ApproximateSolution::Ac_at(double t) const {
  const AdiabaticState s = traj_.at(t);
  std::vector<double> out(y_.size());
  assemble_Ac(prof_, spec_, eps_, s.c, s.rho, y_, out);
  return out;
}

std::vector<double> ApproximateSolution::correction_part(double t) const {
  auto a = Ac_at(t);
  cutoff_Asharp(y_, eps_, a);
  return a;
}

std::vector<double> ApproximateSolution::field(double t, bool with_correction) const {
  auto u = soliton_part(t);
  if (with_correction) {
    const auto a = correction_part(t);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += eps_ * a[i];
  }
  return u;
}

std::vector<double> ApproximateSolution::residual_field(double t, bool with_correction) {
  const int m = k_.m;
  const std::size_t n = y_.size();
  const AdiabaticState s = traj_.at(t);
  const auto [c_t, rho_t] = traj_.rates(s);
  const Jet3 ap = spec_.eval_power(eps_ * s.rho, 1.0 / (m - 1.0));
  const double at = ap.v, at_t = ap.d1 * eps_ * rho_t;

  std::vector<double> U(n), Ut(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = eval_Qc(k_, s.c, y_[i]);
    U[i] = q / at;
    Ut[i] = c_t * eval_LambdaQc(k_, s.c, y_[i]) / at - q * at_t / (at * at);
  }
  if (with_correction) {
    const auto a0 = correction_part(t);
    std::vector<double> dA(n);
    if (t - kTimeStep >= traj_.t_start()) {
      const auto ap1 = correction_part(t + kTimeStep);
      const auto am1 = correction_part(t - kTimeStep);
      for (std::size_t i = 0; i < n; ++i) dA[i] = (ap1[i] - am1[i]) / (2.0 * kTimeStep);
    } else {
      const auto ap1 = correction_part(t + kTimeStep);
      const auto ap2 = correction_part(t + 2.0 * kTimeStep);
      for (std::size_t i = 0; i < n; ++i) dA[i] = (-3.0 * a0[i] + 4.0 * ap1[i] - ap2[i]) / (2.0 * kTimeStep);
    }
    for (std::size_t i = 0; i < n; ++i) {
      U[i] += eps_ * a0[i];
      Ut[i] += eps_ * dA[i];
    }
  }
  const auto Uy = sp_.derivative(U, 1);
  const auto Uyy = sp_.derivative(U, 2);
  std::vector<double> N(n);
  for (std::size_t i = 0; i < n; ++i)
    N[i] = Uyy[i] - k_.lambda * U[i] + spec_.a(eps_ * (s.rho + y_[i])) * ipow(U[i], m);
  const auto Ny = sp_.derivative(N, 1);
  std::vector<double> S(n);
  for (std::size_t i = 0; i < n; ++i) S[i] = Ut[i] - rho_t * Uy[i] + Ny[i];
  return S;
}

std::vector<double> ApproximateSolution::F1_field(double t) const {
  const int m = k_.m;
  const AdiabaticState s = traj_.at(t);
  const auto [c_t, rho_t] = traj_.rates(s);
  (void)rho_t;
  const Jet3 a = spec_.eval(eps_ * s.rho);
  const double at = std::pow(a.v, 1.0 / (m - 1.0));
  const double h = a.d1 / ipow(at, m);
  std::vector<double> F(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) {
    const double y = y_[i];
    const double q = eval_Qc(k_, s.c, y), dq = eval_dQc(k_, s.c, y);
    F[i] = (c_t / eps_) * eval_LambdaQc(k_, s.c, y) / at +
           h * (-(s.c - k_.lambda) * q / (m - 1.0) + ipow(q, m) + m * y * ipow(q, m - 1) * dq);
  }
  return F;
}

ResidualSample ApproximateSolution::residual(double t, bool with_correction) {
  const auto S = residual_field(t, with_correction);
  ResidualSample r;
  r.t = t;
  r.l2 = sp_.l2_norm(S);
  r.h2 = sp_.h2_norm(S);
  const auto F = F1_field(t);
  std::vector<double> d(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) d[i] = S[i] - eps_ * F[i];
  r.dev_from_eF1_l2 = sp_.l2_norm(d);
  return r;
}

std::pair<double, double> ApproximateSolution::endpoint_errors() {
  const int m = k_.m;
  const double cinf = solve_c_infinity(m, k_.lambda);
  const auto u0 = field(-T_);
  const auto u1 = field(T_);
  std::vector<double> d0(y_.size()), d1(y_.size());
  const double s = std::pow(2.0, -1.0 / (m - 1.0));
  for (std::size_t i = 0; i < y_.size(); ++i) {
    d0[i] = u0[i] - eval_Q(k_, y_[i]);
    d1[i] = u1[i] - s * eval_Qc(k_, cinf, y_[i]);
  }
  return {sp_.h1_norm(d0), sp_.h1_norm(d1)};
}

}  // namespace solitonlab
