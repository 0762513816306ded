// Acceptance harness: one PASS/FAIL line per criterion, tolerances pinned below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/analysis.hpp"
#include "solitonlab/config.hpp"
#include "solitonlab/correction.hpp"
#include "solitonlab/pipeline.hpp"
#include "solitonlab/soliton.hpp"
#include "solitonlab/verify.hpp"

using namespace solitonlab;

namespace {

namespace tol {
constexpr double soliton_ode = 1e-8;
constexpr double kernel = 1e-6;
constexpr double identities = 1e-10;
constexpr double c_inf_root = 1e-12;
constexpr double first_integral = 1e-8;
constexpr double limit_speed = 1e-5;
constexpr double orthogonality = 1e-10;
constexpr double beta = 1e-10;
constexpr double model_residual = 1e-6;
constexpr double far_field = 1e-4;
constexpr double slope_corrected_lo = 1.3, slope_corrected_hi = 1.7;
constexpr double slope_uncorrected_lo = 0.8, slope_uncorrected_hi = 1.2;
constexpr double energy_drift = 1e-6;
constexpr double l1_drift = 1e-10;
constexpr double mass_step = 1e-10;
constexpr double exit_speed_floor = 0.05;
constexpr double exit_speed_sqrt = 3.0;
constexpr double stability_ratio = 2.0;
constexpr double floor_factor = 10.0;
constexpr double tail_l1 = 0.25;
constexpr double psi_slack = 1e-15;
constexpr double reflection = 1e-14;
}  // namespace tol

namespace budget {
constexpr double c1 = 10.0, c2 = 1.0, c3 = 5.0, c4 = 30.0, c5 = 600.0, c6 = 1200.0;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double max_abs(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

int failures = 0;

void report(int id, bool ok, const std::string& summary) {
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, summary.c_str());
  std::fflush(stdout);
}

void info(const std::string& line) {
  std::printf("     %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <class... A>
std::string fmtn(const char* f, A... a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

void criterion1() {
  const auto t0 = Clock::now();
  double ode = 0.0, ker = 0.0, gker = 0.0, v0 = 0.0, ident = 0.0;
  for (int m : {2, 3, 4}) {
    const auto k = ModelConstants::create(m, 0.0);
    for (double c : {0.5, 1.0, 2.0, 4.0}) {
      ode = std::max(ode, soliton_equation_residual(k, c, eval_Qc));
      const auto p = SolitonProfile::sample(k, c, Grid1D::centered(40.0 / std::sqrt(c), 2048));
      ker = std::max(ker, max_abs(apply_L(p, p.dQ)));
      auto g = apply_L(p, p.LambdaQ);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += p.Q[i];
      gker = std::max(gker, max_abs(g));
      ident = std::max(ident, soliton_identities(k, c).max_rel_error);
    }
    const auto p1 = SolitonProfile::sample(k, 1.0, Grid1D::centered(40.0, 2048));
    auto r = apply_L(p1, p1.V0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= m * std::pow(p1.Q[i], m - 1);
    v0 = std::max(v0, max_abs(r));
  }
  const double dt = seconds_since(t0);
  const bool ok = ode < tol::soliton_ode && ker < tol::kernel && gker < tol::kernel && v0 < tol::kernel &&
                  ident < tol::identities && dt < budget::c1;
  report(1, ok,
         fmtn("closed forms: ode %.2e, L Q' %.2e, L LQ + Q %.2e, L0 V0 %.2e, identities %.2e rel, %.2f s", ode, ker,
              gker, v0, ident, dt));
}

void criterion2() {
  const auto t0 = Clock::now();
  double root = 0.0, lim = 0.0;
  bool mono = true;
  for (int m : {2, 3, 4}) {
    const double l0 = ModelConstants::create(m, 0.0).lambda0;
    double prev = INFINITY;
    for (int i = 0; i <= 10; ++i) {
      const double lam = l0 * i / 10.0;
      const double c = solve_c_infinity(m, lam);
      root = std::max(root, std::abs(c_infinity_residual(m, lam, c)));
      mono = mono && c < prev;
      prev = c;
    }
    lim = std::max(lim, std::abs(solve_c_infinity(m, 0.0) - std::pow(2.0, 4.0 / (m + 3.0))));
    lim = std::max(lim, std::abs(solve_c_infinity(m, l0) - 1.0));
  }
  const double dt = seconds_since(t0);
  report(2, root < tol::c_inf_root && lim < tol::c_inf_root && mono && dt < budget::c2,
         fmtn("asymptotic speed: root %.2e, limits %.2e, monotone %s, %.3f s", root, lim, mono ? "yes" : "no", dt));
}

void criterion3() {
  const auto t0 = Clock::now();
  double drift = 0.0, limit = 0.0, limit_gentle = 0.0;
  bool exits = true;
  for (double lam : {0.0, 0.1, 1.0 / 3.0}) {
    const auto k = ModelConstants::create(3, lam);
    const double T = interaction_time(lam, 0.05);
    const auto traj = integrate_adiabatic(k, default_potential(), 0.05, 10.0 * T);
    drift = std::max(drift, first_integral_residual(traj));
    const auto ex = exit_bounds_check(traj);
    exits = exits && ex.rho_within && ex.c_within;

    const double T1 = interaction_time(lam, 0.01);
    const double cinf = solve_c_infinity(3, lam);
    const auto steep = integrate_adiabatic(k, default_potential(8.0), 0.01, 10.0 * T1);
    limit = std::max(limit, std::abs(steep.final_state().c - cinf));
    const auto gentle = integrate_adiabatic(k, default_potential(), 0.01, 10.0 * T1);
    limit_gentle = std::max(limit_gentle, std::abs(gentle.final_state().c - cinf));
  }
  const double dt = seconds_since(t0);
  report(3, drift < tol::first_integral && limit < tol::limit_speed && exits && dt < budget::c3,
         fmtn("modulation ODE: first-integral drift %.2e, |c(10T) - c_inf| %.2e (steepness 8), exit bounds %s, %.2f s",
              drift, limit, exits ? "hold" : "violated", dt));
  info(fmt("|c(10T) - c_inf| with steepness 1 (start inside the ramp): %.3e", limit_gentle));
}

void criterion4() {
  const auto t0 = Clock::now();
  double orth = 0.0, beta = 0.0, resid = 0.0, far = 0.0;
  for (int m : {2, 3, 4}) {
    const auto k = ModelConstants::create(m, 0.3 * ModelConstants::create(m, 0.0).lambda0);
    const auto prof = build_correction_profiles(k, Grid1D::centered(40.0, 4096));
    orth = std::max({orth, std::abs(prof.tilde.orthogonality), std::abs(prof.hat.orthogonality)});
    beta = std::max({beta, std::abs(prof.beta_tilde() + 3.0 * exact_integral_Q(m) / (2.0 * (m + 3.0))),
                     std::abs(prof.beta_hat() - exact_integral_Q(m) / (2.0 * (5.0 - m)))});
    resid = std::max({resid, prof.tilde.residual_l2, prof.hat.residual_l2});
    for (const auto* s : {&prof.tilde, &prof.hat})
      far = std::max({far, std::abs(s->A.back()), std::abs(s->A.front() + 2.0 * s->beta)});
  }
  const double dt = seconds_since(t0);
  report(4,
         orth < tol::orthogonality && beta < tol::beta && resid < tol::model_residual && far < tol::far_field &&
             dt < budget::c4,
         fmtn("model problem: orthogonality %.2e, beta %.2e, residual %.2e, far field %.2e, %.2f s", orth, beta, resid,
              far, dt));
}

void criterion5() {
  const auto t0 = Clock::now();
  Scenario s;
  s.m = 3;
  s.lambda = 0.1;
  const auto prof = build_correction_profiles(s.constants());
  std::vector<double> eps{0.1, 0.05, 0.025}, rc, ru;
  for (double e : eps) {
    const auto r = residual_scaling(s, e, prof);
    rc.push_back(r.max_corrected);
    ru.push_back(r.max_uncorrected);
    info(fmtn("eps %.4g: max ||S|| corrected %.4e, uncorrected %.4e", e, r.max_corrected, r.max_uncorrected));
  }
  const double sc = loglog_slope(eps, rc), su = loglog_slope(eps, ru);
  const double dt = seconds_since(t0);
  report(5,
         sc >= tol::slope_corrected_lo && sc <= tol::slope_corrected_hi && su >= tol::slope_uncorrected_lo &&
             su <= tol::slope_uncorrected_hi && dt < budget::c5,
         fmtn("residual scaling: slope %.3f with correction, %.3f without, %.1f s", sc, su, dt));
}

struct Run {
  SimulationOutput sim;
  AnalysisOutput an;
  double seconds = 0.0;
};

Run full_run(Scenario s, double eps) {
  const auto t0 = Clock::now();
  Run r;
  r.sim = simulate(s, eps, Exec::parallel);
  r.an = analyze(s, eps, r.sim.snapshots);
  r.seconds = seconds_since(t0);
  r.sim.snapshots.shrink_to_fit();
  info(fmtn("run m=%d lambda=%.3g eps=%.4g n=%zu: %zu steps, %zu snapshots, %.1f s", s.m, s.lambda, eps,
            r.sim.config.grid.n, r.sim.run.diagnostics.steps, r.sim.snapshots.size(), r.seconds));
  for (const auto& n : r.an.notes) info("note: " + n);
  for (const auto& w : r.sim.run.diagnostics.warnings) info("warning: " + w);
  return r;
}

void criterion6(const Run& r) {
  const auto& d = r.sim.run.diagnostics;
  bool ordered = true;
  const double upper = std::pow(2.0, 1.0 / 3.0);
  for (const auto& rec : r.sim.run.records)
    ordered = ordered && rec.M <= rec.Mhat * (1 + 1e-14) && rec.Mhat <= upper * rec.M * (1 + 1e-14);
  report(6,
         d.energy_drift < tol::energy_drift && d.l1_drift < tol::l1_drift && d.max_mass_increase <= tol::mass_step &&
             ordered && r.seconds < budget::c6,
         fmtn("conservation (eps 0.05, n %zu): energy drift %.2e, L1 drift %.2e, max mass step %.2e, M <= Mhat <= "
              "2^(1/3) M %s, %.0f s",
              r.sim.config.grid.n, d.energy_drift, d.l1_drift, d.max_mass_increase, ordered ? "holds" : "fails",
              r.seconds));
}

void criterion7(const std::map<double, Run>& runs) {
  bool ok = true;
  std::vector<double> K;
  for (const auto& [eps, r] : runs) {
    const auto& a = r.an;
    if (!a.has_exit) {
      ok = false;
      info(fmt("eps %.4g: no exit fit", eps));
      continue;
    }
    const double allowed = std::max(tol::exit_speed_floor, tol::exit_speed_sqrt * std::sqrt(eps));
    ok = ok && a.exit_rel_error <= allowed;
    K.push_back(a.exit_misfit_scaled);
    info(fmtn("eps %.4g: c2(T) %.5f vs c_inf %.5f (rel %.4f, allowed %.4f), ||w||_H1 / sqrt(eps) %.4f", eps,
              a.exit_fit.c2, a.c_infinity, a.exit_rel_error, allowed, a.exit_misfit_scaled));
  }
  const bool stable = K.size() == 2 && std::max(K[0], K[1]) <= tol::stability_ratio * std::min(K[0], K[1]);
  report(7, ok && stable,
         fmtn("transit: exit speed within tolerance %s, misfit constant ratio %.3f", ok ? "yes" : "no",
              K.size() == 2 ? std::max(K[0], K[1]) / std::min(K[0], K[1]) : NAN));
}

void criterion8(const std::map<double, Run>& runs, const Run& control) {
  double floor = 0.0;
  const double T = control.an.T;
  for (const auto& f : control.an.fits)
    if (f.valid && f.t >= 2.0 * T - 1e-9 && f.t <= 3.0 * T + 1e-9) floor = std::max(floor, f.w_h1);
  const auto& fine = runs.at(0.025).an;
  const auto nv = nonvanishing_residual(fine.fits, 2.0 * fine.T, 3.0 * fine.T, floor);
  const double gap_coarse = runs.at(0.05).an.l1.rel_error, gap_fine = fine.l1.rel_error;
  info(fmtn("control floor %.3e, min ||w+||_H1 over [2T, 3T] %.4e (ratio %.3e)", floor, nv.min_w_h1, nv.ratio));
  info(fmtn("tail L1: measured %.5f, predicted %.5f at eps 0.025; relative gap %.4e (eps 0.05) -> %.4e (eps 0.025)",
            fine.l1.tail, fine.l1.predicted_tail, gap_coarse, gap_fine));
  for (const auto& [eps, r] : runs)
    info(fmtn("eps %.4g: L1 ahead of the soliton %.3e, total minus soliton part %.6f", eps, r.an.l1.ahead,
              r.an.l1.tail_difference));
  const bool ok = fine.has_late && nv.min_w_h1 > tol::floor_factor * floor && gap_fine <= tol::tail_l1 &&
                  gap_fine < gap_coarse;
  report(8, ok,
         fmtn("defect: residual/floor %.2e, tail L1 gap %.2f%%, gap shrinks %s", nv.ratio, 100.0 * gap_fine,
              gap_fine < gap_coarse ? "yes" : "no"));
}

void criterion9() {
  Scenario s;
  s.m = 3;
  s.lambda = 0.0;
  s.t_end = 0.0;
  std::vector<double> errs;
  bool sign_ok = true;
  for (double eps : {0.1, 0.05, 0.025}) {
    const Run r = full_run(s, eps);
    if (!r.an.has_shelf) {
      sign_ok = false;
      errs.push_back(NAN);
      continue;
    }
    const auto& sh = r.an.shelf;
    const bool same = sh.predicted_sign != 0.0 && std::copysign(1.0, sh.mean_z) == sh.predicted_sign;
    sign_ok = sign_ok && same;
    errs.push_back(sh.rel_error);
    info(fmtn("eps %.4g: window [%.1f, %.1f], rel error %.4f, mean z %.3e vs predicted %.3e, pointwise sign "
              "agreement %.3f",
              eps, sh.window_lo, sh.window_hi, sh.rel_error, sh.mean_z, sh.mean_pred, sh.sign_agreement));
  }
  const bool decreasing = errs.size() == 3 && errs[1] < errs[0] && errs[2] < errs[1];
  report(9, sign_ok && decreasing,
         fmtn("shelf: sign %s, relative error %.3f -> %.3f -> %.3f (%s)", sign_ok ? "matches" : "differs", errs[0],
              errs[1], errs[2], decreasing ? "decreasing" : "not decreasing"));
}

void criterion10(const std::map<double, Run>& runs) {
  const auto& grid = runs.at(0.025).sim.config.grid;
  const double A0 = Scenario{}.virial_A0, K0 = runs.at(0.025).an.monotonicity.K0;
  double psi = 0.0, refl = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.node(i), w = std::exp(-std::abs(x) / A0), d = dpsi_A(x, A0);
    psi = std::max({psi, w - d, d - 3.0 * w});
    refl = std::max(refl, std::abs(phi_K(-x, K0) + phi_K(x, K0) - 1.0));
  }
  bool mono = true;
  std::vector<double> K;
  for (const auto& [eps, r] : runs) {
    const auto& m = r.an.monotonicity;
    mono = mono && m.I_ok && m.I_tilde_ok && m.J_ok && m.Mscript_ok;
    K.push_back(r.an.virial.constant);
    info(fmtn("eps %.4g: monitors I %d, I~ %d, J %d, M %d (slack K %.2e %.2e %.2e %.2e), virial K %.4f", eps, m.I_ok,
              m.I_tilde_ok, m.J_ok, m.Mscript_ok, m.K_I, m.K_I_tilde, m.K_J, m.K_M, r.an.virial.constant));
  }
  const bool stable = K.size() == 2 && std::max(K[0], K[1]) <= tol::stability_ratio * std::min(K[0], K[1]);
  report(10, psi <= tol::psi_slack && refl <= tol::reflection && mono && stable,
         fmtn("monitors: psi_A' bound excess %.1e, reflection %.1e, one-sided bounds %s, virial constant ratio %.3f", psi,
              refl, mono ? "hold" : "violated",
              K.size() == 2 ? std::max(K[0], K[1]) / std::min(K[0], K[1]) : NAN));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();

  Scenario base;
  base.m = 3;
  base.lambda = 0.1;
  std::map<double, Run> runs;
  runs.emplace(0.05, full_run(base, 0.05));
  criterion6(runs.at(0.05));
  runs.emplace(0.025, full_run(base, 0.025));

  Scenario ctrl = base;
  ctrl.potential.family = PotentialFamily::constant;
  ctrl.potential.a_plus = 1.0;
  const Run control = full_run(ctrl, 0.025);

  criterion7(runs);
  criterion8(runs, control);
  criterion9();
  criterion10(runs);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
