#include "solitonlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/analysis.hpp"
#include "solitonlab/correction.hpp"
#include "solitonlab/soliton.hpp"
#include "solitonlab/spectral.hpp"

namespace solitonlab {

namespace {

constexpr double kCs[] = {0.5, 1.0, 2.0, 4.0};

Grid1D soliton_grid(double c) { return Grid1D::centered(40.0 / std::sqrt(c), 2048); }

double max_abs(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

class Suite {
 public:
  void add(std::string name, double value, double tol, std::string detail = {}) {
    VerifyCheck c{std::move(name), value, tol, std::isfinite(value) && value <= tol, std::move(detail)};
    report.checks.push_back(std::move(c));
  }
  void flag(std::string name, bool ok, std::string detail = {}) {
    report.checks.push_back(VerifyCheck{std::move(name), ok ? 0.0 : 1.0, 0.0, ok, std::move(detail)});
  }
  VerifyReport report;
};

void soliton_checks(Suite& s, int m, const VerifyOptions& opt) {
  const ModelConstants k = ModelConstants::create(m, 0.0);
  const std::string tag = "_m" + std::to_string(m);
  const ProfileFunction q = opt.soliton_override ? opt.soliton_override : ProfileFunction(eval_Qc);

  double ode = 0.0, ker = 0.0, gker = 0.0, ident = 0.0, phi = 0.0;
  for (double c : kCs) {
    ode = std::max(ode, soliton_equation_residual(k, c, q));
    const SolitonProfile p = SolitonProfile::sample(k, c, soliton_grid(c));
    ker = std::max(ker, max_abs(apply_L(p, p.dQ)));
    auto lq = apply_L(p, p.LambdaQ);
    for (std::size_t i = 0; i < lq.size(); ++i) lq[i] += p.Q[i];
    gker = std::max(gker, max_abs(lq));
    ident = std::max(ident, soliton_identities(k, c).max_rel_error);
    for (std::size_t i = 0; i < p.x.size(); i += 7)
      if (std::abs(p.x[i]) * std::sqrt(c) < 15.0)
        phi = std::max(phi, std::abs(p.phi[i] + p.dQ[i] / p.Q[i]));
  }
  s.add("soliton_equation" + tag, ode, 1e-8, "max over c in {0.5,1,2,4}");
  s.add("kernel_L_dQc" + tag, ker, 1e-6);
  s.add("generalized_kernel_L_LambdaQc" + tag, gker, 1e-6);
  s.add("soliton_integral_identities" + tag, ident, 1e-10, "relative");
  s.add("phi_log_derivative" + tag, phi, 1e-10);

  const SolitonProfile p1 = SolitonProfile::sample(k, 1.0, soliton_grid(1.0));
  auto r = apply_L(p1, p1.V0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= m * std::pow(p1.Q[i], m - 1);
  s.add("V0_particular_solution" + tag, max_abs(r), 1e-6);
}

void c_infinity_checks(Suite& s, int m) {
  const ModelConstants k = ModelConstants::create(m, 0.0);
  const std::string tag = "_m" + std::to_string(m);
  double root = 0.0;
  bool monotone = true;
  double prev = INFINITY;
  for (int i = 0; i <= 10; ++i) {
    const double lam = k.lambda0 * i / 10.0;
    const double c = solve_c_infinity(m, lam);
    root = std::max(root, std::abs(c_infinity_residual(m, lam, c)));
    if (!(c < prev)) monotone = false;
    prev = c;
  }
  s.add("c_infinity_root" + tag, root, 1e-12, "11 lambda samples");
  const double lim0 = std::abs(solve_c_infinity(m, 0.0) - std::pow(2.0, k.p));
  const double lim1 = std::abs(solve_c_infinity(m, k.lambda0) - 1.0);
  s.add("c_infinity_limits" + tag, std::max(lim0, lim1), 1e-12, "lambda = 0 and lambda0");
  s.flag("c_infinity_monotone" + tag, monotone);
}

void potential_checks(Suite& s, const Scenario& sc) {
  const HypothesisReport rep = verify_hypotheses(sc.potential, sc.m);
  s.flag("potential_hypotheses", rep.passed, "family " + to_string(sc.potential.family));
  PotentialSpec compact = sc.potential;
  compact.family = PotentialFamily::smoothstep;
  s.flag("potential_hypotheses_reject_compact_support", !verify_hypotheses(compact, sc.m).passed,
         "negative control");
}

void correction_checks(Suite& s, const Scenario& sc) {
  const ModelConstants k = sc.constants();
  const CorrectionProfiles prof = build_correction_profiles(k);
  const double nQ = std::sqrt(exact_integral_Q2(k.m));
  s.add("orthogonality_F_tilde", std::abs(prof.tilde.orthogonality), 1e-10);
  s.add("orthogonality_F_hat", std::abs(prof.hat.orthogonality), 1e-10);
  s.add("beta_tilde_closed_form", std::abs(prof.beta_tilde() - beta_tilde_exact(k.m)), 1e-10,
        "beta_tilde = " + sci(prof.beta_tilde()));
  s.add("beta_hat_closed_form", std::abs(prof.beta_hat() - beta_hat_exact(k.m)), 1e-10,
        "beta_hat = " + sci(prof.beta_hat()));
  s.add("model_problem_residual",
        std::max(prof.tilde.residual_l2, prof.hat.residual_l2) / std::max(nQ, 1e-300), 1e-6);
  double far = 0.0;
  for (const ModelProblemSolution* mp : {&prof.tilde, &prof.hat}) {
    far = std::max(far, std::abs(mp->A.back()));
    far = std::max(far, std::abs(mp->A.front() + 2.0 * mp->beta));
  }
  s.add("model_problem_far_field", far, 1e-4, "limits 0 and -2 beta");
  s.flag("beta_tilde_negative", prof.beta_tilde() < 0.0);

  double eta = 0.0;
  bool eta_ok = cutoff_eta(-1.0) == 0.0 && cutoff_eta(1.0) == 1.0;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -2.0 + 4.0 * i / 4000.0;
    const double d = cutoff_deta(x);
    if (d < 0.0 || d > 1.0) eta_ok = false;
    eta = std::max(eta, std::abs(cutoff_eta(x) + cutoff_eta(-x) - 1.0));
  }
  s.flag("cutoff_eta_range", eta_ok, "0 <= eta' <= 1, eta(-1) = 0, eta(1) = 1");
  s.add("cutoff_eta_symmetry", eta, 1e-12);
}

void adiabatic_checks(Suite& s, const Scenario& sc) {
  const ModelConstants k = sc.constants();
  const double T = interaction_time(k.lambda, sc.epsilon);
  const AdiabaticTrajectory traj = integrate_adiabatic(k, sc.potential, sc.epsilon, 10.0 * T);
  s.add("adiabatic_first_integral", first_integral_residual(traj), 1e-8, "over [-T, 10T]");
  const ExitBoundsReport ex = exit_bounds_check(traj);
  s.flag("adiabatic_exit_bounds", ex.rho_within && ex.c_within);
  PotentialSpec steep = sc.potential;
  steep.steepness = 8.0;
  const AdiabaticTrajectory st = integrate_adiabatic(k, steep, sc.epsilon, 10.0 * T);
  const double cinf = solve_c_infinity(k.m, k.lambda);
  s.add("adiabatic_limit_speed_steep_ramp", std::abs(st.final_state().c - cinf), 1e-5,
        "steepness 8, c(10T) = " + sci(st.final_state().c));
}

void monitor_checks(Suite& s, const Scenario& sc) {
  const double A = sc.virial_A0;
  double psi = 0.0, refl = 0.0;
  for (int i = -20000; i <= 20000; ++i) {
    const double x = i * 0.01;
    const double w = std::exp(-std::abs(x) / A);
    const double d = dpsi_A(x, A);
    psi = std::max({psi, w - d, d - 3.0 * w});
    refl = std::max(refl, std::abs(phi_K(-x, 5.0) + phi_K(x, 5.0) - 1.0));
  }
  s.add("virial_weight_bounds", std::max(psi, 0.0), 1e-15, "e^{-|x|/A} <= psi_A' <= 3 e^{-|x|/A}");
  s.add("monotonicity_cutoff_reflection", refl, 1e-14);
  s.add("monotonicity_cutoff_midpoint", std::abs(phi_K(0.0, 5.0) - 0.5), 1e-15);
  const ModelConstants k = sc.constants();
  const double cinf = solve_c_infinity(k.m, k.lambda);
  const double lhs = std::pow(sc.potential.a_plus, -1.0 / (k.m - 1.0)) * std::pow(cinf, k.theta - 0.25) *
                     exact_integral_Q(k.m);
  s.add("kappa_consistency", std::abs(lhs - kappa_m(k.m, k.lambda) * exact_integral_Q(k.m)), 1e-12);
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const VerifyCheck& c) { return !c.passed; }));
}

double soliton_equation_residual(const ModelConstants& k, double c, const ProfileFunction& q) {
  const Grid1D g = soliton_grid(c);
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) v[i] = q(k, c, g.node(i));
  PeriodicSpectral sp(g);
  const auto d2 = sp.derivative(v, 2);
  double r = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) r = std::max(r, std::abs(d2[i] - c * v[i] + std::pow(v[i], k.m)));
  return r;
}

VerifyReport run_verify(const Scenario& sc, const VerifyOptions& opt) {
  Suite s;
  for (int m : {2, 3, 4}) soliton_checks(s, m, opt);
  for (int m : {2, 3, 4}) c_infinity_checks(s, m);
  potential_checks(s, sc);
  correction_checks(s, sc);
  adiabatic_checks(s, sc);
  monitor_checks(s, sc);
  return s.report;
}

}  // namespace solitonlab
