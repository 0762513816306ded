#include "solitonlab/adiabatic.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>

#include "solitonlab/soliton.hpp"

namespace solitonlab {

namespace odeint = boost::numeric::odeint;
using State2 = std::array<double, 2>;

double interaction_time(double lambda, double eps) {
  if (!(eps > 0.0)) throw Error("epsilon must be positive");
  if (!(lambda < 1.0)) throw Error("interaction time requires lambda < 1");
  return std::pow(eps, -1.01) / (1.0 - lambda);
}

namespace {

struct Rhs {
  ModelConstants k;
  PotentialSpec spec;
  double eps;
  void operator()(const State2& y, State2& dy, double /*t*/) const {
    const Jet3 a = spec.eval(eps * y[1]);
    dy[0] = eps * k.p * y[0] * (y[0] - k.lambda / k.lambda0) * a.d1 / a.v;
    dy[1] = y[0] - k.lambda;
  }
};

AdiabaticState initial_state(const ModelConstants& k, double eps) {
  const double T = interaction_time(k.lambda, eps);
  return AdiabaticState{-T, 1.0, -(1.0 - k.lambda) * T};
}

}  // namespace

AdiabaticTrajectory::AdiabaticTrajectory(ModelConstants k, PotentialSpec spec, double eps, AdiabaticOptions opt)
    : k_(k), spec_(spec), eps_(eps), opt_(opt) {}

std::pair<double, double> AdiabaticTrajectory::rates(const AdiabaticState& s) const {
  State2 dy{};
  Rhs{k_, spec_, eps_}(State2{s.c, s.rho}, dy, s.t);
  return {dy[0], dy[1]};
}

AdiabaticState AdiabaticTrajectory::at(double t) const {
  if (samples_.empty()) throw Error("empty adiabatic trajectory");
  if (t < t_start() - 1e-12 || t > t_end() + 1e-12) throw Error("time outside the adiabatic trajectory");
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double v, const AdiabaticState& s) { return v < s.t; });
  const AdiabaticState& base = (it == samples_.begin()) ? *it : *(it - 1);
  if (base.t == t) return base;
  State2 y{base.c, base.rho};
  auto stepper = odeint::make_controlled(opt_.atol, opt_.rtol, odeint::runge_kutta_dopri5<State2>());
  odeint::integrate_adaptive(stepper, Rhs{k_, spec_, eps_}, y, base.t, t, std::min(opt_.initial_step, t - base.t));
  return AdiabaticState{t, y[0], y[1]};
}

AdiabaticTrajectory integrate_adiabatic(const ModelConstants& k, const PotentialSpec& spec, double eps, double t_end,
                                        const AdiabaticOptions& opt) {
  AdiabaticTrajectory traj(k, spec, eps, opt);
  const AdiabaticState s0 = initial_state(k, eps);
  if (!(t_end > s0.t)) throw Error("adiabatic end time must exceed -T_eps");
  traj.append(s0);
  State2 y{s0.c, s0.rho};
  auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State2>());
  odeint::integrate_adaptive(stepper, Rhs{k, spec, eps}, y, s0.t, t_end, opt.initial_step,
                             [&](const State2& s, double t) {
                               if (t > traj.samples().back().t) traj.append(AdiabaticState{t, s[0], s[1]});
                             });
  if (traj.final_state().t < t_end) traj.append(AdiabaticState{t_end, y[0], y[1]});
  return traj;
}

AdiabaticTrajectory integrate_adiabatic_fixed(const ModelConstants& k, const PotentialSpec& spec, double eps,
                                              double t_end, double step) {
  AdiabaticTrajectory traj(k, spec, eps, AdiabaticOptions{});
  const AdiabaticState s0 = initial_state(k, eps);
  const auto nsteps = static_cast<std::size_t>(std::ceil((t_end - s0.t) / step));
  const double dt = (t_end - s0.t) / static_cast<double>(nsteps);
  traj.append(s0);
  State2 y{s0.c, s0.rho};
  odeint::runge_kutta4<State2> rk4;
  const Rhs rhs{k, spec, eps};
  for (std::size_t i = 0; i < nsteps; ++i) {
    const double t = s0.t + dt * static_cast<double>(i);
    rk4.do_step(rhs, y, t, dt);
    traj.append(AdiabaticState{s0.t + dt * static_cast<double>(i + 1), y[0], y[1]});
  }
  return traj;
}

double first_integral_residual(const AdiabaticTrajectory& traj) {
  const auto& k = traj.constants();
  const double eps = traj.epsilon();
  const double l0 = k.lambda0, p = k.p;
  const double rho0 = traj.samples().front().rho;
  const double rhs_const = std::pow(1.0 - k.lambda / l0, 1.0 - l0) / std::pow(traj.potential().a(eps * rho0), p);
  double worst = 0.0;
  for (const auto& s : traj.samples()) {
    const double lhs = std::pow(s.c, l0) * std::pow(std::max(s.c - k.lambda / l0, 0.0), 1.0 - l0);
    const double rhs = rhs_const * std::pow(traj.potential().a(eps * s.rho), p);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double c_from_first_integral(const AdiabaticTrajectory& traj, double rho) {
  const auto& k = traj.constants();
  const double eps = traj.epsilon();
  const double l0 = k.lambda0;
  if (k.lambda == l0) return 1.0;
  const double rho0 = traj.samples().front().rho;
  const double target = std::pow(1.0 - k.lambda / l0, 1.0 - l0) *
                        std::pow(traj.potential().a(eps * rho) / traj.potential().a(eps * rho0), k.p);
  auto g = [&](double c) { return std::pow(c, l0) * std::pow(c - k.lambda / l0, 1.0 - l0) - target; };
  double lo = std::max(1.0, k.lambda / l0), hi = 2.0 * std::pow(2.0, 4.0 / (5.0 - k.m));
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ExitBoundsReport exit_bounds_check(const AdiabaticTrajectory& traj) {
  const auto& k = traj.constants();
  ExitBoundsReport r;
  r.T = interaction_time(k.lambda, traj.epsilon());
  if (traj.t_end() < r.T - 1e-9) throw Error("trajectory does not reach T_eps");
  const AdiabaticState e = traj.at(std::min(r.T, traj.t_end()));
  r.rho_exit = e.rho;
  r.c_exit = e.c;
  r.c_infinity = solve_c_infinity(k.m, k.lambda);
  r.lower = (1.0 - k.lambda) * r.T;
  r.upper = (2.0 * r.c_infinity - k.lambda - 1.0) * r.T;
  r.c_min = INFINITY;
  r.c_max = -INFINITY;
  for (const auto& s : traj.samples()) {
    r.c_min = std::min(r.c_min, s.c);
    r.c_max = std::max(r.c_max, s.c);
  }
  const double tol = 1e-9;
  r.rho_within = r.rho_exit >= r.lower - tol && r.rho_exit <= r.upper + tol;
  r.c_within = r.c_min >= 1.0 - tol && r.c_max <= std::pow(2.0, 4.0 / (5.0 - k.m)) + tol;
  return r;
}

}  // namespace solitonlab
