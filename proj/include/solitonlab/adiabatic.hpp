#pragma once

#include <vector>

#include "solitonlab/model.hpp"
#include "solitonlab/potential.hpp"

namespace solitonlab {

// Start time magnitude of the interaction window: T_eps = eps^{-1.01} / (1 - lambda).
double interaction_time(double lambda, double eps);

struct AdiabaticState {
  double t = 0.0;
  double c = 1.0;
  double rho = 0.0;
};

struct AdiabaticOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.05;
};

// Solution of the modulation system in physical time t:
//   dc/dt = eps p c (c - lambda/lambda0) a'(eps rho)/a(eps rho),  drho/dt = c - lambda,
// started from c = 1, rho = -(1 - lambda) T_eps at t = -T_eps.
class AdiabaticTrajectory {
 public:
  AdiabaticTrajectory() = default;
  AdiabaticTrajectory(ModelConstants k, PotentialSpec spec, double eps, AdiabaticOptions opt);

  const ModelConstants& constants() const { return k_; }
  const PotentialSpec& potential() const { return spec_; }
  double epsilon() const { return eps_; }
  double t_start() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }
  const std::vector<AdiabaticState>& samples() const { return samples_; }
  const AdiabaticState& final_state() const { return samples_.back(); }

  // State at any t in [t_start, t_end], integrated from the nearest stored sample.
  AdiabaticState at(double t) const;
  // Time derivatives (dc/dt, drho/dt) at a state.
  std::pair<double, double> rates(const AdiabaticState& s) const;

  void append(const AdiabaticState& s) { samples_.push_back(s); }

 private:
  ModelConstants k_;
  PotentialSpec spec_;
  double eps_ = 0.0;
  AdiabaticOptions opt_;
  std::vector<AdiabaticState> samples_;
};

// Adaptive Dormand-Prince integration from -T_eps to t_end, storing each accepted step.
AdiabaticTrajectory integrate_adiabatic(const ModelConstants& k, const PotentialSpec& spec, double eps, double t_end,
                                        const AdiabaticOptions& opt = {});
// Classical fourth-order Runge-Kutta with a fixed step, for convergence studies.
AdiabaticTrajectory integrate_adiabatic_fixed(const ModelConstants& k, const PotentialSpec& spec, double eps,
                                              double t_end, double step);

// Conserved quantity c^{l0}(c - l/l0)^{1-l0} a(eps rho)^{-p}, scaled so its exact value is
// (1 - l/l0)^{1-l0} a(eps rho0)^{-p}. Returns max over samples of |lhs - rhs|.
double first_integral_residual(const AdiabaticTrajectory& traj);
// Speed recovered from the first integral given the position.
double c_from_first_integral(const AdiabaticTrajectory& traj, double rho);

struct ExitBoundsReport {
  double T = 0.0;
  double rho_exit = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
  double c_exit = 0.0;
  double c_infinity = 0.0;
  bool rho_within = false;
  bool c_within = false;
};

// Requires traj.t_end() >= T_eps.
ExitBoundsReport exit_bounds_check(const AdiabaticTrajectory& traj);

}  // namespace solitonlab
