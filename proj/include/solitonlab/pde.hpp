#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "solitonlab/model.hpp"
#include "solitonlab/potential.hpp"
#include "solitonlab/spectral.hpp"

namespace solitonlab {

enum class Exec { serial, parallel };

struct SimConfig {
  ModelConstants constants;
  PotentialSpec potential;
  double epsilon = 0.05;
  Grid1D grid;
  double dt = 0.0;  // 0 selects the default step
  double t_start = 0.0;
  double t_end = 1.0;
  double record_every = 0.5;
  double snapshot_every = 0.0;  // 0 disables snapshots
  double snapshot_from = -INFINITY;
  bool dealias = true;
  Exec exec = Exec::parallel;
};

// Default step 5e-3 (h/0.05)^3, capped at 1e-2.
double default_time_step(const Grid1D& grid);

struct SimState {
  double t = 0.0;
  std::vector<double> u;
};

struct InvariantRecord {
  double t = 0.0;
  double M = 0.0;        // (1/2) int u^2
  double Mhat = 0.0;     // (1/2) int a^{1/m} u^2
  double Ea = 0.0;       // (1/2) int u_x^2 + lambda/2 int u^2 - 1/(m+1) int a u^{m+1}
  double L1 = 0.0;       // int u
  double Mscript = 0.0;  // int u^2 / a
  double dM_rhs = 0.0;     // -eps/(m+1) int a' u^{m+1}
  double dMhat_rhs = 0.0;  // -(3/2) eps int b' u_x^2 - (eps/2) int (lambda b' - eps^2 b''') u^2, b = a^{1/m}
  double boundary_max = 0.0;
  double spectral_tail = 0.0;
};

struct RunDiagnostics {
  std::size_t steps = 0;
  double dt = 0.0;
  double max_mass_increase = -INFINITY;  // largest one-step change of M
  double max_boundary = 0.0;
  double max_spectral_tail = 0.0;
  double energy_drift = 0.0;  // max |Ea - Ea(0)| / |Ea(0)|
  double l1_drift = 0.0;      // max |L1 - L1(0)|
  std::vector<std::string> warnings;
};

// Exact soliton amp * Q_c(x - x0) placed on the grid at time t.
SimState soliton_state(const SimConfig& cfg, double c, double x0, double amplitude, double t);
// Standard initial datum Q(x + (1 - lambda) T_eps) at t = -T_eps.
SimState initialize_soliton(const SimConfig& cfg);

// Periodic pseudospectral ETDRK4 integrator for
//   u_t + (u_xx - lambda u + a(eps x) u^m)_x = 0.
class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg, double dt);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void set_state(const SimState& s);
  SimState state();
  double time() const { return t_; }
  double dt() const { return dt_; }
  void step();
  // Mass from the Fourier coefficients, without leaving spectral space.
  double spectral_mass() const;
  InvariantRecord invariants();
  const std::vector<double>& x() const { return x_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double t_ = 0.0;
  double dt_ = 0.0;
  std::vector<double> x_;
};

InvariantRecord compute_invariants(const SimConfig& cfg, const SimState& s);

struct RunResult {
  std::vector<InvariantRecord> records;
  RunDiagnostics diagnostics;
  SimState final_state;
};

using SnapshotSink = std::function<void(const SimState&)>;
RunResult run(const SimConfig& cfg, const SimState& initial, const SnapshotSink& sink = {});

struct MassDerivativeReport {
  double max_abs_mismatch = 0.0;       // for dM/dt
  double max_rel_mismatch = 0.0;
  double max_abs_mismatch_hat = 0.0;   // for dMhat/dt
  double max_rel_mismatch_hat = 0.0;
  std::size_t samples = 0;
};

// Centered differences of the recorded M and Mhat against the closed-form rates.
MassDerivativeReport mass_derivative_check(const std::vector<InvariantRecord>& records);

}  // namespace solitonlab
