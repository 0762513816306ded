#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/correction.hpp"
#include "solitonlab/pde.hpp"

namespace solitonlab {

// Shared parameters of a run under analysis.
struct AnalysisContext {
  ModelConstants constants;
  PotentialSpec potential;
  double epsilon = 0.05;
  Grid1D grid;
  double T = 0.0;  // T_eps

  static AnalysisContext from_config(const SimConfig& cfg);
};

enum class FitPhase { automatic, interaction, post };

struct FitOptions {
  double tolerance = 1e-10;
  int max_iterations = 60;
  double half_window = 60.0;     // fit region |x - rho| <= half_window / sqrt(c)
  double min_amplitude = 1e-3;
  FitPhase phase = FitPhase::automatic;  // automatic switches at t = T_eps
};

struct FitGuess {
  double c = 1.0;
  double rho = 0.0;
};

// Decomposition u = R + z with R = s Q_{c2}(x - rho2) and
// s = 1/a_t(eps rho2) for t <= T_eps, s = a_plus^{-1/(m-1)} afterwards.
struct ModulationFit {
  double t = 0.0;
  double c2 = 0.0;
  double rho2 = 0.0;
  double resid1 = 0.0;  // int z R
  double resid2 = 0.0;  // int (x - rho2) R z
  double scale = 1.0;
  bool post_interaction = false;
  int iterations = 0;
  bool valid = false;
  std::string message;
  double w_h1 = 0.0;        // ||z||_{H^1}
  double time_shift = 0.0;  // (rho2 - rho_adiabatic(t)) / (c - lambda), when a trajectory is supplied
};

ModulationFit fit_modulation(const AnalysisContext& ctx, const SimState& s, const std::optional<FitGuess>& guess,
                             const FitOptions& opt = {});
std::vector<double> soliton_field(const AnalysisContext& ctx, const ModulationFit& fit);
std::vector<double> residual_field(const AnalysisContext& ctx, const SimState& s, const ModulationFit& fit);
// Sequential warm-started fits.
std::vector<ModulationFit> fit_series(const AnalysisContext& ctx, const std::vector<SimState>& states,
                                      const FitOptions& opt = {});
void attach_time_shift(std::vector<ModulationFit>& fits, const AdiabaticTrajectory& traj);

struct ShelfComparison {
  double t = 0.0;
  double window_lo = 0.0, window_hi = 0.0;  // in y = x - rho2
  double rel_error = 0.0;       // ||z - eps A_c|| / ||eps A_c|| on the window
  double norm_z = 0.0, norm_pred = 0.0;
  double mean_z = 0.0, mean_pred = 0.0;
  double predicted_sign = 0.0;  // sign of b (phi_c - sqrt c) on the window
  double sign_agreement = 0.0;  // fraction of window points where z has the predicted sign
};

// Window y in [-min(span, margin), -10]; span defaults to 2/eps.
ShelfComparison shelf_compare(const AnalysisContext& ctx, const SimState& s, const ModulationFit& fit,
                              const CorrectionProfiles& prof, const AdiabaticTrajectory& traj, double span = 0.0);

struct L1Budget {
  double total = 0.0;
  double soliton = 0.0;         // s int Q_{c2}
  double tail = 0.0;            // int u over x < rho2 - core, the mass left behind
  double ahead = 0.0;           // int u over x > rho2 + core
  double tail_difference = 0.0; // total - soliton
  double predicted_tail = 0.0;  // (1 - kappa_m) int Q
  double kappa = 0.0;
  double rel_error = 0.0;       // |tail - predicted| / predicted
};

double kappa_m(int m, double lambda);
L1Budget l1_budget(const AnalysisContext& ctx, const SimState& s, const ModulationFit& fit, double core = 10.0);

struct NonvanishingReport {
  double min_w_h1 = 0.0;
  double t_min = 0.0;
  double max_w_h1 = 0.0;
  double floor = 0.0;
  double ratio = 0.0;
};

NonvanishingReport nonvanishing_residual(const std::vector<ModulationFit>& fits, double t_lo, double t_hi,
                                         double floor);

// Cutoff functions of the monitors.
double phi_psi(double x);           // even, 1 on [0,1], e^{-|x|} beyond 2
double psi_fn(double x);            // odd primitive of phi_psi
double psi_infinity();
double psi_A(double x, double A);   // A (psi(inf) + psi(x/A))
double dpsi_A(double x, double A);  // phi_psi(x/A)
double phi_K(double x, double K0);  // (2/pi) arctan(e^{x/K0})

struct VirialSample {
  double t = 0.0;
  double virial = 0.0;          // int z^2 psi_{A0}(x - rho2)
  double localized_norm = 0.0;  // int (z_x^2 + z^2) e^{-|x - rho2|/A0}
  double dvirial_dt = 0.0;
};

struct VirialSeries {
  std::vector<VirialSample> samples;
  double time_integral = 0.0;   // of localized_norm
  double constant = 0.0;        // time_integral / eps
};

VirialSeries virial_series(const AnalysisContext& ctx, const std::vector<SimState>& states,
                           const std::vector<ModulationFit>& fits, double A0 = 10.0);

struct MonotonicityParams {
  std::vector<double> x0{5.0, 10.0, 20.0};
  double sigma = 0.0;  // 0 selects 0.4 (c_inf - lambda)
  double K0 = 0.0;     // 0 selects 1.5 sqrt(2/sigma)
};

struct MonitorRow {
  double t = 0.0;
  double x0 = 0.0;
  double I = 0.0, I_tilde = 0.0, J = 0.0, Mscript = 0.0;
};

struct MonotonicityReport {
  double sigma = 0.0, K0 = 0.0;
  std::vector<MonitorRow> rows;
  // Largest violation of each one-sided bound, per x0.
  std::vector<double> viol_I, viol_I_tilde, viol_J;
  double viol_Mscript_early = 0.0, viol_Mscript_late = 0.0;
  // Slack constants fitted on the smallest x0 and the bound check on the others.
  double K_I = 0.0, K_I_tilde = 0.0, K_J = 0.0, K_M = 0.0;
  bool I_ok = false, I_tilde_ok = false, J_ok = false, Mscript_ok = false;
};

MonotonicityReport monotonicity_series(const AnalysisContext& ctx, const std::vector<SimState>& states,
                                       const std::vector<ModulationFit>& fits, const MonotonicityParams& p = {});

struct EnergyBudget {
  double c_plus = 0.0;
  double E_total = 0.0;            // E_a[u]
  double E_soliton = 0.0;          // closed-form energy of 2^{-1/(m-1)} Q_{c+} in the a = 2 medium
  double E_plus_measured = 0.0;    // E_total - E_soliton
  double E_plus_direct = 0.0;      // E_a[w+] by quadrature
  double E_plus_formula = 0.0;
  double identity_residual = 0.0;  // |E_plus_measured - E_plus_formula|
  double m3_lambda0_lhs = 0.0;     // (3/2) E+ formula
  double m3_lambda0_rhs = 0.0;     // (c+/c_inf)^{3/2} - 1
};

EnergyBudget energy_budget(const AnalysisContext& ctx, const SimState& s, const ModulationFit& fit);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace solitonlab
