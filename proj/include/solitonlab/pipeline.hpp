#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "solitonlab/analysis.hpp"
#include "solitonlab/config.hpp"
#include "solitonlab/correction.hpp"
#include "solitonlab/io.hpp"
#include "solitonlab/pde.hpp"
#include "solitonlab/verify.hpp"

namespace solitonlab {

struct SimulationOutput {
  SimConfig config;
  RunResult run;
  std::vector<SimState> snapshots;
  MassDerivativeReport mass_rates;
};

SimulationOutput simulate(const Scenario& s, double eps, Exec exec = Exec::parallel);

struct AnalysisOutput {
  double epsilon = 0.0;
  double T = 0.0;
  double c_infinity = 0.0;
  std::vector<ModulationFit> fits;

  // Fit at t = T_eps with the post-interaction normalization.
  bool has_exit = false;
  ModulationFit exit_fit;
  double exit_rel_error = 0.0;      // |c2 - c_inf| / c_inf
  double exit_misfit_scaled = 0.0;  // ||w||_{H^1} / sqrt(eps)

  bool has_shelf = false;  // t = 0 snapshot available and fitted
  ShelfComparison shelf;

  bool has_late = false;  // final snapshot lies past the interaction
  L1Budget l1;
  EnergyBudget energy;
  NonvanishingReport nonvanishing;
  double stability_ceiling = 0.0;  // sup_{t >= T} ||w||_{H^1} / sqrt(eps)
  VirialSeries virial;
  MonotonicityReport monotonicity;

  std::vector<std::string> notes;
};

AnalysisOutput analyze(const Scenario& s, double eps, const std::vector<SimState>& snapshots);

struct ResidualScaling {
  double epsilon = 0.0;
  std::vector<ResidualSample> corrected, uncorrected;
  double max_corrected = 0.0;    // max_t ||S||_{L^2} over [-T, T]
  double max_uncorrected = 0.0;
};

ResidualScaling residual_scaling(const Scenario& s, double eps, const CorrectionProfiles& prof);

struct SweepRow {
  double epsilon = 0.0;
  bool ok = true;
  std::string status = "ok";
  double residual_corrected = NAN;
  double residual_uncorrected = NAN;
  double local_slope_corrected = NAN;  // against the previous row
  double local_slope_uncorrected = NAN;
  double exit_error = NAN;
  double shelf_error = NAN;
  double tail_l1_error = NAN;
  double misfit_scaled = NAN;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by decreasing epsilon
  double slope_corrected = NAN;
  double slope_uncorrected = NAN;
  double slope_exit_error = NAN;
  double slope_shelf_error = NAN;
  double slope_tail_l1_error = NAN;
};

// Runs one independent job per epsilon, in parallel over runs, each sequential inside.
SweepResult sweep(const Scenario& s, int threads);

// Subcommands: each writes its files under s.out_dir and returns a process exit code.
int command_verify(const Scenario& s);
int command_adiabatic(const Scenario& s);
int command_correction(const Scenario& s);
int command_simulate(const Scenario& s);
int command_analyze(const Scenario& s);
int command_sweep(const Scenario& s, int threads);

}  // namespace solitonlab
