#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "solitonlab/analysis.hpp"
#include "solitonlab/model.hpp"
#include "solitonlab/pde.hpp"
#include "solitonlab/potential.hpp"

namespace solitonlab {

// One fully validated experiment description. Times are in units of T_eps.
struct Scenario {
  std::string name = "default";

  // [model]
  int m = 3;
  double lambda = 0.1;
  double epsilon = 0.05;

  // [potential]
  PotentialSpec potential;

  // [grid]; zero selects the epsilon-scaled default
  double half_width = 0.0;  // default 15/eps
  std::size_t n = 0;        // default: smallest power of two >= 819.2/eps

  // [time]
  double t_end = 3.0;
  double dt = 0.0;
  double record_every = 0.05;
  double snapshot_every = 0.05;
  double snapshot_from = 0.0;
  bool dealias = true;

  // [analysis]
  double fit_half_window = 60.0;
  double shelf_span = 0.0;  // 0 selects 2/eps
  double l1_core = 10.0;
  double virial_A0 = 10.0;
  std::vector<double> monitor_x0{5.0, 10.0, 20.0};
  double control_floor = 0.0;
  int residual_samples = 41;

  // [sweep]
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  bool sweep_simulate = false;

  // [output]
  std::string out_dir = "out";
  bool write_snapshots = true;

  bool operator==(const Scenario&) const = default;

  ModelConstants constants() const { return ModelConstants::create(m, lambda); }
  Grid1D grid_for(double eps) const;
  // Simulation setup for this scenario at a given epsilon.
  SimConfig sim_config(double eps) const;
  SimConfig sim_config() const { return sim_config(epsilon); }
  FitOptions fit_options() const;
};

struct ParseOptions {
  bool allow_out_of_theory = false;
};

struct ConfigIssue {
  std::size_t line = 0;    // 1-based; 0 for whole-scenario constraints
  std::size_t column = 0;  // 1-based
  std::string message;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string source, std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// Grammar: '[section]' headers, 'key = value' entries, '#' starts a comment.
// Lists are comma separated. Unknown sections or keys, repeated sections and
// repeated keys are errors. All problems are collected before throwing.
Scenario parse_config_text(const std::string& text, const std::string& source = "<string>",
                           const ParseOptions& opt = {});
Scenario parse_config(const std::filesystem::path& path, const ParseOptions& opt = {});

// Constraint violations of an already populated scenario.
std::vector<std::string> validate(const Scenario& s, const ParseOptions& opt = {});
// Non-fatal notes, e.g. out-of-theory lambda accepted by override.
std::vector<std::string> scenario_warnings(const Scenario& s);

// Canonical text form; parsing it yields an equal scenario.
std::string echo_config(const Scenario& s);
// 64-bit FNV-1a of the canonical text, ignoring the output directory.
std::uint64_t config_hash(const Scenario& s);
std::string hash_hex(std::uint64_t h);

}  // namespace solitonlab
