#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "solitonlab/config.hpp"
#include "solitonlab/pipeline.hpp"

namespace {

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("SOLITONLAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid SOLITONLAB_THREADS='" << env << "'\n";
  }
  return omp_get_max_threads();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soliton dynamics of the generalized KdV equation in a slowly varying medium"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool allow_out_of_theory = false;
  bool print_config = false;
  app.add_option("--config", config_path, "Scenario file (defaults are used when omitted)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides [output] dir)");
  app.add_option("--threads", threads, "Worker threads (overrides SOLITONLAB_THREADS)")->check(CLI::PositiveNumber);
  app.add_flag("--allow-out-of-theory", allow_out_of_theory, "Accept lambda above lambda0");
  app.add_flag("--print-config", print_config, "Print the canonical scenario before running");

  auto* config = app.add_subcommand("config", "Validate the scenario and print its canonical form and hash");
  auto* verify = app.add_subcommand("verify", "Closed-form identity suite");
  auto* adiabatic = app.add_subcommand("adiabatic", "Integrate the modulation equations");
  auto* correction = app.add_subcommand("correction", "Shelf correction profiles and residual of the approximate solution");
  auto* simulate = app.add_subcommand("simulate", "Run the PDE and write invariants and snapshots");
  auto* analyze = app.add_subcommand("analyze", "Fit and monitor the snapshots written by simulate");
  std::string run_dir;
  analyze->add_option("run_dir", run_dir, "Run directory written by simulate (reads its config.echo.ini)")
      ->check(CLI::ExistingDirectory);
  auto* sweep = app.add_subcommand("sweep", "Run the scenario over several epsilon values");

  CLI11_PARSE(app, argc, argv);
  if (!run_dir.empty()) {
    if (config_path.empty()) config_path = (std::filesystem::path(run_dir) / "config.echo.ini").string();
    if (out_dir.empty()) out_dir = run_dir;
  }

  solitonlab::Scenario scenario;
  try {
    solitonlab::ParseOptions po;
    po.allow_out_of_theory = allow_out_of_theory;
    if (!config_path.empty()) {
      scenario = solitonlab::parse_config(config_path, po);
    } else if (const auto errs = solitonlab::validate(scenario, po); !errs.empty()) {
      for (const auto& e : errs) std::cerr << "error: " << e << "\n";
      return 1;
    }
    if (!out_dir.empty()) scenario.out_dir = out_dir;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  for (const auto& w : solitonlab::scenario_warnings(scenario)) std::cerr << "warning: " << w << "\n";

  const int nthreads = resolve_threads(threads);
  omp_set_num_threads(nthreads);
  if (print_config) std::cout << solitonlab::echo_config(scenario) << "\n";

  if (*config) {
    std::cout << solitonlab::echo_config(scenario) << "\n# config_hash " << solitonlab::hash_hex(solitonlab::config_hash(scenario))
              << "\n";
    return 0;
  }
  if (*verify) return solitonlab::command_verify(scenario);
  if (*adiabatic) return solitonlab::command_adiabatic(scenario);
  if (*correction) return solitonlab::command_correction(scenario);
  if (*simulate) return solitonlab::command_simulate(scenario);
  if (*analyze) return solitonlab::command_analyze(scenario);
  if (*sweep) return solitonlab::command_sweep(scenario, nthreads);
  return 1;
}
