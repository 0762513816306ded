#include "solitonlab/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>

#include <json.hpp>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/soliton.hpp"

namespace solitonlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double finite_or_nan(double v) { return std::isfinite(v) ? v : NAN; }

json fit_json(const ModulationFit& f) {
  return json{{"t", f.t},           {"c2", f.c2},
              {"rho2", f.rho2},     {"valid", f.valid},
              {"iterations", f.iterations},
              {"post_interaction", f.post_interaction},
              {"w_h1", f.w_h1},     {"message", f.message}};
}

json base_document(const Scenario& s, const std::string& kind) {
  return json{{"kind", kind},
              {"version", std::string(kArtifactVersion)},
              {"config_hash", hash_hex(config_hash(s))},
              {"scenario", s.name}};
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

Provenance provenance(const Scenario& s) { return Provenance{config_hash(s), std::string(kArtifactVersion)}; }

void write_echo(const Scenario& s) {
  write_file_atomic(fs::path(s.out_dir) / "config.echo.ini", echo_config(s));
}

// Index of the snapshot closest to time t, if within tol.
std::optional<std::size_t> snapshot_near(const std::vector<SimState>& snaps, double t, double tol) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < snaps.size(); ++i)
    if (std::abs(snaps[i].t - t) <= tol && (!best || std::abs(snaps[i].t - t) < std::abs(snaps[*best].t - t)))
      best = i;
  return best;
}

json shelf_json(const ShelfComparison& r) {
  return json{{"t", r.t},
              {"window", {r.window_lo, r.window_hi}},
              {"rel_error", r.rel_error},
              {"norm_z", r.norm_z},
              {"norm_pred", r.norm_pred},
              {"mean_z", r.mean_z},
              {"mean_pred", r.mean_pred},
              {"predicted_sign", r.predicted_sign},
              {"sign_agreement", r.sign_agreement}};
}

json analysis_json(const AnalysisOutput& a) {
  json j;
  j["epsilon"] = a.epsilon;
  j["T"] = a.T;
  j["c_infinity"] = a.c_infinity;
  if (a.has_exit)
    j["exit"] = {{"fit", fit_json(a.exit_fit)},
                 {"rel_error", a.exit_rel_error},
                 {"misfit_scaled", a.exit_misfit_scaled}};
  if (a.has_shelf) j["shelf"] = shelf_json(a.shelf);
  if (a.has_late) {
    j["l1"] = {{"total", a.l1.total},
               {"soliton", a.l1.soliton},
               {"tail", a.l1.tail},
               {"ahead", a.l1.ahead},
               {"tail_difference", a.l1.tail_difference},
               {"predicted_tail", a.l1.predicted_tail},
               {"kappa", a.l1.kappa},
               {"rel_error", a.l1.rel_error}};
    j["energy"] = {{"c_plus", a.energy.c_plus},
                   {"E_total", a.energy.E_total},
                   {"E_soliton", a.energy.E_soliton},
                   {"E_plus_measured", a.energy.E_plus_measured},
                   {"E_plus_direct", a.energy.E_plus_direct},
                   {"E_plus_formula", a.energy.E_plus_formula},
                   {"identity_residual", a.energy.identity_residual}};
    j["nonvanishing"] = {{"min_w_h1", a.nonvanishing.min_w_h1},
                         {"t_min", a.nonvanishing.t_min},
                         {"max_w_h1", a.nonvanishing.max_w_h1},
                         {"floor", a.nonvanishing.floor},
                         {"ratio", finite_or_nan(a.nonvanishing.ratio)}};
    j["stability_ceiling"] = a.stability_ceiling;
    j["virial"] = {{"time_integral", a.virial.time_integral}, {"constant", a.virial.constant}};
    const auto& m = a.monotonicity;
    j["monotonicity"] = {{"sigma", m.sigma},
                         {"K0", m.K0},
                         {"viol_I", m.viol_I},
                         {"viol_I_tilde", m.viol_I_tilde},
                         {"viol_J", m.viol_J},
                         {"viol_Mscript_early", m.viol_Mscript_early},
                         {"viol_Mscript_late", m.viol_Mscript_late},
                         {"K", {m.K_I, m.K_I_tilde, m.K_J, m.K_M}},
                         {"ok", {m.I_ok, m.I_tilde_ok, m.J_ok, m.Mscript_ok}}};
  }
  j["notes"] = a.notes;
  return j;
}

double slope_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::isfinite(y[i]) && y[i] > 0.0) {
      xs.push_back(x[i]);
      ys.push_back(y[i]);
    }
  return xs.size() >= 2 ? loglog_slope(xs, ys) : NAN;
}

int report_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}

}  // namespace

SimulationOutput simulate(const Scenario& s, double eps, Exec exec) {
  SimulationOutput out;
  out.config = s.sim_config(eps);
  out.config.exec = exec;
  out.run = run(out.config, initialize_soliton(out.config),
                [&](const SimState& st) { out.snapshots.push_back(st); });
  out.mass_rates = mass_derivative_check(out.run.records);
  return out;
}

AnalysisOutput analyze(const Scenario& s, double eps, const std::vector<SimState>& snaps) {
  if (snaps.empty()) throw Error("no snapshots to analyze");
  const SimConfig cfg = s.sim_config(eps);
  const AnalysisContext ctx = AnalysisContext::from_config(cfg);
  const FitOptions opt = s.fit_options();
  AnalysisOutput a;
  a.epsilon = eps;
  a.T = ctx.T;
  a.c_infinity = solve_c_infinity(s.m, s.lambda);
  a.fits = fit_series(ctx, snaps, opt);
  const double t_last = snaps.back().t;
  const AdiabaticTrajectory traj =
      integrate_adiabatic(cfg.constants, cfg.potential, eps, std::max(t_last, ctx.T) + 1.0);
  attach_time_shift(a.fits, traj);

  const double tol = 1e-6 * ctx.T;
  if (const auto i = snapshot_near(snaps, ctx.T, tol)) {
    FitOptions post = opt;
    post.phase = FitPhase::post;
    const ModulationFit& seed = a.fits[*i];
    a.exit_fit = fit_modulation(ctx, snaps[*i], seed.valid ? std::optional(FitGuess{seed.c2, seed.rho2}) : std::nullopt,
                                post);
    if (a.exit_fit.valid) {
      a.has_exit = true;
      a.exit_rel_error = std::abs(a.exit_fit.c2 - a.c_infinity) / a.c_infinity;
      a.exit_misfit_scaled = a.exit_fit.w_h1 / std::sqrt(eps);
    } else {
      a.notes.push_back("exit fit failed: " + a.exit_fit.message);
    }
  } else {
    a.notes.push_back("no snapshot at t = T");
  }

  if (const auto i = snapshot_near(snaps, 0.0, tol)) {
    if (a.fits[*i].valid) {
      try {
        const CorrectionProfiles prof = build_correction_profiles(cfg.constants);
        a.shelf = shelf_compare(ctx, snaps[*i], a.fits[*i], prof, traj, s.shelf_span);
        a.has_shelf = true;
      } catch (const Error& e) {
        a.notes.push_back(std::string("shelf comparison skipped: ") + e.what());
      }
    } else {
      a.notes.push_back("fit at t = 0 failed: " + a.fits[*i].message);
    }
  } else {
    a.notes.push_back("no snapshot at t = 0");
  }

  std::vector<SimState> post_states;
  std::vector<ModulationFit> post_fits;
  for (std::size_t i = 0; i < snaps.size(); ++i)
    if (snaps[i].t >= ctx.T - tol && a.fits[i].valid) {
      post_states.push_back(snaps[i]);
      post_fits.push_back(a.fits[i]);
    }
  if (!post_states.empty() && a.fits.back().valid && t_last > ctx.T + tol) {
    a.has_late = true;
    a.l1 = l1_budget(ctx, snaps.back(), a.fits.back(), s.l1_core);
    a.energy = energy_budget(ctx, snaps.back(), a.fits.back());
    a.nonvanishing = nonvanishing_residual(a.fits, 2.0 * ctx.T - tol, 3.0 * ctx.T + tol, s.control_floor);
    if (s.control_floor <= 0.0) a.nonvanishing.ratio = NAN;
    for (const auto& f : post_fits) a.stability_ceiling = std::max(a.stability_ceiling, f.w_h1 / std::sqrt(eps));
    a.virial = virial_series(ctx, post_states, post_fits, s.virial_A0);
    MonotonicityParams mp;
    mp.x0 = s.monitor_x0;
    if (post_states.size() >= 3) a.monotonicity = monotonicity_series(ctx, post_states, post_fits, mp);
    else a.notes.push_back("too few post-interaction snapshots for the monotonicity monitors");
  } else {
    a.notes.push_back("no valid post-interaction state");
  }
  return a;
}

ResidualScaling residual_scaling(const Scenario& s, double eps, const CorrectionProfiles& prof) {
  ApproximateSolution as(prof, s.potential, eps);
  ResidualScaling r;
  r.epsilon = eps;
  const int n = s.residual_samples;
  for (int i = 0; i < n; ++i) {
    const double t = -as.T() + 2.0 * as.T() * i / (n - 1);
    r.corrected.push_back(as.residual(t, true));
    r.uncorrected.push_back(as.residual(t, false));
    r.max_corrected = std::max(r.max_corrected, r.corrected.back().l2);
    r.max_uncorrected = std::max(r.max_uncorrected, r.uncorrected.back().l2);
  }
  return r;
}

SweepResult sweep(const Scenario& s, int threads) {
  std::vector<double> eps = s.epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  if (eps.size() < 2) throw Error("a sweep needs at least two distinct epsilon values");

  const CorrectionProfiles prof = build_correction_profiles(s.constants());
  SweepResult res;
  res.rows.resize(eps.size());
  const auto count = static_cast<std::ptrdiff_t>(eps.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(threads, 1))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    SweepRow& row = res.rows[static_cast<std::size_t>(i)];
    row.epsilon = eps[static_cast<std::size_t>(i)];
    try {
      const ResidualScaling rs = residual_scaling(s, row.epsilon, prof);
      row.residual_corrected = rs.max_corrected;
      row.residual_uncorrected = rs.max_uncorrected;
      if (s.sweep_simulate) {
        const SimulationOutput sim = simulate(s, row.epsilon, Exec::serial);
        const AnalysisOutput an = analyze(s, row.epsilon, sim.snapshots);
        if (an.has_exit) {
          row.exit_error = an.exit_rel_error;
          row.misfit_scaled = an.exit_misfit_scaled;
        }
        if (an.has_shelf) row.shelf_error = an.shelf.rel_error;
        if (an.has_late) row.tail_l1_error = an.l1.rel_error;
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.status = std::string("failed: ") + e.what();
    }
  }

  std::vector<double> x, sc, su, ex, sh, tl;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    auto& r = res.rows[i];
    if (i > 0 && res.rows[i - 1].ok && r.ok) {
      const auto& p = res.rows[i - 1];
      const double dl = std::log(r.epsilon / p.epsilon);
      r.local_slope_corrected = std::log(r.residual_corrected / p.residual_corrected) / dl;
      r.local_slope_uncorrected = std::log(r.residual_uncorrected / p.residual_uncorrected) / dl;
    }
    if (!r.ok) continue;
    x.push_back(r.epsilon);
    sc.push_back(r.residual_corrected);
    su.push_back(r.residual_uncorrected);
    ex.push_back(r.exit_error);
    sh.push_back(r.shelf_error);
    tl.push_back(r.tail_l1_error);
  }
  res.slope_corrected = slope_or_nan(x, sc);
  res.slope_uncorrected = slope_or_nan(x, su);
  res.slope_exit_error = slope_or_nan(x, ex);
  res.slope_shelf_error = slope_or_nan(x, sh);
  res.slope_tail_l1_error = slope_or_nan(x, tl);
  return res;
}

int command_verify(const Scenario& s) {
  try {
    const VerifyReport rep = run_verify(s);
    json j = base_document(s, "verify");
    j["passed"] = rep.passed();
    j["failures"] = rep.failures();
    json checks = json::array();
    for (const auto& c : rep.checks) {
      checks.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"value", c.value},
                        {"tolerance", c.tolerance},
                        {"detail", c.detail}});
      std::printf("%-4s %-46s %.3e (tol %.1e)\n", c.passed ? "ok" : "FAIL", c.name.c_str(), c.value, c.tolerance);
    }
    j["checks"] = checks;
    write_echo(s);
    write_json(fs::path(s.out_dir) / "verify.json", j);
    std::printf("%zu checks, %zu failed\n", rep.checks.size(), rep.failures());
    return rep.passed() ? 0 : 2;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int command_adiabatic(const Scenario& s) {
  try {
    const ModelConstants k = s.constants();
    const double T = interaction_time(s.lambda, s.epsilon);
    const AdiabaticTrajectory traj = integrate_adiabatic(k, s.potential, s.epsilon, std::max(s.t_end, 1.0) * T);
    CsvTable tab{{"t", "c", "rho", "first_integral_residual"}, {}};
    for (const auto& st : traj.samples())
      tab.add_numeric_row({st.t, st.c, st.rho, st.c - c_from_first_integral(traj, st.rho)});
    const ExitBoundsReport ex = exit_bounds_check(traj);
    json j = base_document(s, "adiabatic");
    j["T"] = T;
    j["c_infinity"] = solve_c_infinity(s.m, s.lambda);
    j["c_final"] = traj.final_state().c;
    j["first_integral_residual"] = first_integral_residual(traj);
    j["exit_bounds"] = {{"rho_exit", ex.rho_exit}, {"lower", ex.lower},   {"upper", ex.upper},
                        {"c_min", ex.c_min},       {"c_max", ex.c_max},   {"c_exit", ex.c_exit},
                        {"rho_within", ex.rho_within}, {"c_within", ex.c_within}};
    write_echo(s);
    write_csv(fs::path(s.out_dir) / "adiabatic.csv", tab, provenance(s));
    write_json(fs::path(s.out_dir) / "adiabatic.json", j);
    std::printf("T = %.6g, c(end) = %.10g, c_inf = %.10g, first-integral residual %.3e\n", T,
                traj.final_state().c, j["c_infinity"].get<double>(), j["first_integral_residual"].get<double>());
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int command_correction(const Scenario& s) {
  try {
    const CorrectionProfiles prof = build_correction_profiles(s.constants());
    // A_c and A_sharp are taken at t = 0 on the adiabatic trajectory.
    const AdiabaticTrajectory traj = integrate_adiabatic(s.constants(), s.potential, s.epsilon, 1.0);
    const AdiabaticState mid = traj.at(0.0);
    const std::vector<double> y = prof.tilde.grid.nodes();
    std::vector<double> Ac(y.size()), Asharp(y.size());
    assemble_Ac(prof, s.potential, s.epsilon, mid.c, mid.rho, y, Ac);
    Asharp = Ac;
    cutoff_Asharp(y, s.epsilon, Asharp);
    CsvTable profiles{{"y", "A_tilde", "A_hat", "A_c", "A_sharp"}, {}};
    for (std::size_t i = 0; i < y.size(); ++i)
      profiles.add_numeric_row({y[i], prof.tilde.A[i], prof.hat.A[i], Ac[i], Asharp[i]});
    const ResidualScaling rs = residual_scaling(s, s.epsilon, prof);
    CsvTable res{{"t", "S_l2_corrected", "S_h2_corrected", "S_l2_uncorrected", "S_minus_epsF1_l2"}, {}};
    for (std::size_t i = 0; i < rs.corrected.size(); ++i)
      res.add_numeric_row({rs.corrected[i].t, rs.corrected[i].l2, rs.corrected[i].h2, rs.uncorrected[i].l2,
                           rs.uncorrected[i].dev_from_eF1_l2});
    json j = base_document(s, "correction");
    j["beta_tilde"] = prof.beta_tilde();
    j["beta_hat"] = prof.beta_hat();
    j["beta_tilde_exact"] = beta_tilde_exact(s.m);
    j["beta_hat_exact"] = beta_hat_exact(s.m);
    j["model_residual"] = {prof.tilde.residual_l2, prof.hat.residual_l2};
    j["max_residual_corrected"] = rs.max_corrected;
    j["max_residual_uncorrected"] = rs.max_uncorrected;
    write_echo(s);
    write_csv(fs::path(s.out_dir) / "correction_profiles.csv", profiles, provenance(s));
    write_csv(fs::path(s.out_dir) / "residual.csv", res, provenance(s));
    write_json(fs::path(s.out_dir) / "correction.json", j);
    std::printf("beta_tilde = %.12g, beta_hat = %.12g, max ||S|| corrected %.4e, uncorrected %.4e\n",
                prof.beta_tilde(), prof.beta_hat(), rs.max_corrected, rs.max_uncorrected);
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int command_simulate(const Scenario& s) {
  try {
    const SimulationOutput sim = simulate(s, s.epsilon);
    const Provenance prov = provenance(s);
    CsvTable tab{{"t", "M", "Mhat", "Ea", "L1", "Mscript", "dM_rhs", "dMhat_rhs", "boundary_max", "spectral_tail"},
                 {}};
    for (const auto& r : sim.run.records)
      tab.add_numeric_row(
          {r.t, r.M, r.Mhat, r.Ea, r.L1, r.Mscript, r.dM_rhs, r.dMhat_rhs, r.boundary_max, r.spectral_tail});
    const fs::path snapdir = fs::path(s.out_dir) / "snapshots";
    if (fs::exists(snapdir))
      for (const auto& e : fs::directory_iterator(snapdir))
        if (e.path().extension() == ".f64") fs::remove(e.path());
    for (std::size_t i = 0; i < sim.snapshots.size(); ++i)
      write_snapshot(snapdir / snapshot_filename(i), Snapshot{sim.config.grid, sim.snapshots[i], prov.config_hash});
    const auto& d = sim.run.diagnostics;
    json j = base_document(s, "simulate");
    j["grid"] = {{"x_min", sim.config.grid.x_min}, {"x_max", sim.config.grid.x_max}, {"n", sim.config.grid.n}};
    j["dt"] = d.dt;
    j["steps"] = d.steps;
    j["energy_drift"] = d.energy_drift;
    j["l1_drift"] = d.l1_drift;
    j["max_mass_increase"] = d.max_mass_increase;
    j["max_boundary"] = d.max_boundary;
    j["max_spectral_tail"] = d.max_spectral_tail;
    j["mass_rate_mismatch"] = {sim.mass_rates.max_rel_mismatch, sim.mass_rates.max_rel_mismatch_hat};
    j["snapshots"] = sim.snapshots.size();
    j["warnings"] = d.warnings;
    j["scenario_warnings"] = scenario_warnings(s);
    write_echo(s);
    write_csv(fs::path(s.out_dir) / "invariants.csv", tab, prov);
    write_json(fs::path(s.out_dir) / "summary.json", j);
    for (const auto& w : d.warnings) std::cerr << "warning: " << w << "\n";
    std::printf("%zu steps, energy drift %.3e, L1 drift %.3e, %zu snapshots\n", d.steps, d.energy_drift, d.l1_drift,
                sim.snapshots.size());
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int command_analyze(const Scenario& s) {
  try {
    const std::uint64_t h = config_hash(s);
    const auto snaps = read_snapshot_directory(fs::path(s.out_dir) / "snapshots");
    std::vector<SimState> states;
    const Grid1D expect = s.grid_for(s.epsilon);
    for (const auto& sn : snaps) {
      if (sn.config_hash != h)
        throw Error("snapshot produced by configuration " + hash_hex(sn.config_hash) + ", expected " + hash_hex(h));
      if (sn.grid.n != expect.n || sn.grid.x_min != expect.x_min || sn.grid.x_max != expect.x_max)
        throw Error("snapshot grid does not match the configuration");
      states.push_back(sn.state);
    }
    const AnalysisOutput a = analyze(s, s.epsilon, states);
    CsvTable fits{{"t", "c2", "rho2", "resid1", "resid2", "w_h1", "time_shift", "post_interaction", "valid"}, {}};
    for (const auto& f : a.fits)
      fits.add_row({format_double(f.t), format_double(f.c2), format_double(f.rho2), format_double(f.resid1),
                    format_double(f.resid2), format_double(f.w_h1), format_double(f.time_shift),
                    f.post_interaction ? "1" : "0", f.valid ? "1" : "0"});
    CsvTable mon{{"t", "x0", "I", "I_tilde", "J", "Mscript"}, {}};
    for (const auto& r : a.monotonicity.rows) mon.add_numeric_row({r.t, r.x0, r.I, r.I_tilde, r.J, r.Mscript});
    CsvTable vir{{"t", "virial", "localized_norm", "dvirial_dt"}, {}};
    for (const auto& v : a.virial.samples) vir.add_numeric_row({v.t, v.virial, v.localized_norm, v.dvirial_dt});
    json j = base_document(s, "analyze");
    j.update(analysis_json(a));
    write_echo(s);
    write_csv(fs::path(s.out_dir) / "modulation.csv", fits, provenance(s));
    write_csv(fs::path(s.out_dir) / "monitors.csv", mon, provenance(s));
    write_csv(fs::path(s.out_dir) / "virial.csv", vir, provenance(s));
    write_json(fs::path(s.out_dir) / "budget.json", j);
    if (a.has_exit) std::printf("c2(T) = %.8g (c_inf %.8g, rel %.4f)\n", a.exit_fit.c2, a.c_infinity, a.exit_rel_error);
    if (a.has_shelf) std::printf("shelf rel error %.4f\n", a.shelf.rel_error);
    if (a.has_late) std::printf("tail L1 %.6g (predicted %.6g)\n", a.l1.tail, a.l1.predicted_tail);
    for (const auto& n : a.notes) std::cerr << "note: " << n << "\n";
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int command_sweep(const Scenario& s, int threads) {
  try {
    const SweepResult r = sweep(s, threads);
    CsvTable tab{{"epsilon", "status", "residual_corrected", "residual_uncorrected", "local_slope_corrected",
                  "local_slope_uncorrected", "exit_error", "shelf_error", "tail_l1_error", "misfit_scaled"},
                 {}};
    bool any_failed = false;
    for (const auto& row : r.rows) {
      any_failed = any_failed || !row.ok;
      tab.add_row({format_double(row.epsilon), row.status, format_double(row.residual_corrected),
                   format_double(row.residual_uncorrected), format_double(row.local_slope_corrected),
                   format_double(row.local_slope_uncorrected), format_double(row.exit_error),
                   format_double(row.shelf_error), format_double(row.tail_l1_error),
                   format_double(row.misfit_scaled)});
    }
    json j = base_document(s, "sweep");
    j["slopes"] = {{"residual_corrected", finite_or_nan(r.slope_corrected)},
                   {"residual_uncorrected", finite_or_nan(r.slope_uncorrected)},
                   {"exit_error", finite_or_nan(r.slope_exit_error)},
                   {"shelf_error", finite_or_nan(r.slope_shelf_error)},
                   {"tail_l1_error", finite_or_nan(r.slope_tail_l1_error)}};
    write_echo(s);
    write_csv(fs::path(s.out_dir) / "sweep.csv", tab, provenance(s));
    write_json(fs::path(s.out_dir) / "sweep.json", j);
    std::printf("residual exponent: corrected %.4f, uncorrected %.4f\n", r.slope_corrected, r.slope_uncorrected);
    return any_failed ? 3 : 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

}  // namespace solitonlab
