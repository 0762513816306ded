#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "solitonlab/config.hpp"
#include "solitonlab/io.hpp"
#include "solitonlab/pipeline.hpp"
#include "solitonlab/soliton.hpp"
#include "solitonlab/verify.hpp"

using namespace solitonlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("solitonlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const ConfigIssue& only_issue(const std::string& text, const ParseOptions& opt = {}) {
  static std::vector<ConfigIssue> held;
  try {
    parse_config_text(text, "<test>", opt);
  } catch (const ConfigError& e) {
    held = e.issues();
  }
  REQUIRE(held.size() == 1);
  return held.front();
}

}  // namespace

TEST_CASE("configuration round trip") {
  const std::string text = R"(# sample
[scenario]
name = ramp run
[model]
m = 2
lambda = 0.2   # inside the theory range
epsilon = 0.04
[potential]
family = erf
steepness = 2.5
[grid]
half_width = 500
n = 8192
[time]
t_end = 2.5
dealias = false
[analysis]
monitor_x0 = 4, 8
[sweep]
epsilons = 0.08, 0.04
simulate = true
[output]
dir = results
snapshots = false
)";
  const auto s = parse_config_text(text);
  CHECK(s.name == "ramp run");
  CHECK(s.m == 2);
  CHECK(s.lambda == 0.2);
  CHECK(s.potential.family == PotentialFamily::erf_step);
  CHECK(s.potential.steepness == 2.5);
  CHECK(s.n == 8192);
  CHECK_FALSE(s.dealias);
  CHECK(s.monitor_x0 == std::vector<double>{4.0, 8.0});
  CHECK(s.epsilons == std::vector<double>{0.08, 0.04});
  CHECK(s.sweep_simulate);
  CHECK(s.out_dir == "results");
  CHECK_FALSE(s.write_snapshots);

  const auto again = parse_config_text(echo_config(s));
  CHECK(again == s);
  CHECK(config_hash(again) == config_hash(s));
  auto moved = s;
  moved.out_dir = "elsewhere";
  CHECK(config_hash(moved) == config_hash(s));
  moved.epsilon = 0.041;
  CHECK(config_hash(moved) != config_hash(s));
  CHECK(hash_hex(0x1234).size() == 16);
}

TEST_CASE("property: random scenarios survive the canonical echo") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Scenario s;
    s.m = 2 + static_cast<int>(rng() % 3);
    s.lambda = u01(rng) * ModelConstants::create(s.m, 0.0).lambda0 * 0.99;
    s.epsilon = 0.01 + 0.2 * u01(rng);
    s.potential.steepness = 0.25 + 4.0 * u01(rng);
    s.t_end = 1.0 + 3.0 * u01(rng);
    s.monitor_x0 = {1.0 + u01(rng), 7.0 + u01(rng)};
    s.epsilons = {0.1 * u01(rng) + 0.01, 0.2 * u01(rng) + 0.12};
    REQUIRE(validate(s).empty());
    CHECK(parse_config_text(echo_config(s)) == s);
  }
}

TEST_CASE("configuration errors carry positions") {
  const auto& dup = only_issue("[model]\nm = 3\nm = 4\n");
  CHECK(dup.line == 3);
  CHECK(dup.message.find("line 2") != std::string::npos);

  const auto& unknown = only_issue("[model]\n  mass = 3\n");
  CHECK(unknown.line == 2);
  CHECK(unknown.column == 3);
  CHECK(unknown.message.find("mass") != std::string::npos);

  const auto& section = only_issue("[modle]\n");
  CHECK(section.line == 1);

  const auto& orphan = only_issue("m = 3\n");
  CHECK(orphan.line == 1);

  const auto& bad_number = only_issue("[model]\nepsilon = 0.05x\n");
  CHECK(bad_number.line == 2);
  CHECK(bad_number.column == 11);

  try {
    parse_config_text("[model]\nfoo = 1\nbar = 2\n[nope]\n");
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() == 3);
  }
}

TEST_CASE("out-of-theory lambda needs the override") {
  const std::string text = "[model]\nm = 3\nlambda = 0.9\n";
  const auto& issue = only_issue(text);
  CHECK(issue.line == 0);
  CHECK(issue.message.find("lambda") != std::string::npos);
  ParseOptions allow;
  allow.allow_out_of_theory = true;
  const auto s = parse_config_text(text, "<test>", allow);
  CHECK(s.lambda == 0.9);
  CHECK_FALSE(scenario_warnings(s).empty());
  CHECK_THROWS_AS(parse_config_text("[model]\nlambda = 1.0\n", "<test>", allow), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\nm = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\nepsilon = -0.1\n"), ConfigError);
}

TEST_CASE("scenario derived settings") {
  Scenario s;
  s.epsilon = 0.05;
  const auto g = s.grid_for(0.05);
  CHECK(g.x_max == doctest::Approx(300.0));
  CHECK(g.n == 16384);
  CHECK(s.grid_for(0.1).n == 8192);
  const auto cfg = s.sim_config();
  const double T = interaction_time(0.1, 0.05);
  CHECK(cfg.t_start == doctest::Approx(-T));
  CHECK(cfg.t_end == doctest::Approx(3.0 * T));
  CHECK(cfg.record_every == doctest::Approx(0.05 * T));
}

TEST_CASE("snapshot files round trip bit for bit") {
  const auto dir = scratch_dir("snap");
  Snapshot s;
  s.grid = Grid1D::create(-12.5, 40.0, 64);
  s.state.t = -3.25;
  s.config_hash = 0xdeadbeefcafef00dULL;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd;
  for (std::size_t i = 0; i < 64; ++i) s.state.u.push_back(nd(rng));
  s.state.u[5] = -0.0;
  s.state.u[6] = std::numeric_limits<double>::denorm_min();
  write_snapshot(dir / snapshot_filename(0), s);
  write_snapshot(dir / snapshot_filename(1), s);
  const auto back = read_snapshot(dir / snapshot_filename(0));
  CHECK(back.grid.x_min == s.grid.x_min);
  CHECK(back.grid.x_max == s.grid.x_max);
  CHECK(back.grid.n == s.grid.n);
  CHECK(back.state.t == s.state.t);
  CHECK(back.config_hash == s.config_hash);
  CHECK(std::memcmp(back.state.u.data(), s.state.u.data(), 64 * sizeof(double)) == 0);
  CHECK(read_snapshot_directory(dir).size() == 2);
  CHECK(snapshot_filename(12) == "u_000012.f64");

  auto bytes = encode_snapshot(s);
  bytes[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_snapshot(bytes), doctest::Contains("magic"), Error);
  CHECK_THROWS_AS(decode_snapshot(encode_snapshot(s).substr(0, 100)), Error);
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("CSV output carries provenance") {
  CsvTable t{{"t", "value"}, {}};
  t.add_numeric_row({0.1, 1.0 / 3.0});
  Provenance prov;
  prov.config_hash = 0xabc;
  const auto text = render_csv(t, prov);
  CHECK(text.rfind("# solitonlab 1.0.0 config_hash=0000000000000abc\n", 0) == 0);
  CHECK(text.find("t,value\n") != std::string::npos);
  CHECK(text.find("0.1,0.3333333333333333\n") != std::string::npos);
  CHECK_THROWS_AS(t.add_numeric_row({1.0}), Error);
  CHECK(std::stod(format_double(0.1)) == 0.1);

  const auto dir = scratch_dir("csv");
  write_csv(dir / "a.csv", t, prov);
  CHECK(read_file(dir / "a.csv") == text);
  write_file_atomic(dir / "a.csv", "replaced");
  CHECK(read_file(dir / "a.csv") == "replaced");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
}

TEST_CASE("sweep argument checks and determinism") {
  Scenario s;
  s.epsilons = {0.1};
  CHECK_THROWS_AS(sweep(s, 1), Error);
  s.epsilons = {0.1, 0.1};
  CHECK_THROWS_AS(sweep(s, 1), Error);

  s.epsilons = {0.1, 0.2};
  s.residual_samples = 5;
  const auto a = sweep(s, 1);
  const auto b = sweep(s, 2);
  REQUIRE(a.rows.size() == 2);
  CHECK(a.rows[0].epsilon == 0.2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.rows[i].ok);
    CHECK(a.rows[i].residual_corrected == b.rows[i].residual_corrected);
    CHECK(a.rows[i].residual_uncorrected == b.rows[i].residual_uncorrected);
  }
  CHECK(a.slope_corrected == b.slope_corrected);
  CHECK(std::isnan(a.slope_exit_error));
}

TEST_CASE("identity suite passes and detects a corrupted profile") {
  const Scenario s;
  const auto rep = run_verify(s);
  CHECK(rep.checks.size() >= 25);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
  }
  VerifyOptions bad;
  bad.soliton_override = [](const ModelConstants& k, double c, double x) { return 1.001 * eval_Qc(k, c, x); };
  const auto broken = run_verify(s, bad);
  CHECK_FALSE(broken.passed());
  CHECK(broken.failures() >= 3);
  const auto good = soliton_equation_residual(ModelConstants::create(3, 0.0), 1.0,
                                              [](const ModelConstants& k, double c, double x) { return eval_Qc(k, c, x); });
  CHECK(good < 1e-10);
}
