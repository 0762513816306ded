#include "solitonlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "solitonlab/adiabatic.hpp"
#include "solitonlab/io.hpp"

namespace solitonlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(const std::string& text, long long& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Each setter returns an empty string on success and a message otherwise.
struct Field {
  std::string section;
  std::string key;
  std::function<std::string(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

Field real_field(std::string sec, std::string key, double Scenario::*member) {
  return {sec, key,
          [member](Scenario& s, const std::string& v) -> std::string {
            double d;
            if (!parse_double(v, d)) return "expected a finite number, got '" + v + "'";
            s.*member = d;
            return {};
          },
          [member](const Scenario& s) { return format_double(s.*member); }};
}

Field bool_field(std::string sec, std::string key, bool Scenario::*member) {
  return {sec, key,
          [member](Scenario& s, const std::string& v) -> std::string {
            if (v == "true") s.*member = true;
            else if (v == "false") s.*member = false;
            else return "expected true or false, got '" + v + "'";
            return {};
          },
          [member](const Scenario& s) { return std::string(s.*member ? "true" : "false"); }};
}

Field list_field(std::string sec, std::string key, std::vector<double> Scenario::*member) {
  return {sec, key,
          [member](Scenario& s, const std::string& v) -> std::string {
            std::vector<double> out;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) {
              double d;
              const std::string t = trim(item);
              if (!parse_double(t, d)) return "expected a comma separated list of numbers, got '" + t + "'";
              out.push_back(d);
            }
            if (out.empty()) return "list is empty";
            s.*member = std::move(out);
            return {};
          },
          [member](const Scenario& s) {
            std::string r;
            for (std::size_t i = 0; i < (s.*member).size(); ++i) {
              if (i) r += ", ";
              r += format_double((s.*member)[i]);
            }
            return r;
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"scenario", "name",
                 [](Scenario& s, const std::string& v) -> std::string {
                   if (v.empty()) return "name must not be empty";
                   s.name = v;
                   return {};
                 },
                 [](const Scenario& s) { return s.name; }});
    f.push_back({"model", "m",
                 [](Scenario& s, const std::string& v) -> std::string {
                   long long i;
                   if (!parse_int(v, i)) return "expected an integer, got '" + v + "'";
                   s.m = static_cast<int>(i);
                   return {};
                 },
                 [](const Scenario& s) { return std::to_string(s.m); }});
    f.push_back(real_field("model", "lambda", &Scenario::lambda));
    f.push_back(real_field("model", "epsilon", &Scenario::epsilon));
    f.push_back({"potential", "family",
                 [](Scenario& s, const std::string& v) -> std::string {
                   try {
                     s.potential.family = parse_potential_family(v);
                   } catch (const Error& e) {
                     return e.what();
                   }
                   return {};
                 },
                 [](const Scenario& s) { return to_string(s.potential.family); }});
    f.push_back({"potential", "a_minus",
                 [](Scenario& s, const std::string& v) -> std::string {
                   return parse_double(v, s.potential.a_minus) ? "" : "expected a finite number, got '" + v + "'";
                 },
                 [](const Scenario& s) { return format_double(s.potential.a_minus); }});
    f.push_back({"potential", "a_plus",
                 [](Scenario& s, const std::string& v) -> std::string {
                   return parse_double(v, s.potential.a_plus) ? "" : "expected a finite number, got '" + v + "'";
                 },
                 [](const Scenario& s) { return format_double(s.potential.a_plus); }});
    f.push_back({"potential", "steepness",
                 [](Scenario& s, const std::string& v) -> std::string {
                   return parse_double(v, s.potential.steepness) ? "" : "expected a finite number, got '" + v + "'";
                 },
                 [](const Scenario& s) { return format_double(s.potential.steepness); }});
    f.push_back(real_field("grid", "half_width", &Scenario::half_width));
    f.push_back({"grid", "n",
                 [](Scenario& s, const std::string& v) -> std::string {
                   long long i;
                   if (!parse_int(v, i) || i < 0) return "expected a non-negative integer, got '" + v + "'";
                   s.n = static_cast<std::size_t>(i);
                   return {};
                 },
                 [](const Scenario& s) { return std::to_string(s.n); }});
    f.push_back(real_field("time", "t_end", &Scenario::t_end));
    f.push_back(real_field("time", "dt", &Scenario::dt));
    f.push_back(real_field("time", "record_every", &Scenario::record_every));
    f.push_back(real_field("time", "snapshot_every", &Scenario::snapshot_every));
    f.push_back(real_field("time", "snapshot_from", &Scenario::snapshot_from));
    f.push_back(bool_field("time", "dealias", &Scenario::dealias));
    f.push_back(real_field("analysis", "fit_half_window", &Scenario::fit_half_window));
    f.push_back(real_field("analysis", "shelf_span", &Scenario::shelf_span));
    f.push_back(real_field("analysis", "l1_core", &Scenario::l1_core));
    f.push_back(real_field("analysis", "virial_A0", &Scenario::virial_A0));
    f.push_back(list_field("analysis", "monitor_x0", &Scenario::monitor_x0));
    f.push_back(real_field("analysis", "control_floor", &Scenario::control_floor));
    f.push_back({"analysis", "residual_samples",
                 [](Scenario& s, const std::string& v) -> std::string {
                   long long i;
                   if (!parse_int(v, i)) return "expected an integer, got '" + v + "'";
                   s.residual_samples = static_cast<int>(i);
                   return {};
                 },
                 [](const Scenario& s) { return std::to_string(s.residual_samples); }});
    f.push_back(list_field("sweep", "epsilons", &Scenario::epsilons));
    f.push_back(bool_field("sweep", "simulate", &Scenario::sweep_simulate));
    f.push_back({"output", "dir",
                 [](Scenario& s, const std::string& v) -> std::string {
                   if (v.empty()) return "directory must not be empty";
                   s.out_dir = v;
                   return {};
                 },
                 [](const Scenario& s) { return s.out_dir; }});
    f.push_back(bool_field("output", "snapshots", &Scenario::write_snapshots));
    return f;
  }();
  return table;
}

const std::vector<std::string>& section_order() {
  static const std::vector<std::string> order{"scenario", "model",    "potential", "grid",
                                              "time",     "analysis", "sweep",     "output"};
  return order;
}

}  // namespace

ConfigError::ConfigError(std::string source, std::vector<ConfigIssue> issues)
    : Error([&] {
        std::string msg = source + ": " + std::to_string(issues.size()) + " configuration error(s)";
        for (const auto& i : issues) {
          msg += "\n  ";
          if (i.line != 0) msg += source + ":" + std::to_string(i.line) + ":" + std::to_string(i.column) + ": ";
          msg += i.message;
        }
        return msg;
      }()),
      issues_(std::move(issues)) {}

Grid1D Scenario::grid_for(double eps) const {
  const double hw = half_width > 0.0 ? half_width : 15.0 / eps;
  std::size_t nn = n;
  if (nn == 0) {
    const double target = 819.2 / eps;
    nn = 64;
    while (static_cast<double>(nn) < target - 1e-9) nn *= 2;
  }
  return Grid1D::centered(hw, nn);
}

SimConfig Scenario::sim_config(double eps) const {
  SimConfig cfg;
  cfg.constants = constants();
  cfg.potential = potential;
  cfg.epsilon = eps;
  cfg.grid = grid_for(eps);
  const double T = interaction_time(lambda, eps);
  cfg.dt = dt;
  cfg.t_start = -T;
  cfg.t_end = t_end * T;
  cfg.record_every = record_every * T;
  cfg.snapshot_every = write_snapshots ? snapshot_every * T : 0.0;
  cfg.snapshot_from = snapshot_from * T;
  cfg.dealias = dealias;
  return cfg;
}

FitOptions Scenario::fit_options() const {
  FitOptions o;
  o.half_window = fit_half_window;
  return o;
}

std::vector<std::string> validate(const Scenario& s, const ParseOptions& opt) {
  std::vector<std::string> v;
  auto plain = [](const std::string& t) {
    return !t.empty() && t.find_first_of("#\n\r") == std::string::npos && trim(t) == t;
  };
  if (!plain(s.name)) v.push_back("scenario.name must be non-empty without '#', line breaks or outer blanks");
  if (!plain(s.out_dir)) v.push_back("output.dir must be non-empty without '#', line breaks or outer blanks");
  if (s.m < 2 || s.m > 4) v.push_back("model.m must be 2, 3 or 4 (got " + std::to_string(s.m) + ")");
  if (s.lambda < 0.0) v.push_back("model.lambda must be non-negative");
  if (s.m >= 2 && s.m <= 4 && s.lambda >= 0.0) {
    const ModelConstants k = ModelConstants::create(s.m, s.lambda);
    if (!k.in_theory() && !opt.allow_out_of_theory)
      v.push_back("model.lambda = " + format_double(s.lambda) + " exceeds lambda0 = " + format_double(k.lambda0) +
                  " for m = " + std::to_string(s.m) + " (pass --allow-out-of-theory to override)");
    if (s.lambda >= 1.0) v.push_back("model.lambda must be below 1");
  }
  if (!(s.epsilon > 0.0 && s.epsilon <= 0.5)) v.push_back("model.epsilon must lie in (0, 0.5]");
  const auto& p = s.potential;
  if (!(p.a_minus > 0.0)) v.push_back("potential.a_minus must be positive");
  if (p.family != PotentialFamily::constant && !(p.a_plus > p.a_minus))
    v.push_back("potential.a_plus must exceed potential.a_minus");
  if (!(p.steepness > 0.0)) v.push_back("potential.steepness must be positive");
  if (s.half_width < 0.0) v.push_back("grid.half_width must be non-negative");
  if (s.n != 0 && (s.n < 64 || (s.n & (s.n - 1)) != 0)) v.push_back("grid.n must be 0 or a power of two >= 64");
  if (!(s.t_end > -1.0)) v.push_back("time.t_end must exceed -1 (the start time in units of T)");
  if (s.dt < 0.0) v.push_back("time.dt must be non-negative");
  if (!(s.record_every > 0.0)) v.push_back("time.record_every must be positive");
  if (s.snapshot_every < 0.0) v.push_back("time.snapshot_every must be non-negative");
  if (!(s.fit_half_window > 0.0)) v.push_back("analysis.fit_half_window must be positive");
  if (s.shelf_span < 0.0) v.push_back("analysis.shelf_span must be non-negative");
  if (!(s.l1_core > 0.0)) v.push_back("analysis.l1_core must be positive");
  if (!(s.virial_A0 > 0.0)) v.push_back("analysis.virial_A0 must be positive");
  if (std::any_of(s.monitor_x0.begin(), s.monitor_x0.end(), [](double x) { return !(x > 0.0); }))
    v.push_back("analysis.monitor_x0 entries must be positive");
  if (s.control_floor < 0.0) v.push_back("analysis.control_floor must be non-negative");
  if (s.residual_samples < 3) v.push_back("analysis.residual_samples must be at least 3");
  if (std::any_of(s.epsilons.begin(), s.epsilons.end(), [](double e) { return !(e > 0.0 && e <= 0.5); }))
    v.push_back("sweep.epsilons entries must lie in (0, 0.5]");
  return v;
}

std::vector<std::string> scenario_warnings(const Scenario& s) {
  std::vector<std::string> w;
  if (s.m >= 2 && s.m <= 4 && s.lambda >= 0.0 && !ModelConstants::create(s.m, s.lambda).in_theory())
    w.push_back("lambda lies outside [0, lambda0]; results are outside the range covered by the theory");
  return w;
}

Scenario parse_config_text(const std::string& text, const std::string& source, const ParseOptions& opt) {
  Scenario s;
  std::vector<ConfigIssue> issues;
  std::set<std::string> known_sections(section_order().begin(), section_order().end());
  std::set<std::string> seen_sections;
  std::map<std::pair<std::string, std::string>, std::size_t> seen_keys;
  std::string section;
  bool section_ok = false;

  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t col = first + 1;
    const std::string body = trim(line);

    if (body.front() == '[') {
      if (body.back() != ']') {
        issues.push_back({lineno, col, "unterminated section header"});
        section_ok = false;
        continue;
      }
      section = trim(body.substr(1, body.size() - 2));
      if (!known_sections.count(section)) {
        issues.push_back({lineno, col + 1, "unknown section [" + section + "]"});
        section_ok = false;
      } else if (!seen_sections.insert(section).second) {
        issues.push_back({lineno, col + 1, "section [" + section + "] appears more than once"});
        section_ok = false;
      } else {
        section_ok = true;
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back({lineno, col, "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      issues.push_back({lineno, col, "missing key before '='"});
      continue;
    }
    if (section.empty()) {
      issues.push_back({lineno, col, "key '" + key + "' appears before any section header"});
      continue;
    }
    if (!section_ok) continue;
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return f.section == section && f.key == key; });
    if (it == table.end()) {
      issues.push_back({lineno, col, "unknown key '" + key + "' in section [" + section + "]"});
      continue;
    }
    const auto [pos, inserted] = seen_keys.emplace(std::make_pair(section, key), lineno);
    if (!inserted) {
      issues.push_back({lineno, col,
                        "duplicate key '" + key + "' in section [" + section + "] (first set on line " +
                            std::to_string(pos->second) + ")"});
      continue;
    }
    const std::size_t vcol = line.find_first_not_of(" \t", eq + 1);
    if (std::string err = it->set(s, value); !err.empty())
      issues.push_back({lineno, (vcol == std::string::npos ? eq + 1 : vcol) + 1, key + ": " + err});
  }

  if (issues.empty())
    for (auto& msg : validate(s, opt)) issues.push_back({0, 0, std::move(msg)});
  if (!issues.empty()) throw ConfigError(source, std::move(issues));
  return s;
}

Scenario parse_config(const std::filesystem::path& path, const ParseOptions& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open configuration file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string(), opt);
}

std::string echo_config(const Scenario& s) {
  std::string out;
  for (const auto& sec : section_order()) {
    if (!out.empty()) out += "\n";
    out += "[" + sec + "]\n";
    for (const auto& f : fields())
      if (f.section == sec) out += f.key + " = " + f.get(s) + "\n";
  }
  return out;
}

std::uint64_t config_hash(const Scenario& s) {
  Scenario key = s;
  key.out_dir = Scenario{}.out_dir;
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char ch : echo_config(key)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace solitonlab
