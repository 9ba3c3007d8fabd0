#include "ppme/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "ppme/csv.hpp"

namespace ppme {

namespace {

constexpr std::string_view kMethodNames[] = {"qsd", "pp_me", "npp_me", "reference"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

using Setter = std::function<std::optional<std::string>(ExperimentConfig&, std::string_view)>;

struct KeySpec {
  std::string_view key;
  std::string_view doc;
  bool physics;
  Setter set;
};

Setter real(double ExperimentConfig::*field, std::function<bool(double)> ok, std::string constraint) {
  return [=](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    auto x = to_double(v);
    if (!x) return "expected a finite real number, got '" + std::string(v) + "'";
    if (!ok(*x)) return constraint + ", got " + std::string(v);
    c.*field = *x;
    return std::nullopt;
  };
}

Setter count(std::size_t ExperimentConfig::*field, std::size_t min, std::string constraint) {
  return [=](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    auto x = to_u64(v);
    if (!x) return "expected a non-negative integer, got '" + std::string(v) + "'";
    if (*x < min) return constraint + ", got " + std::string(v);
    c.*field = static_cast<std::size_t>(*x);
    return std::nullopt;
  };
}

Setter threshold(double Thresholds::*field) {
  return [=](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
    auto x = to_double(v);
    if (!x || *x <= 0.0) return "must be a positive real number, got '" + std::string(v) + "'";
    c.thresholds.*field = *x;
    return std::nullopt;
  };
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"experiment.preset", "fig1 | fig2 | fig3 | custom", false,
       [](ExperimentConfig&, std::string_view) -> std::optional<std::string> { return std::nullopt; }},
      {"system.omega", "level spacing omega (frequency units; sets the scale)", true,
       real(&ExperimentConfig::omega, [](double x) { return x > 0.0; }, "must be > 0")},
      {"bath.a", "coupling strength a (dimensionless, alpha = a gamma e^{-gamma tau})", true,
       real(&ExperimentConfig::a, [](double x) { return x >= 0.0; }, "must be >= 0")},
      {"bath.gamma", "memory decay rate gamma (frequency units, 1/memory time)", true,
       real(&ExperimentConfig::gamma, [](double x) { return x > 0.0; }, "must be > 0")},
      {"bath.Omega", "bath center frequency Omega (frequency units)", true,
       real(&ExperimentConfig::center_frequency, [](double) { return true; }, "")},
      {"state.initial", "initial level 0 | 1 | 2 or 'mixed' (identity/3)", false,
       [](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
         if (v != "0" && v != "1" && v != "2" && v != "mixed")
           return "must be 0, 1, 2 or mixed, got '" + std::string(v) + "'";
         c.initial_state = std::string(v);
         return std::nullopt;
       }},
      {"grid.t_end", "time horizon (time units, 1/omega)", false,
       real(&ExperimentConfig::t_end, [](double x) { return x > 0.0; }, "must be > 0")},
      {"grid.dt", "integration step (time units, 1/omega); t_end/dt must be an integer", false,
       real(&ExperimentConfig::dt, [](double x) { return x > 0.0; }, "must be > 0")},
      {"run.trajectories", "number of QSD trajectories (count, >= 2)", false,
       count(&ExperimentConfig::n_trajectories, 2, "must be >= 2")},
      {"run.seed", "master seed (unsigned 64-bit integer)", false,
       [](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
         auto x = to_u64(v);
         if (!x) return "expected an unsigned 64-bit integer, got '" + std::string(v) + "'";
         c.seed = *x;
         return std::nullopt;
       }},
      {"run.output_dir", "output directory (path)", false,
       [](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
         if (v.empty()) return "must not be empty";
         c.output_dir = std::string(v);
         return std::nullopt;
       }},
      {"run.methods", "comma-separated subset of qsd, pp_me, npp_me, reference", false,
       [](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
         std::vector<Method> out;
         std::size_t pos = 0;
         while (pos <= v.size()) {
           auto next = v.find(',', pos);
           if (next == std::string_view::npos) next = v.size();
           auto name = trim(v.substr(pos, next - pos));
           pos = next + 1;
           if (name.empty()) continue;
           auto m = parse_method(name);
           if (!m) return "unknown method '" + std::string(name) + "' (expected qsd, pp_me, npp_me, reference)";
           if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
         }
         if (out.empty()) return "must list at least one method";
         std::sort(out.begin(), out.end());
         c.methods = std::move(out);
         return std::nullopt;
       }},
      {"run.workers", "worker threads (count, >= 1); results do not depend on it", false,
       count(&ExperimentConfig::workers, 1, "must be >= 1")},
      {"thresholds.negativity_report", "eigenvalue below -x counts as negative (reporting)", false,
       threshold(&Thresholds::negativity_report)},
      {"thresholds.negativity_acceptance", "eigenvalue below -x counts as visible negativity", false,
       threshold(&Thresholds::negativity_acceptance)},
      {"thresholds.truncation", "max population change for a converged Fock truncation", false,
       threshold(&Thresholds::truncation)},
      {"reference.fock_dim", "pseudomode Fock truncation (count, >= 3)", false,
       count(&ExperimentConfig::fock_dim, 3, "must be >= 3")},
      {"reference.check_fock_dim", "smaller truncation for the convergence check (count, >= 2)", false,
       count(&ExperimentConfig::check_fock_dim, 2, "must be >= 2")},
  };
  return table;
}

const KeySpec* find_key(std::string_view key) {
  for (const auto& k : key_table())
    if (k.key == key) return &k;
  return nullptr;
}

}  // namespace

std::string_view method_name(Method m) { return kMethodNames[static_cast<int>(m)]; }

std::optional<Method> parse_method(std::string_view name) {
  for (int i = 0; i < 4; ++i)
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  return std::nullopt;
}

SystemSpec ExperimentConfig::system() const { return SystemSpec::three_level(omega); }

BathSpec ExperimentConfig::bath() const { return BathSpec{a, gamma, center_frequency}; }

TimeGrid ExperimentConfig::grid() const { return TimeGrid(t_end, dt); }

DensityMatrix ExperimentConfig::initial_density() const {
  if (initial_state == "mixed") return DensityMatrix::maximally_mixed(kLevels);
  return DensityMatrix::excited_level(initial_state.at(0) - '0');
}

Vec3 ExperimentConfig::initial_psi() const {
  if (initial_state == "mixed") throw InvalidParameterError("state.initial: mixed state has no trajectory form");
  return basis_state(initial_state.at(0) - '0');
}

bool ExperimentConfig::runs(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::string format_issue(const ConfigIssue& issue) {
  std::string out;
  if (issue.line > 0) out += "line " + std::to_string(issue.line) + ": ";
  if (!issue.key.empty()) out += issue.key + ": ";
  return out + issue.message;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration";
        for (const auto& i : issues) msg += "\n  " + format_issue(i);
        return msg;
      }()),
      issues_(std::move(issues)) {}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig c;
  c.preset = std::string(name);
  c.omega = 1.0;
  c.center_frequency = 0.0;
  c.t_end = 25.0 / c.omega;
  c.dt = 0.005;
  c.n_trajectories = 5000;
  if (name == "fig1" || name == "fig2") {
    c.a = 0.8;
    c.gamma = 0.05;
    c.methods = name == "fig1" ? std::vector{Method::qsd, Method::pp_me}
                               : std::vector{Method::pp_me, Method::npp_me};
  } else if (name == "fig3") {
    c.a = 0.2;
    c.gamma = 0.2;
    c.methods = {Method::pp_me, Method::npp_me, Method::reference};
  } else {
    throw InvalidParameterError("experiment.preset: unknown preset '" + std::string(name) +
                                "' (expected fig1, fig2, fig3 or custom)");
  }
  return c;
}

ConfigResult parse_config_text(std::string_view text, RawConfig& raw) {
  ConfigResult result;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      result.issues.push_back({line_no, "", "expected 'section.key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.find('.') == std::string::npos) {
      result.issues.push_back({line_no, key, "keys have the form section.key"});
      continue;
    }
    if (auto it = raw.entries.find(key); it != raw.entries.end()) {
      result.issues.push_back({line_no, key, "duplicate key (first set on line " +
                                                 std::to_string(it->second.line) + ")"});
      continue;
    }
    raw.entries[key] = {value, line_no};
  }
  return result;
}

ConfigResult build_config(const RawConfig& raw) {
  ConfigResult result;
  auto issue = [&](std::size_t line, std::string key, std::string msg) {
    result.issues.push_back({line, std::move(key), std::move(msg)});
  };

  std::string preset = "custom";
  if (auto it = raw.entries.find("experiment.preset"); it != raw.entries.end()) preset = it->second.value;

  ExperimentConfig cfg;
  ExperimentConfig fixed;
  const bool is_preset = preset != "custom";
  if (is_preset) {
    try {
      cfg = preset_config(preset);
      fixed = cfg;
    } catch (const InvalidParameterError&) {
      issue(raw.entries.at("experiment.preset").line, "experiment.preset",
            "unknown preset '" + preset + "' (expected fig1, fig2, fig3 or custom)");
      return result;
    }
  }

  for (const auto& [key, entry] : raw.entries) {
    const KeySpec* spec = find_key(key);
    if (!spec) {
      issue(entry.line, key, "unknown key (see `ppme --help-config` for accepted keys)");
      continue;
    }
    if (auto err = spec->set(cfg, entry.value)) {
      issue(entry.line, key, *err + " [" + std::string(spec->doc) + "]");
    }
  }

  if (is_preset) {
    const std::pair<const char*, double ExperimentConfig::*> physics[] = {
        {"system.omega", &ExperimentConfig::omega},
        {"bath.a", &ExperimentConfig::a},
        {"bath.gamma", &ExperimentConfig::gamma},
        {"bath.Omega", &ExperimentConfig::center_frequency}};
    for (auto [key, field] : physics) {
      if (cfg.*field != fixed.*field) {
        issue(raw.entries.at(key).line, key,
              "fixed at " + format_double(fixed.*field) + " by preset " + preset +
                  "; use experiment.preset = custom to change physics");
      }
    }
  } else {
    for (const char* key : {"system.omega", "bath.a", "bath.gamma", "bath.Omega", "grid.t_end",
                            "grid.dt", "run.methods"}) {
      if (!raw.entries.contains(key)) issue(0, key, "required when experiment.preset = custom");
    }
  }

  if (result.issues.empty()) {
    try {
      (void)cfg.grid();
    } catch (const std::exception& e) {
      issue(0, "grid.dt", std::string(e.what()) + " [t_end/dt must be an integer step count]");
    }
    if (cfg.check_fock_dim >= cfg.fock_dim) {
      issue(0, "reference.check_fock_dim", "must be smaller than reference.fock_dim");
    }
    if (cfg.runs(Method::qsd) && cfg.initial_state == "mixed") {
      issue(0, "state.initial", "method qsd needs a pure initial state (0, 1 or 2)");
    }
  }

  if (result.issues.empty()) result.config = std::move(cfg);
  return result;
}

ConfigResult validate_config(std::string_view text) {
  RawConfig raw;
  auto parsed = parse_config_text(text, raw);
  auto built = build_config(raw);
  parsed.issues.insert(parsed.issues.end(), built.issues.begin(), built.issues.end());
  if (parsed.issues.empty()) parsed.config = std::move(built.config);
  return parsed;
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  std::string methods;
  for (auto m : c.methods) {
    if (!methods.empty()) methods += ", ";
    methods += method_name(m);
  }
  out << "experiment.preset = " << c.preset << "\n"
      << "system.omega = " << format_double(c.omega) << "\n"
      << "bath.a = " << format_double(c.a) << "\n"
      << "bath.gamma = " << format_double(c.gamma) << "\n"
      << "bath.Omega = " << format_double(c.center_frequency) << "\n"
      << "state.initial = " << c.initial_state << "\n"
      << "grid.t_end = " << format_double(c.t_end) << "\n"
      << "grid.dt = " << format_double(c.dt) << "\n"
      << "run.trajectories = " << c.n_trajectories << "\n"
      << "run.seed = " << c.seed << "\n"
      << "run.output_dir = " << c.output_dir << "\n"
      << "run.methods = " << methods << "\n"
      << "run.workers = " << c.workers << "\n"
      << "thresholds.negativity_report = " << format_double(c.thresholds.negativity_report) << "\n"
      << "thresholds.negativity_acceptance = " << format_double(c.thresholds.negativity_acceptance)
      << "\n"
      << "thresholds.truncation = " << format_double(c.thresholds.truncation) << "\n"
      << "reference.fock_dim = " << c.fock_dim << "\n"
      << "reference.check_fock_dim = " << c.check_fock_dim << "\n";
}

std::string config_reference() {
  std::ostringstream out;
  out << "# section.key = value, '#' starts a comment\n";
  for (const auto& k : key_table()) out << k.key << "\t" << k.doc << "\n";
  return out.str();
}

}  // namespace ppme
