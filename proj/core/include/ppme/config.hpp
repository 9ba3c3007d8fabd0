#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppme/model.hpp"

namespace ppme {

enum class Method { qsd, pp_me, npp_me, reference };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

struct Thresholds {
  double negativity_report = 1e-6;
  double negativity_acceptance = 1e-2;
  double truncation = 1e-4;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// Everything needed to reproduce one run. Physics parameters are in units
/// where omega sets the frequency scale; times are in the same units (1/omega
/// for omega = 1).
struct ExperimentConfig {
  std::string preset = "custom";  // fig1 | fig2 | fig3 | custom
  double omega = 1.0;
  double a = 0.0;
  double gamma = 1.0;
  double center_frequency = 0.0;
  std::string initial_state = "2";  // "0", "1", "2" or "mixed"
  double t_end = 25.0;
  double dt = 0.005;
  std::size_t n_trajectories = 5000;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::vector<Method> methods;
  std::size_t workers = 1;
  Thresholds thresholds;
  std::size_t fock_dim = 8;
  std::size_t check_fock_dim = 6;

  SystemSpec system() const;
  BathSpec bath() const;
  TimeGrid grid() const;
  DensityMatrix initial_density() const;
  /// Only for pure initial states.
  Vec3 initial_psi() const;
  bool runs(Method m) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ConfigIssue {
  std::size_t line = 0;  // 0 when not tied to a line
  std::string key;
  std::string message;
};

std::string format_issue(const ConfigIssue& issue);

/// Raw `section.key = value` entries, before validation.
struct RawConfig {
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };
  std::map<std::string, Entry> entries;

  /// Command-line style override; replaces any existing entry.
  void set(const std::string& key, std::string value) { entries[key] = {std::move(value), 0}; }
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigIssue> issues;
  bool ok() const { return config.has_value(); }
};

/// Grammar: one `section.key = value` per line, `#` starts a comment,
/// blank lines ignored. Duplicate keys and malformed lines are issues.
ConfigResult parse_config_text(std::string_view text, RawConfig& raw);

/// Applies a preset (if any), then every entry. Unknown keys, bad values and
/// physics overrides that contradict a preset are all reported together.
ConfigResult build_config(const RawConfig& raw);

/// parse_config_text followed by build_config.
ConfigResult validate_config(std::string_view text);

/// Preset with no overrides. Throws InvalidParameterError for unknown names.
ExperimentConfig preset_config(std::string_view name);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Writes a config file that validate_config maps back to `config`.
void write_config(std::ostream& out, const ExperimentConfig& config);

/// Documentation of every accepted key, one per line.
std::string config_reference();

}  // namespace ppme
