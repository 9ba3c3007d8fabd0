#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ppme/config.hpp"
#include "ppme/csv.hpp"
#include "ppme/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

void print_outcomes(const ppme::ExperimentResult& result) {
  for (const auto& o : result.outcomes) {
    std::cout << ppme::method_name(o.method) << ": " << (o.ok ? "ok" : "FAILED") << " ("
              << o.seconds << " s)";
    if (!o.ok) std::cout << " " << o.error;
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Markovian three-level dynamics: QSD, master equations and pseudomode reference"};
  app.set_version_flag("--version", std::string(ppme::version()));

  std::string config_path, preset, out_dir, methods;
  std::uint64_t seed = 0;
  std::size_t trajectories = 0, workers = 0;
  double dt = 0.0, t_end = 0.0;
  bool help_config = false;

  app.add_option("--config", config_path, "Config file (section.key = value)")->check(CLI::ExistingFile);
  app.add_option("--preset", preset, "fig1 | fig2 | fig3 | custom");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (u64)");
  app.add_option("--out", out_dir, "Output directory");
  auto* traj_opt = app.add_option("--trajectories", trajectories, "Number of QSD trajectories");
  auto* dt_opt = app.add_option("--dt", dt, "Integration step");
  auto* tend_opt = app.add_option("--t-end", t_end, "Time horizon");
  app.add_option("--methods", methods, "Comma-separated subset of qsd,pp_me,npp_me,reference");
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads");
  app.add_flag("--help-config", help_config, "List accepted config keys and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (help_config) {
    std::cout << ppme::config_reference();
    return 0;
  }

  ppme::RawConfig raw;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    std::stringstream text;
    text << in.rdbuf();
    auto parsed = ppme::parse_config_text(text.str(), raw);
    if (!parsed.issues.empty()) {
      for (const auto& i : parsed.issues) std::cerr << config_path << ": " << ppme::format_issue(i) << "\n";
      return kConfigError;
    }
  } else if (preset.empty()) {
    std::cerr << "error: give --config PATH or --preset NAME\n";
    return kConfigError;
  }

  // Flags override file entries.
  if (!preset.empty()) raw.set("experiment.preset", preset);
  if (*seed_opt) raw.set("run.seed", std::to_string(seed));
  if (!out_dir.empty()) raw.set("run.output_dir", out_dir);
  if (*traj_opt) raw.set("run.trajectories", std::to_string(trajectories));
  if (*dt_opt) raw.set("grid.dt", ppme::format_double(dt));
  if (*tend_opt) raw.set("grid.t_end", ppme::format_double(t_end));
  if (!methods.empty()) raw.set("run.methods", methods);
  if (*workers_opt) raw.set("run.workers", std::to_string(workers));

  auto built = ppme::build_config(raw);
  if (!built.ok()) {
    for (const auto& i : built.issues) std::cerr << "config error: " << ppme::format_issue(i) << "\n";
    return kConfigError;
  }

  try {
    const auto result = ppme::run_experiment(*built.config);
    print_outcomes(result);
    std::cout << "output: " << built.config->output_dir << "\n";
    return result.all_ok() ? 0 : kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
