#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppme/config.hpp"
#include "ppme/density_path.hpp"
#include "ppme/pseudomode.hpp"
#include "ppme/qsd.hpp"

namespace ppme {

std::string_view version();

struct MethodOutcome {
  Method method = Method::pp_me;
  bool ok = false;
  std::string error;
  std::optional<double> failure_time;
  double seconds = 0.0;
};

struct PairDeviation {
  std::string first;
  std::string second;
  double max_population = 0.0;  // over common times and all levels
  double max_ground = 0.0;      // rho00 only
};

struct ExperimentSummary {
  std::map<std::string, std::optional<double>> first_negativity;
  std::map<std::string, double> lowest_eigenvalue;
  std::map<std::string, std::optional<double>> truncation_time;
  std::vector<PairDeviation> deviations;
  /// QSD vs PP-ME, when both ran: max |delta| over times and levels, and
  /// whether every point satisfied |delta| <= 4 stderr + 1e-8.
  std::optional<double> qsd_max_deviation;
  std::optional<double> qsd_max_stderr;
  std::optional<bool> qsd_within_4_sigma;
  std::optional<TruncationCheck> reference_convergence;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<MethodOutcome> outcomes;
  std::map<Method, DensityPath> paths;
  std::optional<EnsembleResult> qsd;
  ExperimentSummary summary;
  double wall_seconds = 0.0;

  bool all_ok() const;
  const MethodOutcome* outcome(Method m) const;
};

struct RunOptions {
  bool write_files = true;
};

/// Runs every configured method; a numerical failure in one method is
/// recorded in its outcome and does not stop the others. With write_files,
/// the output directory receives <method>.csv, coefficients.csv,
/// manifest.cfg (a config reproducing the run) and summary.json.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string summary_json(const ExperimentResult& result);

}  // namespace ppme
