#include "ppme/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>

#include "json.hpp"
#include "ppme/coefficients.hpp"
#include "ppme/master_equation.hpp"

#ifndef PPME_VERSION
#define PPME_VERSION "unknown"
#endif

namespace ppme {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

PairDeviation compare(const std::string& a_name, const DensityPath& a, const std::string& b_name,
                      const DensityPath& b) {
  PairDeviation d{a_name, b_name};
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (int level = 0; level < 3; ++level) {
      const double diff = std::abs(a.states[k].population(level) - b.states[k].population(level));
      d.max_population = std::max(d.max_population, diff);
      if (level == 0) d.max_ground = std::max(d.max_ground, diff);
    }
  }
  return d;
}

nlohmann::json optional_number(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

void write_file(const std::filesystem::path& path, const auto& writer) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
}

}  // namespace

std::string_view version() { return PPME_VERSION; }

bool ExperimentResult::all_ok() const {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.ok; });
}

const MethodOutcome* ExperimentResult::outcome(Method m) const {
  for (const auto& o : outcomes)
    if (o.method == m) return &o;
  return nullptr;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = Clock::now();
  ExperimentResult result;
  result.config = config;
  const SystemSpec system = config.system();
  const BathSpec bath = config.bath();
  const TimeGrid grid = config.grid();

  std::optional<CoefficientPath> coeffs;
  std::string coeff_error;
  std::optional<double> coeff_failure;
  if (config.runs(Method::qsd) || config.runs(Method::pp_me) || config.runs(Method::npp_me)) {
    try {
      coeffs = coefficients_for_propagation(system, bath, grid);
    } catch (const NonFiniteError& e) {
      coeff_error = e.what();
      coeff_failure = e.time();
    }
  }

  for (Method m : config.methods) {
    MethodOutcome out;
    out.method = m;
    const auto t0 = Clock::now();
    try {
      if (m != Method::reference && !coeffs) throw NonFiniteError(coeff_error, coeff_failure.value_or(0.0));
      switch (m) {
        case Method::qsd: {
          EnsembleConfig ec{system, bath, grid, config.initial_psi(), config.n_trajectories,
                            config.seed, config.workers};
          result.qsd = run_ensemble(ec, *coeffs);
          result.paths[m] = result.qsd->density;
          break;
        }
        case Method::pp_me:
          result.paths[m] = integrate_pp_me(system, *coeffs, config.initial_density(), grid);
          break;
        case Method::npp_me:
          result.paths[m] = integrate_npp_me(system, *coeffs, config.initial_density(), grid);
          break;
        case Method::reference: {
          const auto rho0 = config.initial_density();
          auto coarse = std::async(std::launch::async, [&] {
            return integrate_reference(system, bath, rho0,
                                       PseudomodeConfig::from_bath(bath, config.check_fock_dim), grid);
          });
          auto fine = integrate_reference(system, bath, rho0,
                                          PseudomodeConfig::from_bath(bath, config.fock_dim), grid);
          const std::vector<DensityPath> series{coarse.get(), fine};
          result.summary.reference_convergence = check_truncation(series, config.thresholds.truncation);
          result.paths[m] = std::move(fine);
          break;
        }
      }
      out.ok = true;
    } catch (const NonFiniteError& e) {
      out.error = e.what();
      out.failure_time = e.time();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    out.seconds = seconds_since(t0);
    result.outcomes.push_back(std::move(out));
  }

  auto& s = result.summary;
  for (const auto& [m, path] : result.paths) {
    const std::string name(method_name(m));
    const auto report = positivity_report(path, config.thresholds.negativity_report);
    s.first_negativity[name] = report.first_negativity_time;
    s.lowest_eigenvalue[name] = report.lowest_eigenvalue;
    s.truncation_time[name] = report.truncation_time;
  }
  for (auto a = result.paths.begin(); a != result.paths.end(); ++a) {
    for (auto b = std::next(a); b != result.paths.end(); ++b) {
      s.deviations.push_back(compare(std::string(method_name(a->first)), a->second,
                                     std::string(method_name(b->first)), b->second));
    }
  }
  if (result.qsd && result.paths.contains(Method::pp_me)) {
    const auto& q = result.qsd->density;
    const auto& p = result.paths.at(Method::pp_me);
    double dev = 0.0, se_max = 0.0;
    bool within = true;
    for (std::size_t k = 0; k < std::min(q.size(), p.size()); ++k) {
      for (int level = 0; level < 3; ++level) {
        const double diff = std::abs(q.states[k].population(level) - p.states[k].population(level));
        const double se = result.qsd->population_stderr[k][level];
        dev = std::max(dev, diff);
        se_max = std::max(se_max, se);
        if (diff > 4.0 * se + 1e-8) within = false;
      }
    }
    s.qsd_max_deviation = dev;
    s.qsd_max_stderr = se_max;
    s.qsd_within_4_sigma = within;
  }
  result.wall_seconds = seconds_since(start);

  if (options.write_files) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    for (const auto& [m, path] : result.paths) {
      std::vector<ExtraColumn> extras;
      if (m == Method::qsd) {
        const auto& q = *result.qsd;
        const char* names[] = {"se_rho00", "se_rho11", "se_rho22"};
        for (int level = 0; level < 3; ++level) {
          ExtraColumn col{names[level], {}};
          for (const auto& se : q.population_stderr) col.values.push_back(se[level]);
          extras.push_back(std::move(col));
        }
        extras.push_back({"se_trace", q.trace_stderr});
      }
      write_file(dir / (std::string(method_name(m)) + ".csv"),
                 [&](std::ostream& out) { write_density_csv(out, path, extras); });
    }
    if (coeffs) {
      write_file(dir / "coefficients.csv", [&](std::ostream& out) { write_coefficients_csv(out, *coeffs); });
    }
    write_file(dir / "manifest.cfg", [&](std::ostream& out) {
      out << "# ppme " << version() << "\n"
          << "# wall_time_s = " << result.wall_seconds << "\n"
          << "# populations in <method>.csv are raw; n00..n22 are divided by the trace\n"
          << "# preset horizon assumption: t_end = 25/omega, dt = 0.005 unless overridden\n";
      write_config(out, config);
    });
    write_file(dir / "summary.json", [&](std::ostream& out) { out << summary_json(result) << "\n"; });
  }
  return result;
}

std::string summary_json(const ExperimentResult& result) {
  using nlohmann::json;
  const auto& s = result.summary;
  json j;
  j["version"] = std::string(version());
  j["preset"] = result.config.preset;
  j["seed"] = result.config.seed;
  j["wall_time_s"] = result.wall_seconds;
  json methods = json::object();
  for (const auto& o : result.outcomes) {
    const std::string name(method_name(o.method));
    json m;
    m["ok"] = o.ok;
    m["seconds"] = o.seconds;
    if (!o.ok) {
      m["error"] = o.error;
      m["failure_time"] = optional_number(o.failure_time);
    }
    if (s.first_negativity.contains(name)) {
      m["first_negativity_time"] = optional_number(s.first_negativity.at(name));
      m["lowest_eigenvalue"] = s.lowest_eigenvalue.at(name);
      m["truncation_time"] = optional_number(s.truncation_time.at(name));
    }
    methods[name] = m;
  }
  j["methods"] = methods;
  json devs = json::array();
  for (const auto& d : s.deviations) {
    devs.push_back({{"first", d.first},
                    {"second", d.second},
                    {"max_population_deviation", d.max_population},
                    {"max_ground_deviation", d.max_ground}});
  }
  j["deviations"] = devs;
  if (s.qsd_max_deviation) {
    j["qsd_vs_pp_me"] = {{"max_population_deviation", *s.qsd_max_deviation},
                         {"max_stderr", *s.qsd_max_stderr},
                         {"within_4_sigma", *s.qsd_within_4_sigma}};
  }
  if (s.reference_convergence) {
    j["reference_convergence"] = {
        {"fock_dims", {result.config.check_fock_dim, result.config.fock_dim}},
        {"max_population_difference", s.reference_convergence->error_estimate},
        {"converged", s.reference_convergence->converged}};
  }
  return j.dump(2);
}

}  // namespace ppme
