#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ppme/density_path.hpp"
#include "ppme/model.hpp"

namespace ppme {

/// One damped bosonic mode standing in for the OU bath. With coupling
/// lambda = sqrt(a gamma), frequency Omega and Lindblad operator
/// sqrt(2 gamma) b, the vacuum two-time function of the mode satisfies
/// lambda^2 <b(t) b^dagger(s)> = alpha(t, s).
struct PseudomodeConfig {
  std::size_t fock_dim = 8;
  double coupling = 0.0;
  double frequency = 0.0;
  double decay = 1.0;

  static PseudomodeConfig from_bath(const BathSpec& bath, std::size_t fock_dim = 8);
  void validate() const;
};

/// Lindblad evolution of rho0 (x) |0><0| on the joint space with
///   H = H_S + Omega b^dagger b + lambda (J_+ b + b^dagger J_-),
/// traced over the mode at every grid point.
DensityPath integrate_reference(const SystemSpec& system, const BathSpec& bath,
                                const DensityMatrix& rho0, const PseudomodeConfig& cfg,
                                const TimeGrid& grid);

/// <b(tau) b^dagger(0)> of the uncoupled mode from the vacuum, via the
/// quantum regression theorem with the same generator, at every grid time.
std::vector<Complex> mode_correlation(const PseudomodeConfig& cfg, const TimeGrid& grid);

struct TruncationCheck {
  bool converged = false;
  /// Max over time and level of |pop_{i+1} - pop_i| for successive paths.
  std::vector<double> successive_differences;
  /// Difference between the two largest truncations.
  double error_estimate = 0.0;
};

inline constexpr double kTruncationTolerance = 1e-4;

/// Paths must be ordered by increasing fock_dim and share one grid.
TruncationCheck check_truncation(std::span<const DensityPath> paths,
                                 double tolerance = kTruncationTolerance);

}  // namespace ppme
