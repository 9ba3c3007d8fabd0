#pragma once

#include <optional>
#include <vector>

#include "ppme/coefficients.hpp"
#include "ppme/density_path.hpp"
#include "ppme/model.hpp"

namespace ppme {

/// Positivity-preserving master equation
///   d/dt rho = -i[H_S, rho]
///              + { [(F2 J_- + G2 J_z J_-) rho, J_+] + Pfstar J_-^2 rho J_+^2 } + H.c.
/// integrated with RK4. The generator is evaluated as Y + Y^dagger, so every
/// state is exactly Hermitian. `coeffs` must be on grid.refined(2).
/// rho0 must have unit trace and no negative eigenvalues. Throws
/// NonFiniteError if any entry exceeds kOverflowGuard.
DensityPath integrate_pp_me(const SystemSpec& system, const CoefficientPath& coeffs,
                            const DensityMatrix& rho0, const TimeGrid& grid);

/// The same equation without the Pfstar term. Positivity is not guaranteed
/// and the solution can diverge; when an entry exceeds kOverflowGuard the
/// path is cut and flagged via `truncated` instead of throwing.
DensityPath integrate_npp_me(const SystemSpec& system, const CoefficientPath& coeffs,
                             const DensityMatrix& rho0, const TimeGrid& grid);

inline constexpr double kNegativityReportThreshold = 1e-6;
inline constexpr double kNegativityAcceptanceThreshold = 1e-2;

struct PositivityReport {
  std::vector<double> min_eigenvalue;
  std::vector<double> trace;
  std::vector<double> hermiticity_residual;
  double threshold = kNegativityReportThreshold;
  /// First grid time with min eigenvalue < -threshold.
  std::optional<double> first_negativity_time;
  double lowest_eigenvalue = 0.0;
  double max_hermiticity_residual = 0.0;
  double max_trace_drift = 0.0;
  bool truncated = false;
  std::optional<double> truncation_time;
};

PositivityReport positivity_report(const DensityPath& path,
                                   double threshold = kNegativityReportThreshold);

}  // namespace ppme
