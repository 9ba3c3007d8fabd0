#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ppme/model.hpp"

namespace ppme {

/// Time series of reduced density matrices with per-time diagnostics.
///
/// `states.size()` may be shorter than `grid.size()` when a divergent run was
/// cut by the overflow guard; `truncated` and `truncation_time` record that.
struct DensityPath {
  TimeGrid grid;
  std::vector<DensityMatrix> states;
  std::vector<double> trace;
  std::vector<double> hermiticity_residual;
  std::vector<double> min_eigenvalue;
  bool truncated = false;
  std::optional<double> truncation_time;

  std::size_t size() const { return states.size(); }
  double time(std::size_t k) const { return grid.time(k); }

  /// Appends a state and its diagnostics.
  void push_back(DensityMatrix rho);
};

/// Optional extra columns appended after the standard ones.
struct ExtraColumn {
  std::string name;
  std::vector<double> values;
};

/// Columns: t, rho00, rho11, rho22 (ladder levels, 0 = ground), Re/Im of
/// rho01, rho02, rho12, trace, min_eig, then normalized populations
/// n00, n11, n22 and any extras.
void write_density_csv(std::ostream& out, const DensityPath& path,
                       const std::vector<ExtraColumn>& extras = {});

}  // namespace ppme
