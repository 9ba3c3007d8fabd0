#pragma once

#include <iosfwd>
#include <vector>

#include "ppme/model.hpp"

namespace ppme {

struct CoefficientSample {
  Complex F2;
  Complex G2;
  Complex Ptilde2;
  Complex Pfstar;
};

/// Time series of the memory-kernel coefficients entering the trajectory
/// equation and both master equations. All four vanish at t = 0.
struct CoefficientPath {
  TimeGrid grid;
  std::vector<Complex> F2;
  std::vector<Complex> G2;
  std::vector<Complex> Ptilde2;
  std::vector<Complex> Pfstar;

  CoefficientSample at(std::size_t k) const { return {F2[k], G2[k], Ptilde2[k], Pfstar[k]}; }
};

/// Fixed-step RK4 for the closed coefficient system of the OU bath
/// (k = i omega - gamma - i Omega):
///   F2'     = a gamma + (k + 2 G2) F2
///   G2'     = -2 F2^2 + (k + 6 F2 - 2 G2) G2
///   Ptilde2'= a gamma G2 + (2k + 2 F2) Ptilde2
///   Pfstar' = (k + 2 F2 + 2 conj(G2)) Pfstar + Ptilde2 + G2 conj(F2)
/// from zero initial data. Throws NonFiniteError when any |coefficient|
/// exceeds kOverflowGuard, which marks parameters outside the range where the
/// truncated O-operator is usable.
CoefficientPath integrate_coefficients(const SystemSpec& system, const BathSpec& bath,
                                       const TimeGrid& grid);

/// Coefficients on grid.refined(2), the layout the RK4 propagators consume so
/// that half-step stages read exact samples instead of interpolants.
CoefficientPath coefficients_for_propagation(const SystemSpec& system, const BathSpec& bath,
                                             const TimeGrid& grid);

/// Checks that `coeffs` lives on grid.refined(2); throws std::invalid_argument
/// otherwise.
void require_half_step_layout(const CoefficientPath& coeffs, const TimeGrid& grid);

/// Columns: t, then Re/Im of F2, G2, Ptilde2, Pfstar.
void write_coefficients_csv(std::ostream& out, const CoefficientPath& path);

}  // namespace ppme
