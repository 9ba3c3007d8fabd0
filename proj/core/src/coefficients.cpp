#include "ppme/coefficients.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ppme/csv.hpp"

namespace ppme {

namespace {

using State = std::array<Complex, 4>;

State rhs(const State& y, Complex k, double source) {
  const Complex F = y[0], G = y[1], P = y[2], Q = y[3];
  return {
      source + (k + 2.0 * G) * F,
      -2.0 * F * F + (k + 6.0 * F - 2.0 * G) * G,
      source * G + (2.0 * k + 2.0 * F) * P,
      (k + 2.0 * F + 2.0 * std::conj(G)) * Q + P + G * std::conj(F),
  };
}

State axpy(const State& y, double h, const State& d) {
  return {y[0] + h * d[0], y[1] + h * d[1], y[2] + h * d[2], y[3] + h * d[3]};
}

bool guarded(const State& y) {
  for (const auto& z : y) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kOverflowGuard) {
      return false;
    }
  }
  return true;
}

}  // namespace

CoefficientPath integrate_coefficients(const SystemSpec& system, const BathSpec& bath,
                                       const TimeGrid& grid) {
  system.validate();
  bath.validate();
  const Complex k = kI * system.omega - bath.gamma - kI * bath.center_frequency;
  const double source = bath.a * bath.gamma;
  const double h = grid.dt();

  CoefficientPath path;
  path.grid = grid;
  const std::size_t n = grid.size();
  path.F2.resize(n);
  path.G2.resize(n);
  path.Ptilde2.resize(n);
  path.Pfstar.resize(n);

  State y{};
  for (std::size_t step = 0;; ++step) {
    path.F2[step] = y[0];
    path.G2[step] = y[1];
    path.Ptilde2[step] = y[2];
    path.Pfstar[step] = y[3];
    if (step == grid.n_steps()) break;
    const State k1 = rhs(y, k, source);
    const State k2 = rhs(axpy(y, 0.5 * h, k1), k, source);
    const State k3 = rhs(axpy(y, 0.5 * h, k2), k, source);
    const State k4 = rhs(axpy(y, h, k3), k, source);
    for (int c = 0; c < 4; ++c) y[c] += (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    if (!guarded(y)) {
      throw NonFiniteError("integrate_coefficients: coefficient blow-up", grid.time(step + 1));
    }
  }
  return path;
}

CoefficientPath coefficients_for_propagation(const SystemSpec& system, const BathSpec& bath,
                                             const TimeGrid& grid) {
  return integrate_coefficients(system, bath, grid.refined(2));
}

void require_half_step_layout(const CoefficientPath& coeffs, const TimeGrid& grid) {
  const auto& c = coeffs.grid;
  if (c.n_steps() != 2 * grid.n_steps() || std::abs(2.0 * c.dt() - grid.dt()) > 1e-12 * grid.dt()) {
    throw std::invalid_argument(
        "coefficient path must be sampled on the propagation grid refined by 2 "
        "(see coefficients_for_propagation)");
  }
}

void write_coefficients_csv(std::ostream& out, const CoefficientPath& path) {
  CsvWriter csv(out);
  csv.header({"t", "re_F2", "im_F2", "re_G2", "im_G2", "re_Ptilde2", "im_Ptilde2", "re_Pfstar",
              "im_Pfstar"});
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    csv.row({path.grid.time(k), path.F2[k].real(), path.F2[k].imag(), path.G2[k].real(),
             path.G2[k].imag(), path.Ptilde2[k].real(), path.Ptilde2[k].imag(),
             path.Pfstar[k].real(), path.Pfstar[k].imag()});
  }
}

}  // namespace ppme
