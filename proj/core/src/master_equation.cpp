#include "ppme/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppme {

namespace {

struct Generator {
  Mat3 minus_ih;
  Mat3 jminus, jplus, jz_jminus, jminus2, jplus2;
  bool with_pfstar;

  // Y + Y^dagger with Y = -i H rho + [X rho, J_+] + Pfstar J_-^2 rho J_+^2.
  Mat3 operator()(const Mat3& rho, const CoefficientSample& c) const {
    Mat3 x;
    for (int e = 0; e < 9; ++e) x[e] = c.F2 * jminus[e] + c.G2 * jz_jminus[e];
    const Mat3 xr = mul(x, rho);
    const Mat3 a = mul(xr, jplus);
    const Mat3 b = mul(jplus, xr);
    const Mat3 h = mul(minus_ih, rho);
    Mat3 y;
    for (int e = 0; e < 9; ++e) y[e] = h[e] + a[e] - b[e];
    if (with_pfstar) {
      const Mat3 jump = mul(mul(jminus2, rho), jplus2);
      for (int e = 0; e < 9; ++e) y[e] += c.Pfstar * jump[e];
    }
    Mat3 out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[i * 3 + j] = y[i * 3 + j] + std::conj(y[j * 3 + i]);
    return out;
  }
};

Generator make_generator(const SystemSpec& system, bool with_pfstar) {
  system.validate();
  if (system.dim != 3) throw DimensionError("master equation: three-level system required");
  const auto ops = three_level_ops();
  Generator g;
  g.minus_ih = to_mat3(Complex(0.0, -1.0) * system.hamiltonian);
  g.jminus = to_mat3(system.lindblad);
  g.jplus = to_mat3(system.lindblad.adjoint());
  g.jz_jminus = to_mat3(ops.jz * system.lindblad);
  g.jminus2 = mul(g.jminus, g.jminus);
  g.jplus2 = mul(g.jplus, g.jplus);
  g.with_pfstar = with_pfstar;
  return g;
}

bool overflowed(const Mat3& m) {
  for (const auto& z : m) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kOverflowGuard) return true;
  }
  return false;
}

DensityPath integrate(const Generator& gen, const CoefficientPath& coeffs, const DensityMatrix& rho0,
                      const TimeGrid& grid, bool throw_on_overflow) {
  require_half_step_layout(coeffs, grid);
  if (rho0.dim() != 3) throw DimensionError("master equation: rho0 must be 3x3");
  DensityPath path;
  path.grid = grid;
  path.states.reserve(grid.size());
  const double h = grid.dt();
  Mat3 rho = to_mat3(rho0.matrix());
  path.push_back(rho0);
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const auto c0 = coeffs.at(2 * k);
    const auto cm = coeffs.at(2 * k + 1);
    const auto c1 = coeffs.at(2 * k + 2);
    auto stage = [&](const Mat3& d, double s) {
      Mat3 y;
      for (int e = 0; e < 9; ++e) y[e] = rho[e] + s * d[e];
      return y;
    };
    const Mat3 k1 = gen(rho, c0);
    const Mat3 k2 = gen(stage(k1, 0.5 * h), cm);
    const Mat3 k3 = gen(stage(k2, 0.5 * h), cm);
    const Mat3 k4 = gen(stage(k3, h), c1);
    Mat3 next;
    for (int e = 0; e < 9; ++e) next[e] = rho[e] + (h / 6.0) * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e]);
    if (overflowed(next)) {
      if (throw_on_overflow) throw NonFiniteError("master equation: density matrix overflow", grid.time(k + 1));
      path.truncated = true;
      path.truncation_time = grid.time(k + 1);
      break;
    }
    rho = next;
    path.push_back(DensityMatrix(from_mat3(rho)));
  }
  return path;
}

}  // namespace

DensityPath integrate_pp_me(const SystemSpec& system, const CoefficientPath& coeffs,
                            const DensityMatrix& rho0, const TimeGrid& grid) {
  if (std::abs(rho0.trace() - 1.0) > 1e-9) throw std::invalid_argument("integrate_pp_me: rho0 must have unit trace");
  if (min_eigenvalue(rho0) < -1e-12) throw std::invalid_argument("integrate_pp_me: rho0 must be positive semidefinite");
  return integrate(make_generator(system, true), coeffs, rho0, grid, true);
}

DensityPath integrate_npp_me(const SystemSpec& system, const CoefficientPath& coeffs,
                             const DensityMatrix& rho0, const TimeGrid& grid) {
  if (std::abs(rho0.trace() - 1.0) > 1e-9) throw std::invalid_argument("integrate_npp_me: rho0 must have unit trace");
  if (min_eigenvalue(rho0) < -1e-12) throw std::invalid_argument("integrate_npp_me: rho0 must be positive semidefinite");
  return integrate(make_generator(system, false), coeffs, rho0, grid, false);
}

PositivityReport positivity_report(const DensityPath& path, double threshold) {
  PositivityReport r;
  r.threshold = threshold;
  r.min_eigenvalue = path.min_eigenvalue;
  r.trace = path.trace;
  r.hermiticity_residual = path.hermiticity_residual;
  r.truncated = path.truncated;
  r.truncation_time = path.truncation_time;
  r.lowest_eigenvalue = path.min_eigenvalue.empty()
                            ? 0.0
                            : *std::min_element(path.min_eigenvalue.begin(), path.min_eigenvalue.end());
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (!r.first_negativity_time && path.min_eigenvalue[k] < -threshold) {
      r.first_negativity_time = path.time(k);
    }
    r.max_hermiticity_residual = std::max(r.max_hermiticity_residual, path.hermiticity_residual[k]);
    r.max_trace_drift = std::max(r.max_trace_drift, std::abs(path.trace[k] - 1.0));
  }
  return r;
}

}  // namespace ppme
