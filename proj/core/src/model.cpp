#include "ppme/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppme {

ThreeLevelOps three_level_ops() {
  const double r2 = std::sqrt(2.0);
  ThreeLevelOps ops{
      ComplexMatrix{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, -1.0}},
      ComplexMatrix{{0.0, r2, 0.0}, {0.0, 0.0, r2}, {0.0, 0.0, 0.0}},
      ComplexMatrix{{0.0, 0.0, 0.0}, {r2, 0.0, 0.0}, {0.0, r2, 0.0}},
  };
  return ops;
}

Vec3 basis_state(int level) {
  if (level < 0 || level > 2) throw std::out_of_range("basis_state: level must be 0, 1 or 2");
  Vec3 v{};
  v[level_row(level)] = 1.0;
  return v;
}

SystemSpec SystemSpec::three_level(double omega) {
  const auto ops = three_level_ops();
  SystemSpec s;
  s.omega = omega;
  s.dim = kLevels;
  s.hamiltonian = omega * ops.jz;
  s.lindblad = ops.jminus;
  s.validate();
  return s;
}

void SystemSpec::validate() const {
  if (!std::isfinite(omega)) throw InvalidParameterError("system.omega must be finite");
  if (hamiltonian.dim() != dim || lindblad.dim() != dim) {
    throw InvalidParameterError("system: operator dimensions do not match dim");
  }
  if (hermiticity_residual(hamiltonian) > kHermitianTolerance) {
    throw InvalidParameterError("system: hamiltonian is not Hermitian");
  }
}

void BathSpec::validate() const {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw InvalidParameterError("bath.a must be >= 0 (dimensionless coupling amplitude)");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidParameterError("bath.gamma must be > 0 (inverse memory time, 1/time)");
  }
  if (!std::isfinite(center_frequency)) {
    throw InvalidParameterError("bath.Omega must be finite (central frequency, 1/time)");
  }
}

Complex BathSpec::correlation(double t, double s) const {
  const double tau = t - s;
  return a * gamma * std::exp(-gamma * std::abs(tau)) * std::exp(-kI * center_frequency * tau);
}

TimeGrid::TimeGrid(double t_end, double dt) : dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameterError("grid.dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw InvalidParameterError("grid.t_end must be >= 0");
  }
  const double steps = std::round(t_end / dt);
  if (std::abs(steps * dt - t_end) > 1e-9 * std::max(1.0, t_end)) {
    throw InvalidParameterError("grid: t_end must be an integer multiple of dt");
  }
  n_steps_ = static_cast<std::size_t>(steps);
}

TimeGrid TimeGrid::from_steps(std::size_t n_steps, double dt) {
  TimeGrid g;
  if (!(dt > 0.0)) throw InvalidParameterError("grid.dt must be > 0");
  g.dt_ = dt;
  g.n_steps_ = n_steps;
  return g;
}

TimeGrid TimeGrid::refined(std::size_t factor) const {
  if (factor == 0) throw InvalidParameterError("refined: factor must be positive");
  return from_steps(n_steps_ * factor, dt_ / static_cast<double>(factor));
}

std::size_t TimeGrid::index_of(double t) const {
  const double k = std::round(t / dt_);
  if (k < 0.0 || k > static_cast<double>(n_steps_) || std::abs(k * dt_ - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw std::out_of_range("time " + std::to_string(t) + " is not a point of the grid");
  }
  return static_cast<std::size_t>(k);
}

TimeGrid TimeGrid::truncated(std::size_t k) const {
  if (k > n_steps_) throw std::out_of_range("truncated: index beyond grid");
  return from_steps(k, dt_);
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  const double tol = kHermitianTolerance * std::max(1.0, m_.max_abs());
  if (hermiticity_residual(m_) > tol) {
    throw NotHermitianError("DensityMatrix: matrix is not Hermitian");
  }
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
  ComplexMatrix m(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]);
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::excited_level(int level) {
  const Vec3 v = basis_state(level);
  return pure(v);
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(ComplexMatrix::identity(dim) * Complex(1.0 / static_cast<double>(dim)));
}

double DensityMatrix::population(int level) const {
  const auto r = level_row(level);
  return m_(r, r).real();
}

Complex DensityMatrix::element(int row_level, int col_level) const {
  return m_(level_row(row_level), level_row(col_level));
}

double min_eigenvalue(const DensityMatrix& rho) {
  // The constructor already checked Hermiticity relative to the entry scale;
  // rescale so the absolute solver tolerance applies to diverging paths too.
  const double scale = std::max(1.0, rho.matrix().max_abs());
  return scale * hermitian_eigenvalues(rho.matrix() * Complex(1.0 / scale)).front();
}

}  // namespace ppme
