#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "ppme/matrix.hpp"

namespace ppme {

/// Raised when a propagated quantity becomes non-finite or exceeds the
/// overflow guard.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, double time)
      : std::runtime_error(what + " at t = " + std::to_string(time)), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Raised for physically invalid parameters (negative coupling, zero memory
/// rate, malformed grids).
class InvalidParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kOverflowGuard = 1e6;

// Three-level ladder. Level n carries n excitations and has J_z = n - 1; in
// matrix form level 2 is the first row, level 0 (ground) the last.
inline constexpr std::size_t kLevels = 3;
constexpr std::size_t level_row(int level) { return static_cast<std::size_t>(2 - level); }

struct ThreeLevelOps {
  ComplexMatrix jz;
  ComplexMatrix jplus;
  ComplexMatrix jminus;
};

/// J_z = diag(1, 0, -1) and the sqrt(2)-scaled ladder operators.
ThreeLevelOps three_level_ops();

Vec3 basis_state(int level);

/// Closed system H_S = omega J_z coupled through L = J_-.
struct SystemSpec {
  double omega = 1.0;
  std::size_t dim = kLevels;
  ComplexMatrix hamiltonian;
  ComplexMatrix lindblad;

  static SystemSpec three_level(double omega);
  void validate() const;
};

/// Ornstein-Uhlenbeck bath: alpha(t,s) = a gamma exp(-gamma|t-s|) exp(-i Omega (t-s)).
struct BathSpec {
  double a = 0.0;
  double gamma = 1.0;
  double center_frequency = 0.0;

  void validate() const;
  Complex correlation(double t, double s) const;
};

/// Uniform grid t_k = k * dt, k = 0..n_steps.
class TimeGrid {
 public:
  TimeGrid() = default;
  /// n_steps = round(t_end / dt); the pair must be consistent to 1e-9 relative.
  TimeGrid(double t_end, double dt);
  static TimeGrid from_steps(std::size_t n_steps, double dt);

  double t_end() const { return static_cast<double>(n_steps_) * dt_; }
  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t size() const { return n_steps_ + 1; }
  double time(std::size_t k) const { return static_cast<double>(k) * dt_; }

  /// Grid with dt / factor over the same horizon.
  TimeGrid refined(std::size_t factor) const;
  /// Grid index of time t; throws std::out_of_range when t is off-grid.
  std::size_t index_of(double t) const;
  /// Same dt, horizon cut at index k.
  TimeGrid truncated(std::size_t k) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double dt_ = 1.0;
  std::size_t n_steps_ = 0;
};

/// Reduced density matrix. Hermitian within tolerance; positivity is a
/// diagnostic only.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix pure(std::span<const Complex> psi);
  static DensityMatrix excited_level(int level);
  static DensityMatrix maximally_mixed(std::size_t dim);

  const ComplexMatrix& matrix() const { return m_; }
  std::size_t dim() const { return m_.dim(); }
  double trace() const { return m_.trace().real(); }
  /// Diagonal element of `level` in the ladder basis.
  double population(int level) const;
  Complex element(int row_level, int col_level) const;

 private:
  ComplexMatrix m_;
};

double min_eigenvalue(const DensityMatrix& rho);

}  // namespace ppme
