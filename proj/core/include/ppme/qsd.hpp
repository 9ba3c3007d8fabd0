#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ppme/coefficients.hpp"
#include "ppme/density_path.hpp"
#include "ppme/kernel_grid.hpp"
#include "ppme/model.hpp"
#include "ppme/noise.hpp"

namespace ppme {

/// Unnormalized linear-QSD trajectory |psi(t_k)>.
struct TrajectoryPath {
  TimeGrid grid;
  std::vector<Vec3> states;
  std::uint64_t seed = 0;
};

/// RK4 integrator for the approximated linear QSD equation
///   d/dt |psi> = (-i H_S + z*_t J_- - J_+ Obar0(t)) |psi>,
///   Obar0(t) = F2(t) J_- + G2(t) J_z J_-.
/// The drift matrices are precomputed once per coefficient path and shared
/// read-only between trajectories. z*_t is taken linear between grid points.
class TrajectoryPropagator {
 public:
  /// `coeffs` must be laid out on grid.refined(2).
  TrajectoryPropagator(const SystemSpec& system, const CoefficientPath& coeffs, const TimeGrid& grid);

  const TimeGrid& grid() const { return grid_; }

  /// Calls visit(k, psi_k) for k = 0..last_index. Throws NonFiniteError when
  /// the amplitudes overflow.
  void run(const NoisePath& noise, const Vec3& psi0, std::size_t last_index,
           const std::function<void(std::size_t, const Vec3&)>& visit) const;

 private:
  TimeGrid grid_;
  std::vector<Mat3> drift_;  // -i H - J_+ Obar0 at each half step
  Mat3 lindblad_;
};

/// Full stored trajectory; noise and coeffs must share `grid` (coeffs via the
/// half-step layout). psi0 must be normalized.
TrajectoryPath propagate_trajectory(const SystemSpec& system, const CoefficientPath& coeffs,
                                    const NoisePath& noise, const Vec3& psi0, const TimeGrid& grid);

/// Monte-Carlo average M(|psi><psi|) with per-time standard errors.
struct EnsembleResult {
  DensityPath density;
  std::size_t n_trajectories = 0;
  /// population_stderr[k][level].
  std::vector<std::array<double, 3>> population_stderr;
  /// Standard error of the mean squared norm (the trace).
  std::vector<double> trace_stderr;
};

/// Averages stored trajectories with the fixed-order reduction (sort by seed,
/// sequential within leaf chunks, pairwise tree across chunks). Permuting the
/// input yields a bitwise-identical result.
EnsembleResult ensemble_density(std::span<const TrajectoryPath> trajectories);

struct EnsembleConfig {
  SystemSpec system;
  BathSpec bath;
  TimeGrid grid;
  Vec3 psi0 = basis_state(2);
  std::size_t n_trajectories = 0;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
};

/// Seeds of trajectories 0..n-1 under `master_seed`.
std::vector<std::uint64_t> ensemble_seeds(std::uint64_t master_seed, std::size_t n);

/// Generates and averages n_trajectories without storing them. Output is
/// bitwise identical to ensemble_density over the same trajectories and does
/// not depend on `workers`.
EnsembleResult run_ensemble(const EnsembleConfig& config, const CoefficientPath& coeffs);

/// Monte-Carlo check of the revised Novikov identity at time t:
///   lhs  = M(z*_t P),  P = |psi><psi|
///   rhs  = M(P Obar_d^dagger),
///   Obar_d(t) = F2 J_- + G2 J_z J_- + (int_0^t ds' P2(t,s') z*_{s'}) J_-^2,
/// alongside the same estimator with the noise-free Obar0 in place of Obar_d.
/// Residuals are paired per trajectory so the O_d/O0 offset carries its own
/// (small) standard error.
struct NovikovReport {
  double t = 0.0;
  std::size_t n_trajectories = 0;
  ComplexMatrix lhs;
  ComplexMatrix rhs_od;
  ComplexMatrix rhs_o0;
  ComplexMatrix residual_od;  // lhs - rhs_od
  ComplexMatrix residual_o0;  // lhs - rhs_o0
  ComplexMatrix offset;       // residual_o0 - residual_od
  std::vector<double> residual_od_stderr;  // row-major, per entry
  std::vector<double> residual_o0_stderr;
  std::vector<double> offset_stderr;

  double residual_od_norm() const { return frobenius_norm(residual_od); }
  double residual_o0_norm() const { return frobenius_norm(residual_o0); }
  double offset_norm() const { return frobenius_norm(offset); }
  /// max_ij |x_ij| / stderr_ij over entries with nonzero stderr.
  static double max_sigma(const ComplexMatrix& x, const std::vector<double>& stderr_entries);
};

/// Trajectories carry seeds; their noise is regenerated from `bath`. The
/// kernel grid must contain t and its spacing must be an integer multiple of
/// the trajectory dt. Throws std::out_of_range when t is not on the grids.
NovikovReport validate_novikov(std::span<const TrajectoryPath> trajectories, const BathSpec& bath,
                               const KernelGrid& kernels, const CoefficientPath& coeffs, double t);

/// Streaming variant: generates config.n_trajectories trajectories up to t.
NovikovReport run_novikov_check(const EnsembleConfig& config, const CoefficientPath& coeffs,
                                const KernelGrid& kernels, double t);

}  // namespace ppme
