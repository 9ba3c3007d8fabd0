#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ppme/model.hpp"

namespace ppme {

/// One realization of z*_t on a grid. values[k] = z*(t_k).
struct NoisePath {
  TimeGrid grid;
  std::vector<Complex> values;
  std::uint64_t seed = 0;
};

/// Per-trajectory seed from a master seed and a trajectory index. A pure
/// function of its arguments, so ensemble membership does not depend on the
/// order in which workers pick up indices.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// Stationary complex OU path via the exact one-step recursion
///   w_{k+1} = exp(-(gamma + i Omega) dt) w_k + xi_k,
///   xi_k ~ CN(0, a gamma (1 - exp(-2 gamma dt))),   w_0 ~ CN(0, a gamma),
/// emitting values[k] = conj(w_k). Real and imaginary parts of every draw are
/// independent with equal variance, so M(z_t z_s) = 0 and
/// M(z_t z_s*) = alpha(t, s) hold exactly at grid points.
NoisePath sample_noise_path(const BathSpec& bath, const TimeGrid& grid, std::uint64_t seed);

/// Sample moments of z at selected grid-index pairs (t_i, t_j).
struct CovarianceEstimate {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<Complex> mean;                // M(z_{t_i})
  std::vector<double> mean_stderr;
  std::vector<Complex> covariance;          // M(z_{t_i} z*_{t_j})
  std::vector<double> covariance_stderr;
  std::vector<Complex> pseudo_covariance;   // M(z_{t_i} z_{t_j})
  std::vector<double> pseudo_covariance_stderr;
  std::size_t n_samples = 0;
};

/// Streaming form of estimate_covariance for ensembles too large to hold.
class CovarianceAccumulator {
 public:
  CovarianceAccumulator(TimeGrid grid, std::vector<std::pair<std::size_t, std::size_t>> pairs);

  void add(const NoisePath& path);
  CovarianceEstimate result() const;

 private:
  struct Moment {
    Complex sum;
    double sum_sq = 0.0;  // sum of |x|^2
    void add(Complex x) {
      sum += x;
      sum_sq += std::norm(x);
    }
  };

  TimeGrid grid_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<Moment> mean_, cov_, pseudo_;
  std::size_t n_ = 0;
};

/// Throws std::invalid_argument for fewer than two paths or mismatched grids,
/// std::out_of_range for indices beyond the grid.
CovarianceEstimate estimate_covariance(std::span<const NoisePath> paths,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs);

}  // namespace ppme
