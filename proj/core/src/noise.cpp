#include "ppme/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ppme {

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  // splitmix64 finalizer over a Weyl sequence indexed by trajectory.
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NoisePath sample_noise_path(const BathSpec& bath, const TimeGrid& grid, std::uint64_t seed) {
  bath.validate();
  NoisePath path{grid, std::vector<Complex>(grid.size()), seed};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto circular = [&](double variance) {
    const double sd = std::sqrt(0.5 * variance);
    const double re = normal(rng);
    const double im = normal(rng);
    return Complex(sd * re, sd * im);
  };

  const double stationary = bath.a * bath.gamma;
  const Complex decay = std::exp(-(bath.gamma + kI * bath.center_frequency) * grid.dt());
  const double innovation = stationary * (1.0 - std::exp(-2.0 * bath.gamma * grid.dt()));

  Complex w = circular(stationary);
  path.values[0] = std::conj(w);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    w = decay * w + circular(innovation);
    path.values[k] = std::conj(w);
  }
  return path;
}

CovarianceAccumulator::CovarianceAccumulator(
    TimeGrid grid, std::vector<std::pair<std::size_t, std::size_t>> pairs)
    : grid_(grid), pairs_(std::move(pairs)) {
  for (const auto& [i, j] : pairs_) {
    if (i >= grid_.size() || j >= grid_.size()) {
      throw std::out_of_range("estimate_covariance: sample index beyond grid");
    }
  }
  mean_.resize(pairs_.size());
  cov_.resize(pairs_.size());
  pseudo_.resize(pairs_.size());
}

void CovarianceAccumulator::add(const NoisePath& path) {
  if (!(path.grid == grid_)) throw std::invalid_argument("estimate_covariance: mismatched grids");
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto [i, j] = pairs_[p];
    const Complex zi = std::conj(path.values[i]);
    const Complex zj = std::conj(path.values[j]);
    mean_[p].add(zi);
    cov_[p].add(zi * std::conj(zj));
    pseudo_[p].add(zi * zj);
  }
  ++n_;
}

CovarianceEstimate CovarianceAccumulator::result() const {
  if (n_ < 2) throw std::invalid_argument("estimate_covariance: need at least two paths");
  const double n = static_cast<double>(n_);
  auto finish = [n](const Moment& m, Complex& value, double& stderr_out) {
    value = m.sum / n;
    const double var = (m.sum_sq - n * std::norm(value)) / (n - 1.0);
    stderr_out = std::sqrt(std::max(var, 0.0) / n);
  };
  CovarianceEstimate est;
  est.pairs = pairs_;
  est.n_samples = n_;
  const std::size_t np = pairs_.size();
  est.mean.resize(np);
  est.mean_stderr.resize(np);
  est.covariance.resize(np);
  est.covariance_stderr.resize(np);
  est.pseudo_covariance.resize(np);
  est.pseudo_covariance_stderr.resize(np);
  for (std::size_t p = 0; p < np; ++p) {
    finish(mean_[p], est.mean[p], est.mean_stderr[p]);
    finish(cov_[p], est.covariance[p], est.covariance_stderr[p]);
    finish(pseudo_[p], est.pseudo_covariance[p], est.pseudo_covariance_stderr[p]);
  }
  return est;
}

CovarianceEstimate estimate_covariance(std::span<const NoisePath> paths,
                                       std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  if (paths.size() < 2) throw std::invalid_argument("estimate_covariance: need at least two paths");
  CovarianceAccumulator acc(paths.front().grid, {pairs.begin(), pairs.end()});
  for (const auto& p : paths) acc.add(p);
  return acc.result();
}

}  // namespace ppme
