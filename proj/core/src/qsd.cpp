#include "ppme/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace ppme {

namespace {

constexpr std::size_t kLeafChunk = 16;

bool overflowed(const Vec3& v) {
  for (const auto& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kOverflowGuard) {
      return true;
    }
  }
  return false;
}

Vec3 add_scaled(const Vec3& y, Complex h, const Vec3& d) {
  return {y[0] + h * d[0], y[1] + h * d[1], y[2] + h * d[2]};
}

struct TimeMoments {
  std::array<Complex, 9> rho{};
  std::array<double, 3> pop_sq{};
  double norm_sq = 0.0;
};

class Moments {
 public:
  explicit Moments(std::size_t n_times) : data_(n_times) {}

  void add_trajectory(std::span<const Vec3> states) {
    for (std::size_t k = 0; k < states.size(); ++k) {
      const Vec3& psi = states[k];
      auto& m = data_[k];
      double norm = 0.0;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m.rho[i * 3 + j] += psi[i] * std::conj(psi[j]);
        const double p = std::norm(psi[i]);
        m.pop_sq[i] += p * p;
        norm += p;
      }
      m.norm_sq += norm * norm;
    }
    ++count_;
  }

  Moments& operator+=(const Moments& other) {
    for (std::size_t k = 0; k < data_.size(); ++k) {
      auto& a = data_[k];
      const auto& b = other.data_[k];
      for (int e = 0; e < 9; ++e) a.rho[e] += b.rho[e];
      for (int e = 0; e < 3; ++e) a.pop_sq[e] += b.pop_sq[e];
      a.norm_sq += b.norm_sq;
    }
    count_ += other.count_;
    return *this;
  }

  EnsembleResult finish(const TimeGrid& grid) const {
    EnsembleResult out;
    out.n_trajectories = count_;
    out.density.grid = grid;
    const double n = static_cast<double>(count_);
    auto stderr_of = [n](double sum, double sum_sq) {
      if (n < 2.0) return 0.0;
      const double mean = sum / n;
      const double var = (sum_sq - n * mean * mean) / (n - 1.0);
      return std::sqrt(std::max(var, 0.0) / n);
    };
    for (const auto& m : data_) {
      ComplexMatrix rho(3);
      double tr = 0.0;
      std::array<double, 3> se{};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) rho(i, j) = m.rho[i * 3 + j] / n;
        tr += m.rho[i * 3 + i].real();
      }
      for (int level = 0; level < 3; ++level) {
        const auto r = level_row(level);
        se[level] = stderr_of(m.rho[r * 3 + r].real(), m.pop_sq[r]);
      }
      out.density.push_back(DensityMatrix(std::move(rho)));
      out.population_stderr.push_back(se);
      out.trace_stderr.push_back(stderr_of(tr, m.norm_sq));
    }
    return out;
  }

 private:
  std::vector<TimeMoments> data_;
  std::size_t count_ = 0;
};

using LeafSource = std::function<std::span<const Vec3>(std::size_t position, std::vector<Vec3>& scratch)>;

Moments reduce_chunk(const LeafSource& leaf, std::size_t n_leaves, std::size_t chunk, std::size_t n_times) {
  Moments m(n_times);
  std::vector<Vec3> scratch;
  const std::size_t lo = chunk * kLeafChunk;
  const std::size_t hi = std::min(n_leaves, lo + kLeafChunk);
  for (std::size_t p = lo; p < hi; ++p) m.add_trajectory(leaf(p, scratch));
  return m;
}

// Pairwise tree over chunk range [lo, hi). The split points depend only on
// the range, so the summation order is the same for any number of threads.
Moments reduce_tree(const LeafSource& leaf, std::size_t n_leaves, std::size_t lo, std::size_t hi,
                    std::size_t n_times, std::size_t spare_threads) {
  if (hi - lo == 1) return reduce_chunk(leaf, n_leaves, lo, n_times);
  const std::size_t mid = lo + (hi - lo) / 2;
  if (spare_threads > 0) {
    const std::size_t left_share = spare_threads / 2;
    auto left = std::async(std::launch::async, [&, lo, mid, left_share] {
      return reduce_tree(leaf, n_leaves, lo, mid, n_times, left_share);
    });
    Moments right = reduce_tree(leaf, n_leaves, mid, hi, n_times, spare_threads - 1 - left_share);
    Moments result = left.get();
    result += right;
    return result;
  }
  Moments left = reduce_tree(leaf, n_leaves, lo, mid, n_times, 0);
  left += reduce_tree(leaf, n_leaves, mid, hi, n_times, 0);
  return left;
}

EnsembleResult reduce_ensemble(const LeafSource& leaf, std::size_t n_leaves, const TimeGrid& grid,
                               std::size_t workers) {
  if (n_leaves == 0) throw std::invalid_argument("ensemble: need at least one trajectory");
  const std::size_t n_chunks = (n_leaves + kLeafChunk - 1) / kLeafChunk;
  const std::size_t spare = workers > 1 ? workers - 1 : 0;
  return reduce_tree(leaf, n_leaves, 0, n_chunks, grid.size(), spare).finish(grid);
}

std::vector<std::size_t> seed_order(std::span<const std::uint64_t> seeds) {
  std::vector<std::size_t> order(seeds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return seeds[a] < seeds[b]; });
  return order;
}

Mat3 j_plus_squared() {
  const auto ops = three_level_ops();
  return to_mat3(ops.jplus * ops.jplus);
}

// Per-entry running sums for the Novikov estimator.
struct EntryStats {
  std::array<Complex, 9> sum{};
  std::array<double, 9> sum_sq{};
  void add(const Mat3& x) {
    for (int e = 0; e < 9; ++e) {
      sum[e] += x[e];
      sum_sq[e] += std::norm(x[e]);
    }
  }
  ComplexMatrix mean(double n) const {
    ComplexMatrix m(3);
    for (int e = 0; e < 9; ++e) m.entries()[e] = sum[e] / n;
    return m;
  }
  std::vector<double> stderr_entries(double n) const {
    std::vector<double> out(9);
    for (int e = 0; e < 9; ++e) {
      const double var = n > 1.0 ? (sum_sq[e] - std::norm(sum[e]) / n) / (n - 1.0) : 0.0;
      out[e] = std::sqrt(std::max(var, 0.0) / n);
    }
    return out;
  }
};

class NovikovAccumulator {
 public:
  NovikovAccumulator(const BathSpec& bath, const KernelGrid& kernels, const CoefficientPath& coeffs,
                     const TimeGrid& traj_grid, double t)
      : bath_(bath), t_(t) {
    traj_index_ = traj_grid.index_of(t);
    const std::size_t kk = kernels.grid().index_of(t);
    const double ratio = kernels.grid().dt() / traj_grid.dt();
    stride_ = static_cast<std::size_t>(std::llround(ratio));
    if (stride_ == 0 || std::abs(ratio - static_cast<double>(stride_)) > 1e-9 * ratio) {
      throw std::invalid_argument(
          "validate_novikov: kernel spacing must be an integer multiple of the trajectory dt");
    }
    // Trapezoid weights times conj(P2(t, s')) on the kernel grid.
    const auto p2 = kernels.P2(kk);
    weights_.resize(kk + 1);
    const double h = kernels.grid().dt();
    for (std::size_t j = 0; j <= kk; ++j) {
      const double w = kk == 0 ? 0.0 : ((j == 0 || j == kk) ? 0.5 * h : h);
      weights_[j] = w * std::conj(p2[j]);
    }
    const std::size_t kc = coeffs.grid.index_of(t);
    const auto ops = three_level_ops();
    const ComplexMatrix obar0 = coeffs.F2[kc] * ops.jminus + coeffs.G2[kc] * (ops.jz * ops.jminus);
    o0_dag_ = to_mat3(obar0.adjoint());
    jp2_ = j_plus_squared();
  }

  std::size_t trajectory_index() const { return traj_index_; }

  void add(const Vec3& psi, const NoisePath& noise) {
    Mat3 P;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) P[i * 3 + j] = psi[i] * std::conj(psi[j]);
    const Complex zt_star = noise.values[traj_index_];
    Complex integral = 0.0;  // int ds' conj(P2(t,s')) z_{s'}
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      integral += weights_[j] * std::conj(noise.values[j * stride_]);
    }
    Mat3 lhs, r0, rd, off;
    const Mat3 po0 = mul(P, o0_dag_);
    const Mat3 pj = mul(P, jp2_);
    for (int e = 0; e < 9; ++e) {
      lhs[e] = zt_star * P[e];
      r0[e] = lhs[e] - po0[e];
      off[e] = integral * pj[e];
      rd[e] = r0[e] - off[e];
    }
    lhs_.add(lhs);
    po0_.add(po0);
    r0_.add(r0);
    rd_.add(rd);
    off_.add(off);
    ++n_;
  }

  NovikovReport report() const {
    if (n_ == 0) throw std::invalid_argument("validate_novikov: no trajectories");
    const double n = static_cast<double>(n_);
    NovikovReport r;
    r.t = t_;
    r.n_trajectories = n_;
    r.lhs = lhs_.mean(n);
    r.rhs_o0 = po0_.mean(n);
    r.residual_o0 = r0_.mean(n);
    r.residual_od = rd_.mean(n);
    r.offset = off_.mean(n);
    r.rhs_od = r.lhs - r.residual_od;
    r.residual_o0_stderr = r0_.stderr_entries(n);
    r.residual_od_stderr = rd_.stderr_entries(n);
    r.offset_stderr = off_.stderr_entries(n);
    return r;
  }

 private:
  BathSpec bath_;
  double t_;
  std::size_t traj_index_ = 0;
  std::size_t stride_ = 1;
  std::vector<Complex> weights_;
  Mat3 o0_dag_{};
  Mat3 jp2_{};
  EntryStats lhs_, po0_, r0_, rd_, off_;
  std::size_t n_ = 0;
};

}  // namespace

TrajectoryPropagator::TrajectoryPropagator(const SystemSpec& system, const CoefficientPath& coeffs,
                                           const TimeGrid& grid)
    : grid_(grid) {
  system.validate();
  if (system.dim != 3) throw DimensionError("TrajectoryPropagator: three-level system required");
  require_half_step_layout(coeffs, grid);
  const auto ops = three_level_ops();
  const ComplexMatrix jz_l = ops.jz * system.lindblad;
  const ComplexMatrix l_dag = system.lindblad.adjoint();
  const ComplexMatrix minus_ih = Complex(0.0, -1.0) * system.hamiltonian;
  drift_.reserve(coeffs.grid.size());
  for (std::size_t m = 0; m < coeffs.grid.size(); ++m) {
    const ComplexMatrix obar0 = coeffs.F2[m] * system.lindblad + coeffs.G2[m] * jz_l;
    drift_.push_back(to_mat3(minus_ih - l_dag * obar0));
  }
  lindblad_ = to_mat3(system.lindblad);
}

void TrajectoryPropagator::run(const NoisePath& noise, const Vec3& psi0, std::size_t last_index,
                               const std::function<void(std::size_t, const Vec3&)>& visit) const {
  if (!(noise.grid == grid_)) throw std::invalid_argument("propagate: noise grid differs from propagation grid");
  if (last_index > grid_.n_steps()) throw std::out_of_range("propagate: last_index beyond grid");
  const double h = grid_.dt();
  Vec3 psi = psi0;
  visit(0, psi);
  for (std::size_t k = 0; k < last_index; ++k) {
    const Complex z0 = noise.values[k];
    const Complex z1 = noise.values[k + 1];
    const Complex zm = 0.5 * (z0 + z1);
    const Mat3& a0 = drift_[2 * k];
    const Mat3& am = drift_[2 * k + 1];
    const Mat3& a1 = drift_[2 * k + 2];
    auto f = [&](const Mat3& a, Complex z, const Vec3& y) {
      const Vec3 ay = mul(a, y);
      const Vec3 ly = mul(lindblad_, y);
      return Vec3{ay[0] + z * ly[0], ay[1] + z * ly[1], ay[2] + z * ly[2]};
    };
    const Vec3 k1 = f(a0, z0, psi);
    const Vec3 k2 = f(am, zm, add_scaled(psi, 0.5 * h, k1));
    const Vec3 k3 = f(am, zm, add_scaled(psi, 0.5 * h, k2));
    const Vec3 k4 = f(a1, z1, add_scaled(psi, h, k3));
    for (int i = 0; i < 3; ++i) psi[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (overflowed(psi)) throw NonFiniteError("propagate_trajectory: amplitude overflow", grid_.time(k + 1));
    visit(k + 1, psi);
  }
}

TrajectoryPath propagate_trajectory(const SystemSpec& system, const CoefficientPath& coeffs,
                                    const NoisePath& noise, const Vec3& psi0, const TimeGrid& grid) {
  double norm = 0.0;
  for (const auto& z : psi0) norm += std::norm(z);
  if (std::abs(norm - 1.0) > 1e-12) throw std::invalid_argument("propagate_trajectory: psi0 must be normalized");
  TrajectoryPropagator prop(system, coeffs, grid);
  TrajectoryPath out{grid, std::vector<Vec3>(grid.size()), noise.seed};
  prop.run(noise, psi0, grid.n_steps(), [&](std::size_t k, const Vec3& psi) { out.states[k] = psi; });
  return out;
}

EnsembleResult ensemble_density(std::span<const TrajectoryPath> trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("ensemble_density: need at least one trajectory");
  const TimeGrid& grid = trajectories.front().grid;
  std::vector<std::uint64_t> seeds;
  seeds.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    if (!(t.grid == grid) || t.states.size() != grid.size()) {
      throw std::invalid_argument("ensemble_density: trajectories do not share one grid");
    }
    seeds.push_back(t.seed);
  }
  const auto order = seed_order(seeds);
  LeafSource leaf = [&](std::size_t p, std::vector<Vec3>&) {
    return std::span<const Vec3>(trajectories[order[p]].states);
  };
  return reduce_ensemble(leaf, trajectories.size(), grid, 1);
}

std::vector<std::uint64_t> ensemble_seeds(std::uint64_t master_seed, std::size_t n) {
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = derive_seed(master_seed, i);
  return seeds;
}

EnsembleResult run_ensemble(const EnsembleConfig& config, const CoefficientPath& coeffs) {
  config.bath.validate();
  const TrajectoryPropagator prop(config.system, coeffs, config.grid);
  const auto seeds = ensemble_seeds(config.master_seed, config.n_trajectories);
  const auto order = seed_order(seeds);
  LeafSource leaf = [&](std::size_t p, std::vector<Vec3>& scratch) {
    const auto noise = sample_noise_path(config.bath, config.grid, seeds[order[p]]);
    scratch.resize(config.grid.size());
    prop.run(noise, config.psi0, config.grid.n_steps(),
             [&](std::size_t k, const Vec3& psi) { scratch[k] = psi; });
    return std::span<const Vec3>(scratch);
  };
  return reduce_ensemble(leaf, config.n_trajectories, config.grid, config.workers);
}

double NovikovReport::max_sigma(const ComplexMatrix& x, const std::vector<double>& stderr_entries) {
  double m = 0.0;
  for (std::size_t e = 0; e < stderr_entries.size(); ++e) {
    if (stderr_entries[e] > 0.0) m = std::max(m, std::abs(x.entries()[e]) / stderr_entries[e]);
  }
  return m;
}

NovikovReport validate_novikov(std::span<const TrajectoryPath> trajectories, const BathSpec& bath,
                               const KernelGrid& kernels, const CoefficientPath& coeffs, double t) {
  if (trajectories.empty()) throw std::invalid_argument("validate_novikov: no trajectories");
  const TimeGrid& grid = trajectories.front().grid;
  NovikovAccumulator acc(bath, kernels, coeffs, grid, t);
  std::vector<std::uint64_t> seeds;
  for (const auto& tr : trajectories) {
    if (!(tr.grid == grid)) throw std::invalid_argument("validate_novikov: trajectories do not share one grid");
    seeds.push_back(tr.seed);
  }
  for (std::size_t idx : seed_order(seeds)) {
    const auto& tr = trajectories[idx];
    const auto noise = sample_noise_path(bath, grid, tr.seed);
    acc.add(tr.states[acc.trajectory_index()], noise);
  }
  return acc.report();
}

NovikovReport run_novikov_check(const EnsembleConfig& config, const CoefficientPath& coeffs,
                                const KernelGrid& kernels, double t) {
  const TrajectoryPropagator prop(config.system, coeffs, config.grid);
  NovikovAccumulator acc(config.bath, kernels, coeffs, config.grid, t);
  const auto seeds = ensemble_seeds(config.master_seed, config.n_trajectories);
  for (std::size_t idx : seed_order(seeds)) {
    const auto noise = sample_noise_path(config.bath, config.grid, seeds[idx]);
    Vec3 at_t{};
    prop.run(noise, config.psi0, acc.trajectory_index(),
             [&](std::size_t k, const Vec3& psi) {
               if (k == acc.trajectory_index()) at_t = psi;
             });
    acc.add(at_t, noise);
  }
  return acc.report();
}

}  // namespace ppme
