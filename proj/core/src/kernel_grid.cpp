#include "ppme/kernel_grid.hpp"

#include <cmath>
#include <string>

namespace ppme {

namespace {

struct MarchOutput {
  TriangularArray f1, g1, f2, g2, phi;
  std::vector<Complex> F1, G1;
  std::vector<Complex> decay;
};

std::vector<Complex> decay_table(const BathSpec& bath, double h, std::size_t n) {
  std::vector<Complex> d(n);
  for (std::size_t m = 0; m < n; ++m) {
    d[m] = std::exp(-(bath.gamma + kI * bath.center_frequency) * (static_cast<double>(m) * h));
  }
  return d;
}

void check_budget(std::size_t arrays, std::size_t n_times, std::size_t budget) {
  const std::size_t bytes = arrays * TriangularArray::bytes_for(n_times);
  if (bytes > budget) {
    throw MemoryBudgetError("kernel grid needs " + std::to_string(bytes) +
                            " bytes, budget is " + std::to_string(budget) +
                            "; coarsen the grid or raise the budget");
  }
}

// Self-consistent RK4 march in t of the kernel family indexed by s. With
// `with_od` the derivative-consistent kernels (f2, g2, Phi) ride along,
// driven by the same stage values of F1 and G1.
MarchOutput march(const SystemSpec& system, const BathSpec& bath, const TimeGrid& grid,
                  bool with_od) {
  const std::size_t n = grid.size();
  const double h = grid.dt();
  const double ag = bath.a * bath.gamma;
  const Complex iw = kI * system.omega;

  MarchOutput out;
  out.decay = decay_table(bath, h, n);
  out.f1 = TriangularArray(n);
  out.g1 = TriangularArray(n);
  if (with_od) {
    out.f2 = TriangularArray(n);
    out.g2 = TriangularArray(n);
    out.phi = TriangularArray(n);
  }
  out.F1.resize(n);
  out.G1.resize(n);

  // Current row and RK4 scratch, one slot per column s_j.
  std::vector<Complex> f1(n), g1(n), f2(n), g2(n), ph(n);
  std::vector<Complex> yf1(n), yg1(n), yf2(n), yg2(n), yph(n);
  std::vector<Complex> af1(n), ag1(n), af2(n), ag2(n), aph(n);  // RK4 accumulators
  std::vector<Complex> df1(n), dg1(n), df2(n), dg2(n), dph(n);

  f1[0] = 1.0;
  g1[0] = 0.0;
  f2[0] = 1.0;
  g2[0] = 0.0;
  ph[0] = 1.0;

  // Quadrature of alpha(tau, s) x(tau, s) over [0, tau], tau = t_k + c h,
  // from column values at s_0..s_k plus the diagonal value at s = tau.
  auto convolve = [&](const std::vector<Complex>& x, std::size_t k, double c, Complex diag) {
    const Complex shift = std::exp(-(bath.gamma + kI * bath.center_frequency) * (c * h));
    Complex grid_sum = 0.0;
    if (k > 0) {
      grid_sum += 0.5 * out.decay[k] * x[0];
      for (std::size_t j = 1; j < k; ++j) grid_sum += out.decay[k - j] * x[j];
      grid_sum += 0.5 * x[k];
      grid_sum *= h;
    }
    const Complex panel = 0.5 * c * h * (x[k] * shift + diag) ;
    return ag * (shift * grid_sum + panel);
  };

  auto derivatives = [&](std::size_t k, double c, const std::vector<Complex>& sf1,
                         const std::vector<Complex>& sg1, const std::vector<Complex>& sf2,
                         const std::vector<Complex>& sg2, const std::vector<Complex>& sph) {
    const Complex F1 = convolve(sf1, k, c, 1.0);
    const Complex G1 = convolve(sg1, k, c, 0.0);
    const Complex rate_f = iw + 2.0 * G1;
    const Complex src_g = -2.0 * F1 + 4.0 * G1;
    const Complex rate_g = iw + 2.0 * F1 - 2.0 * G1;
    for (std::size_t j = 0; j <= k; ++j) {
      df1[j] = rate_f * sf1[j];
      dg1[j] = src_g * sf1[j] + rate_g * sg1[j];
    }
    if (with_od) {
      const Complex rate_p = 2.0 * iw + 2.0 * F1;
      for (std::size_t j = 0; j <= k; ++j) {
        df2[j] = (iw + 2.0 * G1) * sf2[j];
        dg2[j] = (-2.0 * F1 + 4.0 * G1) * sf2[j] + (iw + 2.0 * F1 - 2.0 * G1) * sg2[j];
        dph[j] = rate_p * sph[j];
      }
    }
    return std::pair{F1, G1};
  };

  auto store_row = [&](std::size_t k) {
    for (std::size_t j = 0; j <= k; ++j) {
      out.f1(k, j) = f1[j];
      out.g1(k, j) = g1[j];
      if (with_od) {
        out.f2(k, j) = f2[j];
        out.g2(k, j) = g2[j];
        out.phi(k, j) = ph[j];
      }
    }
  };

  auto finite_row = [&](std::size_t k) {
    for (std::size_t j = 0; j <= k; ++j) {
      const double m = std::abs(f1[j]) + std::abs(g1[j]) +
                       (with_od ? std::abs(f2[j]) + std::abs(g2[j]) + std::abs(ph[j]) : 0.0);
      if (!std::isfinite(m) || m > kOverflowGuard) return false;
    }
    return true;
  };

  for (std::size_t k = 0;; ++k) {
    store_row(k);
    if (k + 1 == n) {
      const auto [F, G] = derivatives(k, 0.0, f1, g1, f2, g2, ph);
      out.F1[k] = F;
      out.G1[k] = G;
      break;
    }

    // Stage 1.
    {
      const auto [F, G] = derivatives(k, 0.0, f1, g1, f2, g2, ph);
      out.F1[k] = F;
      out.G1[k] = G;
    }
    auto stage = [&](double weight_in_sum, double step_to_next) {
      for (std::size_t j = 0; j <= k; ++j) {
        af1[j] += weight_in_sum * df1[j];
        ag1[j] += weight_in_sum * dg1[j];
        yf1[j] = f1[j] + step_to_next * df1[j];
        yg1[j] = g1[j] + step_to_next * dg1[j];
        if (with_od) {
          af2[j] += weight_in_sum * df2[j];
          ag2[j] += weight_in_sum * dg2[j];
          aph[j] += weight_in_sum * dph[j];
          yf2[j] = f2[j] + step_to_next * df2[j];
          yg2[j] = g2[j] + step_to_next * dg2[j];
          yph[j] = ph[j] + step_to_next * dph[j];
        }
      }
    };
    for (std::size_t j = 0; j <= k; ++j) af1[j] = ag1[j] = af2[j] = ag2[j] = aph[j] = 0.0;

    stage(1.0, 0.5 * h);
    derivatives(k, 0.5, yf1, yg1, yf2, yg2, yph);
    stage(2.0, 0.5 * h);
    derivatives(k, 0.5, yf1, yg1, yf2, yg2, yph);
    stage(2.0, h);
    derivatives(k, 1.0, yf1, yg1, yf2, yg2, yph);
    stage(1.0, 0.0);

    for (std::size_t j = 0; j <= k; ++j) {
      f1[j] += (h / 6.0) * af1[j];
      g1[j] += (h / 6.0) * ag1[j];
      if (with_od) {
        f2[j] += (h / 6.0) * af2[j];
        g2[j] += (h / 6.0) * ag2[j];
        ph[j] += (h / 6.0) * aph[j];
      }
    }
    f1[k + 1] = 1.0;
    g1[k + 1] = 0.0;
    f2[k + 1] = 1.0;
    g2[k + 1] = 0.0;
    ph[k + 1] = 1.0;
    if (!finite_row(k + 1)) {
      throw NonFiniteError("kernel grid: kernel blow-up", grid.time(k + 1));
    }
  }
  return out;
}

}  // namespace

F1G1Kernels integrate_f1g1(const SystemSpec& system, const BathSpec& bath, const TimeGrid& grid,
                           std::size_t memory_budget_bytes) {
  system.validate();
  bath.validate();
  check_budget(2, grid.size(), memory_budget_bytes);
  auto m = march(system, bath, grid, false);
  return {grid, std::move(m.f1), std::move(m.g1), std::move(m.F1), std::move(m.G1)};
}

KernelGrid integrate_kernel_grid(const SystemSpec& system, const BathSpec& bath,
                                 const TimeGrid& grid, std::size_t memory_budget_bytes) {
  system.validate();
  bath.validate();
  check_budget(5, grid.size(), memory_budget_bytes);
  auto m = march(system, bath, grid, true);
  KernelGrid kg;
  kg.grid_ = grid;
  kg.bath_ = bath;
  kg.f1_ = std::move(m.f1);
  kg.g1_ = std::move(m.g1);
  kg.f2_ = std::move(m.f2);
  kg.g2_ = std::move(m.g2);
  kg.phi_ = std::move(m.phi);
  kg.F1_ = std::move(m.F1);
  kg.G1_ = std::move(m.G1);
  kg.decay_ = std::move(m.decay);
  return kg;
}

Complex KernelGrid::alpha_lag(std::ptrdiff_t lag) const {
  const double ag = bath_.a * bath_.gamma;
  if (lag >= 0) return ag * decay_[static_cast<std::size_t>(lag)];
  return ag * std::conj(decay_[static_cast<std::size_t>(-lag)]);
}

double KernelGrid::weight(std::size_t j, std::size_t k) const {
  if (k == 0) return 0.0;
  return (j == 0 || j == k) ? 0.5 * grid_.dt() : grid_.dt();
}

Complex KernelGrid::p2(std::size_t k, std::size_t i, std::size_t j) const {
  if (i > j || j > k) return 0.0;
  return g2_(j, i) * phi_(k, j);
}

Complex KernelGrid::F2(std::size_t k) const {
  Complex s = 0.0;
  for (std::size_t j = 0; j <= k; ++j) s += weight(j, k) * alpha_lag(static_cast<std::ptrdiff_t>(k - j)) * f2_(k, j);
  return s;
}

Complex KernelGrid::G2(std::size_t k) const {
  Complex s = 0.0;
  for (std::size_t j = 0; j <= k; ++j) s += weight(j, k) * alpha_lag(static_cast<std::ptrdiff_t>(k - j)) * g2_(k, j);
  return s;
}

std::vector<Complex> KernelGrid::P2(std::size_t k) const {
  std::vector<Complex> out(k + 1);
  for (std::size_t jp = 0; jp <= k; ++jp) {
    Complex s = 0.0;
    for (std::size_t i = 0; i <= jp; ++i) {
      s += weight(i, jp) * alpha_lag(static_cast<std::ptrdiff_t>(k - i)) * g2_(jp, i);
    }
    out[jp] = s * phi_(k, jp);
  }
  return out;
}

Complex KernelGrid::Ptilde2(std::size_t k) const {
  const auto p = P2(k);
  Complex s = 0.0;
  for (std::size_t j = 0; j <= k; ++j) s += weight(j, k) * alpha_lag(static_cast<std::ptrdiff_t>(k - j)) * p[j];
  return s;
}

Complex KernelGrid::Pfstar(std::size_t k) const {
  const auto p = P2(k);
  Complex s = 0.0;
  for (std::size_t j = 0; j <= k; ++j) {
    Complex inner = 0.0;
    for (std::size_t jp = 0; jp <= k; ++jp) {
      const auto lag = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(jp);
      inner += weight(jp, k) * std::conj(alpha_lag(lag)) * std::conj(f2_(k, jp));
    }
    s += weight(j, k) * p[j] * inner;
  }
  return s;
}

CoefficientSample KernelGrid::convolved(std::size_t k) const {
  return {F2(k), G2(k), Ptilde2(k), Pfstar(k)};
}

std::size_t KernelGrid::min_p2_stride(std::size_t budget_bytes) const {
  for (std::size_t m = 1; m <= grid_.n_steps() + 1; ++m) {
    const std::size_t n_sub = grid_.n_steps() / m + 1;
    if (n_sub * n_sub * n_sub * sizeof(Complex) <= budget_bytes) return m;
  }
  throw MemoryBudgetError("p2: budget too small for even a single point");
}

P2Array KernelGrid::materialize_p2(std::size_t stride, std::size_t budget_bytes) const {
  if (stride == 0) throw std::invalid_argument("materialize_p2: stride must be positive");
  P2Array arr;
  arr.stride = stride;
  arr.n_sub = grid_.n_steps() / stride + 1;
  const std::size_t bytes = arr.n_sub * arr.n_sub * arr.n_sub * sizeof(Complex);
  if (bytes > budget_bytes) {
    throw MemoryBudgetError("p2 array needs " + std::to_string(bytes) + " bytes at stride " +
                            std::to_string(stride) + ", budget is " + std::to_string(budget_bytes));
  }
  arr.data.resize(arr.n_sub * arr.n_sub * arr.n_sub);
  for (std::size_t a = 0; a < arr.n_sub; ++a)
    for (std::size_t b = 0; b < arr.n_sub; ++b)
      for (std::size_t c = 0; c < arr.n_sub; ++c)
        arr.data[(a * arr.n_sub + b) * arr.n_sub + c] = p2(a * stride, b * stride, c * stride);
  return arr;
}

}  // namespace ppme
