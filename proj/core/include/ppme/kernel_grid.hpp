#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ppme/coefficients.hpp"
#include "ppme/model.hpp"

namespace ppme {

/// Raised when a requested kernel array would exceed its memory budget.
class MemoryBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultKernelBudgetBytes = std::size_t{1} << 30;

/// Lower-triangular two-time array x(t_k, s_j), j <= k.
class TriangularArray {
 public:
  TriangularArray() = default;
  explicit TriangularArray(std::size_t n_times) : n_(n_times), data_(n_times * (n_times + 1) / 2) {}

  std::size_t n_times() const { return n_; }
  Complex& operator()(std::size_t k, std::size_t j) { return data_[k * (k + 1) / 2 + j]; }
  const Complex& operator()(std::size_t k, std::size_t j) const { return data_[k * (k + 1) / 2 + j]; }

  static std::size_t bytes_for(std::size_t n_times) {
    return n_times * (n_times + 1) / 2 * sizeof(Complex);
  }

 private:
  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

/// Kernels of the noise-free O-operator ansatz, O(t,s) = f1 J_- + g1 J_z J_-,
/// together with the convolutions F1(t) = int alpha f1, G1(t) = int alpha g1.
struct F1G1Kernels {
  TimeGrid grid;
  TriangularArray f1;
  TriangularArray g1;
  std::vector<Complex> F1;
  std::vector<Complex> G1;
};

/// Self-consistent march of
///   d/dt f1 = (i omega + 2 G1) f1,
///   d/dt g1 = (-2 F1 + 4 G1) f1 + (i omega + 2 F1 - 2 G1) g1,
/// with f1(s,s) = 1, g1(s,s) = 0, where F1 and G1 are recomputed by
/// trapezoidal quadrature against alpha(t,s) at every RK4 stage.
F1G1Kernels integrate_f1g1(const SystemSpec& system, const BathSpec& bath, const TimeGrid& grid,
                           std::size_t memory_budget_bytes = kDefaultKernelBudgetBytes);

/// Subsampled materialization of p2(t, s, s') for inspection and export.
struct P2Array {
  std::size_t stride = 1;
  std::size_t n_sub = 0;  // points per axis
  std::vector<Complex> data;
  const Complex& operator()(std::size_t a, std::size_t b, std::size_t c) const {
    return data[(a * n_sub + b) * n_sub + c];
  }
};

/// Two-time kernels of the derivative-consistent operator
///   O_d(t,s) = f2 J_- + g2 J_z J_- + int ds' p2(t,s,s') z*_{s'} J_-^2
/// on the triangular domain, plus the convolutions that define the reduced
/// coefficients. Independent of the closed ODE system in coefficients.hpp:
/// every coefficient here is an explicit quadrature over stored kernels.
///
/// p2 obeys d/dt p2 = (2 i omega + 2 F1) p2 from p2(s',s,s') = g2(s',s); the
/// rate does not depend on (s, s'), so p2(t,s,s') = g2(s',s) Phi(t,s') with a
/// single RK4-integrated propagator Phi per s'.
class KernelGrid {
 public:
  const TimeGrid& grid() const { return grid_; }
  const BathSpec& bath() const { return bath_; }

  const TriangularArray& f1() const { return f1_; }
  const TriangularArray& g1() const { return g1_; }
  const TriangularArray& f2() const { return f2_; }
  const TriangularArray& g2() const { return g2_; }
  /// Phi(t_k, s'_j).
  const TriangularArray& p2_propagator() const { return phi_; }

  /// p2(t_k, s_i, s'_j); zero outside s_i <= s'_j <= t_k.
  Complex p2(std::size_t k, std::size_t i, std::size_t j) const;

  /// F1, G1 as used by the march (quadrature of f1, g1).
  Complex F1(std::size_t k) const { return F1_[k]; }
  Complex G1(std::size_t k) const { return G1_[k]; }

  /// Convolutions at t_k.
  Complex F2(std::size_t k) const;
  Complex G2(std::size_t k) const;
  /// P2(t_k, s'_j) for j = 0..k.
  std::vector<Complex> P2(std::size_t k) const;
  Complex Ptilde2(std::size_t k) const;
  Complex Pfstar(std::size_t k) const;
  CoefficientSample convolved(std::size_t k) const;

  /// Every `stride`-th grid point along all three axes. Throws
  /// MemoryBudgetError when the array exceeds `budget_bytes`.
  P2Array materialize_p2(std::size_t stride, std::size_t budget_bytes = kDefaultKernelBudgetBytes) const;
  /// Smallest stride whose materialized p2 fits in `budget_bytes`.
  std::size_t min_p2_stride(std::size_t budget_bytes = kDefaultKernelBudgetBytes) const;

  friend KernelGrid integrate_kernel_grid(const SystemSpec&, const BathSpec&, const TimeGrid&,
                                          std::size_t);

 private:
  Complex alpha_lag(std::ptrdiff_t lag) const;  // alpha(t_{j+lag}, t_j)
  double weight(std::size_t j, std::size_t k) const;

  TimeGrid grid_;
  BathSpec bath_;
  TriangularArray f1_, g1_, f2_, g2_, phi_;
  std::vector<Complex> F1_, G1_;
  std::vector<Complex> decay_;  // exp(-(gamma + i Omega) m h)
};

KernelGrid integrate_kernel_grid(const SystemSpec& system, const BathSpec& bath,
                                 const TimeGrid& grid,
                                 std::size_t memory_budget_bytes = kDefaultKernelBudgetBytes);

}  // namespace ppme
