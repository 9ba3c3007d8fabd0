#include "ppme/pseudomode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppme {

namespace {

struct Entry {
  std::size_t row;
  std::size_t col;
  Complex value;
};

class SparseMatrix {
 public:
  explicit SparseMatrix(const ComplexMatrix& dense) : dim_(dense.dim()) {
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        if (dense(r, c) != Complex{}) entries_.push_back({r, c, dense(r, c)});
  }

  // out += A * x
  void left_multiply_add(const std::vector<Complex>& x, std::vector<Complex>& out) const {
    for (const auto& e : entries_) {
      const Complex* src = &x[e.col * dim_];
      Complex* dst = &out[e.row * dim_];
      for (std::size_t j = 0; j < dim_; ++j) dst[j] += e.value * src[j];
    }
  }

  // out += x * A^dagger
  void right_multiply_adjoint_add(const std::vector<Complex>& x, std::vector<Complex>& out) const {
    for (const auto& e : entries_) {
      const Complex v = std::conj(e.value);
      for (std::size_t i = 0; i < dim_; ++i) out[i * dim_ + e.row] += x[i * dim_ + e.col] * v;
    }
  }

  // out += x * A
  void right_multiply_add(const std::vector<Complex>& x, std::vector<Complex>& out) const {
    for (const auto& e : entries_) {
      for (std::size_t i = 0; i < dim_; ++i) out[i * dim_ + e.col] += x[i * dim_ + e.row] * e.value;
    }
  }

 private:
  std::size_t dim_;
  std::vector<Entry> entries_;
};

ComplexMatrix annihilation(std::size_t fock_dim) {
  ComplexMatrix b(fock_dim);
  for (std::size_t n = 1; n < fock_dim; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return b;
}

// Lindblad generator L(x) = -i[H, x] + C x C^dagger - 1/2 {C^dagger C, x},
// written as K x + x K^dagger + C x C^dagger with K = -i H - 1/2 C^dagger C.
class Lindbladian {
 public:
  Lindbladian(const ComplexMatrix& h, const ComplexMatrix& c)
      : dim_(h.dim()),
        k_(Complex(0.0, -1.0) * h - Complex(0.5) * (c.adjoint() * c)),
        c_(c) {}

  std::size_t dim() const { return dim_; }

  // Hermitian inputs: evaluated as Y + Y^dagger, Y = K x + 1/2 C x C^dagger.
  std::vector<Complex> apply_hermitian(const std::vector<Complex>& x) const {
    std::vector<Complex> y(dim_ * dim_), cx(dim_ * dim_);
    k_.left_multiply_add(x, y);
    c_.left_multiply_add(x, cx);
    std::vector<Complex> cxc(dim_ * dim_);
    c_.right_multiply_adjoint_add(cx, cxc);
    for (std::size_t e = 0; e < y.size(); ++e) y[e] += 0.5 * cxc[e];
    std::vector<Complex> out(dim_ * dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out[i * dim_ + j] = y[i * dim_ + j] + std::conj(y[j * dim_ + i]);
    return out;
  }

  // General (non-Hermitian) operand.
  std::vector<Complex> apply(const std::vector<Complex>& x) const {
    std::vector<Complex> out(dim_ * dim_), cx(dim_ * dim_);
    k_.left_multiply_add(x, out);
    k_.right_multiply_adjoint_add(x, out);
    c_.left_multiply_add(x, cx);
    c_.right_multiply_adjoint_add(cx, out);
    return out;
  }

 private:
  std::size_t dim_;
  SparseMatrix k_;
  SparseMatrix c_;
};

template <typename F>
void rk4_step(std::vector<Complex>& x, double h, const F& f) {
  const std::size_t n = x.size();
  std::vector<Complex> y(n);
  auto k1 = f(x);
  for (std::size_t e = 0; e < n; ++e) y[e] = x[e] + 0.5 * h * k1[e];
  auto k2 = f(y);
  for (std::size_t e = 0; e < n; ++e) y[e] = x[e] + 0.5 * h * k2[e];
  auto k3 = f(y);
  for (std::size_t e = 0; e < n; ++e) y[e] = x[e] + h * k3[e];
  auto k4 = f(y);
  for (std::size_t e = 0; e < n; ++e) x[e] += (h / 6.0) * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e]);
}

}  // namespace

PseudomodeConfig PseudomodeConfig::from_bath(const BathSpec& bath, std::size_t fock_dim) {
  bath.validate();
  PseudomodeConfig cfg;
  cfg.fock_dim = fock_dim;
  cfg.coupling = std::sqrt(bath.a * bath.gamma);
  cfg.frequency = bath.center_frequency;
  cfg.decay = bath.gamma;
  cfg.validate();
  return cfg;
}

void PseudomodeConfig::validate() const {
  if (fock_dim < 2) throw InvalidParameterError("pseudomode: fock_dim must be >= 2");
  if (!(decay > 0.0)) throw InvalidParameterError("pseudomode: decay rate must be > 0");
  if (!(coupling >= 0.0)) throw InvalidParameterError("pseudomode: coupling must be >= 0");
}

DensityPath integrate_reference(const SystemSpec& system, const BathSpec& bath,
                                const DensityMatrix& rho0, const PseudomodeConfig& cfg,
                                const TimeGrid& grid) {
  system.validate();
  bath.validate();
  cfg.validate();
  const double expected = bath.a * bath.gamma;
  if (std::abs(cfg.coupling * cfg.coupling - expected) > 1e-12 * std::max(1.0, expected) ||
      cfg.frequency != bath.center_frequency || cfg.decay != bath.gamma) {
    throw InvalidParameterError("pseudomode: config does not realize the bath correlation");
  }
  if (rho0.dim() != system.dim) throw DimensionError("integrate_reference: rho0 dimension");

  const std::size_t ds = system.dim, dm = cfg.fock_dim, d = ds * dm;
  const ComplexMatrix b = annihilation(dm);
  const ComplexMatrix bd = b.adjoint();
  const ComplexMatrix is = ComplexMatrix::identity(ds), im = ComplexMatrix::identity(dm);
  const ComplexMatrix lplus = system.lindblad.adjoint();
  ComplexMatrix h = kron(system.hamiltonian, im) + Complex(cfg.frequency) * kron(is, bd * b) +
                    Complex(cfg.coupling) * (kron(lplus, b) + kron(system.lindblad, bd));
  ComplexMatrix c = Complex(std::sqrt(2.0 * cfg.decay)) * kron(is, b);
  const Lindbladian gen(h, c);

  ComplexMatrix vac(dm);
  vac(0, 0) = 1.0;
  const ComplexMatrix joint0 = kron(rho0.matrix(), vac);
  std::vector<Complex> x(joint0.entries().begin(), joint0.entries().end());

  DensityPath path;
  path.grid = grid;
  path.states.reserve(grid.size());
  auto record = [&]() {
    ComplexMatrix joint(d, x);
    path.push_back(DensityMatrix(partial_trace_inner(joint, ds, dm)));
  };
  record();
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    rk4_step(x, grid.dt(), [&](const std::vector<Complex>& v) { return gen.apply_hermitian(v); });
    for (const auto& z : x) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kOverflowGuard) {
        throw NonFiniteError("integrate_reference: overflow", grid.time(k + 1));
      }
    }
    record();
  }
  return path;
}

std::vector<Complex> mode_correlation(const PseudomodeConfig& cfg, const TimeGrid& grid) {
  cfg.validate();
  const std::size_t dm = cfg.fock_dim;
  const ComplexMatrix b = annihilation(dm);
  const ComplexMatrix bd = b.adjoint();
  const Lindbladian gen(Complex(cfg.frequency) * (bd * b), Complex(std::sqrt(2.0 * cfg.decay)) * b);

  ComplexMatrix vac(dm);
  vac(0, 0) = 1.0;
  const ComplexMatrix x0 = bd * vac;
  std::vector<Complex> x(x0.entries().begin(), x0.entries().end());
  std::vector<Complex> out;
  out.reserve(grid.size());
  auto expect_b = [&]() {
    ComplexMatrix m(dm, x);
    return (b * m).trace();
  };
  out.push_back(expect_b());
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    rk4_step(x, grid.dt(), [&](const std::vector<Complex>& v) { return gen.apply(v); });
    out.push_back(expect_b());
  }
  return out;
}

TruncationCheck check_truncation(std::span<const DensityPath> paths, double tolerance) {
  if (paths.size() < 2) throw std::invalid_argument("check_truncation: need at least two truncations");
  TruncationCheck out;
  for (std::size_t p = 1; p < paths.size(); ++p) {
    const auto& lo = paths[p - 1];
    const auto& hi = paths[p];
    if (!(lo.grid == hi.grid) || lo.size() != hi.size()) {
      throw std::invalid_argument("check_truncation: paths do not share one grid");
    }
    double diff = 0.0;
    for (std::size_t k = 0; k < lo.size(); ++k)
      for (int level = 0; level < 3; ++level)
        diff = std::max(diff, std::abs(lo.states[k].population(level) - hi.states[k].population(level)));
    out.successive_differences.push_back(diff);
  }
  out.error_estimate = out.successive_differences.back();
  out.converged = out.error_estimate < tolerance;
  return out;
}

}  // namespace ppme
