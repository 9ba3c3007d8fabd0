#include <gtest/gtest.h>

#include <cmath>

#include "ppme/pseudomode.hpp"

using namespace ppme;

namespace {

// Plain Lindblad equation with rate a: d rho = -i[H, rho] + a (2 L rho L^dagger - {L^dagger L, rho}).
std::vector<ComplexMatrix> markov_lindblad(const SystemSpec& sys, double a, const DensityMatrix& rho0,
                                           const TimeGrid& grid) {
  const ComplexMatrix& h = sys.hamiltonian;
  const ComplexMatrix& l = sys.lindblad;
  const ComplexMatrix ld = l.adjoint();
  const ComplexMatrix ldl = ld * l;
  auto f = [&](const ComplexMatrix& r) {
    return Complex(0.0, -1.0) * commutator(h, r) +
           Complex(a) * (Complex(2.0) * (l * r * ld) - ldl * r - r * ldl);
  };
  std::vector<ComplexMatrix> out{rho0.matrix()};
  ComplexMatrix r = rho0.matrix();
  const Complex dt = grid.dt();
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const auto k1 = f(r);
    const auto k2 = f(r + (0.5 * dt) * k1);
    const auto k3 = f(r + (0.5 * dt) * k2);
    const auto k4 = f(r + dt * k3);
    r += (dt / 6.0) * (k1 + Complex(2.0) * k2 + Complex(2.0) * k3 + k4);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(PseudomodeConfig, FromBath) {
  const auto cfg = PseudomodeConfig::from_bath(BathSpec{0.8, 0.05, 0.3}, 6);
  EXPECT_EQ(cfg.fock_dim, 6u);
  EXPECT_NEAR(cfg.coupling * cfg.coupling, 0.04, 1e-15);
  EXPECT_EQ(cfg.frequency, 0.3);
  EXPECT_EQ(cfg.decay, 0.05);
  EXPECT_THROW(PseudomodeConfig::from_bath(BathSpec{0.8, 0.05, 0.3}, 1), InvalidParameterError);
}

TEST(Pseudomode, ModeCorrelationMatchesBath) {
  for (const BathSpec& bath : {BathSpec{0.8, 0.05, 0.0}, BathSpec{0.2, 0.2, 0.0}, BathSpec{0.5, 0.7, 1.5}}) {
    const auto cfg = PseudomodeConfig::from_bath(bath);
    const TimeGrid grid(10.0, 0.005);
    const auto c = mode_correlation(cfg, grid);
    ASSERT_EQ(c.size(), grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Complex lam2c = cfg.coupling * cfg.coupling * c[k];
      EXPECT_NEAR(std::abs(lam2c - bath.correlation(grid.time(k), 0.0)), 0.0, 1e-6);
    }
  }
}

TEST(Pseudomode, DecoupledPopulationsConstant) {
  const auto sys = SystemSpec::three_level(1.0);
  const BathSpec bath{0.0, 0.2, 0.0};
  const Vec3 psi{Complex(0.6), Complex(0.0, 0.8), Complex(0.0)};
  const auto rho0 = DensityMatrix::pure(psi);
  const auto path = integrate_reference(sys, bath, rho0, PseudomodeConfig::from_bath(bath, 4), TimeGrid(5.0, 0.01));
  for (const auto& rho : path.states)
    for (int l = 0; l < 3; ++l) EXPECT_NEAR(rho.population(l), rho0.population(l), 1e-12);
}

TEST(Pseudomode, LindbladInvariants) {
  const auto sys = SystemSpec::three_level(1.0);
  for (const BathSpec& bath : {BathSpec{0.8, 0.05, 0.0}, BathSpec{0.2, 0.2, 0.0}}) {
    const auto path = integrate_reference(sys, bath, DensityMatrix::excited_level(2),
                                          PseudomodeConfig::from_bath(bath), TimeGrid(25.0, 0.005));
    for (std::size_t k = 0; k < path.size(); ++k) {
      EXPECT_LE(std::abs(path.trace[k] - 1.0), 1e-8);
      EXPECT_GE(path.min_eigenvalue[k], -1e-8);
      EXPECT_LE(path.hermiticity_residual[k], 1e-9);
    }
  }
}

TEST(Pseudomode, TruncationConverges) {
  const auto sys = SystemSpec::three_level(1.0);
  const BathSpec bath{0.8, 0.05, 0.0};
  const TimeGrid grid(25.0, 0.01);
  std::vector<DensityPath> series;
  for (std::size_t d : {4u, 6u, 8u}) {
    series.push_back(integrate_reference(sys, bath, DensityMatrix::excited_level(2),
                                         PseudomodeConfig::from_bath(bath, d), grid));
  }
  const auto check = check_truncation(series);
  ASSERT_EQ(check.successive_differences.size(), 2u);
  EXPECT_LT(check.error_estimate, 1e-4);
  EXPECT_TRUE(check.converged);
}

TEST(Pseudomode, TruncationTooSmallIsDetected) {
  // Two excitations start in the system; a two-level mode cannot hold them.
  const auto sys = SystemSpec::three_level(1.0);
  const BathSpec bath{0.8, 0.05, 0.0};
  const TimeGrid grid(25.0, 0.01);
  std::vector<DensityPath> series;
  for (std::size_t d : {2u, 8u}) {
    series.push_back(integrate_reference(sys, bath, DensityMatrix::excited_level(2),
                                         PseudomodeConfig::from_bath(bath, d), grid));
  }
  const auto check = check_truncation(series);
  EXPECT_FALSE(check.converged);
  EXPECT_GT(check.error_estimate, 1e-4);
}

TEST(CheckTruncation, TrivialCases) {
  const auto sys = SystemSpec::three_level(1.0);
  const BathSpec bath{0.0, 0.2, 0.0};
  const TimeGrid grid(2.0, 0.01);
  std::vector<DensityPath> series;
  for (std::size_t d : {2u, 5u}) {
    series.push_back(integrate_reference(sys, bath, DensityMatrix::excited_level(2),
                                         PseudomodeConfig::from_bath(bath, d), grid));
  }
  auto check = check_truncation(series);
  EXPECT_EQ(check.error_estimate, 0.0);
  EXPECT_TRUE(check.converged);
  std::vector<DensityPath> same{series[0], series[0]};
  EXPECT_EQ(check_truncation(same).error_estimate, 0.0);
  EXPECT_THROW(check_truncation(std::vector<DensityPath>{series[0]}), std::invalid_argument);
}

// Largest population difference between the pseudomode reference and the
// plain Lindblad equation over 0 <= t <= 5.
static double markov_deviation(double gamma) {
  const auto sys = SystemSpec::three_level(1.0);
  const BathSpec bath{0.5, gamma, 0.0};
  const TimeGrid grid(5.0, 0.1 / gamma);
  const auto rho0 = DensityMatrix::excited_level(2);
  const auto ref = integrate_reference(sys, bath, rho0, PseudomodeConfig::from_bath(bath, 4), grid);
  const auto lind = markov_lindblad(sys, bath.a, rho0, grid);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (int l = 0; l < 3; ++l) {
      const auto r = level_row(l);
      worst = std::max(worst, std::abs(ref.states[k].population(l) - lind[k](r, r).real()));
    }
  return worst;
}

TEST(Pseudomode, MarkovLimit) {
  // The residual memory lag is O(rate / gamma): about 3.4% at gamma = 50,
  // halving with each doubling of gamma.
  const double d50 = markov_deviation(50.0);
  const double d100 = markov_deviation(100.0);
  const double d200 = markov_deviation(200.0);
  EXPECT_NEAR(d50 / d100, 2.0, 0.4);
  EXPECT_NEAR(d100 / d200, 2.0, 0.4);
  EXPECT_LE(d200, 0.02);
}

TEST(Pseudomode, RejectsInconsistentConfig) {
  const auto sys = SystemSpec::three_level(1.0);
  const BathSpec bath{0.8, 0.05, 0.0};
  auto cfg = PseudomodeConfig::from_bath(bath);
  cfg.coupling *= 2.0;
  EXPECT_THROW(integrate_reference(sys, bath, DensityMatrix::excited_level(2), cfg, TimeGrid(1.0, 0.1)),
               InvalidParameterError);
}
