#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ppme/master_equation.hpp"

using namespace ppme;

namespace {

struct Run {
  SystemSpec system;
  TimeGrid grid;
  CoefficientPath coeffs;
  DensityPath pp;
  DensityPath npp;
};

Run run(double omega, BathSpec bath, TimeGrid grid, const DensityMatrix& rho0) {
  const auto sys = SystemSpec::three_level(omega);
  auto c = coefficients_for_propagation(sys, bath, grid);
  auto pp = integrate_pp_me(sys, c, rho0, grid);
  auto npp = integrate_npp_me(sys, c, rho0, grid);
  return {sys, grid, std::move(c), std::move(pp), std::move(npp)};
}

DensityMatrix coherent_superposition() {
  const Vec3 psi{Complex(0.6), Complex(0.0, 0.48), Complex(0.64)};
  return DensityMatrix::pure(psi);
}

}  // namespace

TEST(MasterEquation, ZeroCouplingIsVonNeumann) {
  const double w = 1.0;
  const auto rho0 = coherent_superposition();
  const auto r = run(w, BathSpec{0.0, 0.2, 0.0}, TimeGrid(10.0, 0.01), rho0);
  for (std::size_t k = 0; k < r.grid.size(); k += 100) {
    const double t = r.grid.time(k);
    for (int l = 0; l < 3; ++l) EXPECT_NEAR(r.pp.states[k].population(l), rho0.population(l), 1e-12);
    // rho_{mn}(t) = rho_{mn}(0) exp(-i omega (m - n) t) in the ladder basis.
    const Complex expected = rho0.element(2, 0) * std::exp(Complex(0.0, -2.0 * w * t));
    EXPECT_NEAR(std::abs(r.pp.states[k].element(2, 0) - expected), 0.0, 1e-7);
    EXPECT_EQ(r.pp.states[k].matrix(), r.npp.states[k].matrix());
  }
}

TEST(MasterEquation, StrongMemoryPositivityDichotomy) {
  const auto r = run(1.0, BathSpec{0.8, 0.05, 0.0}, TimeGrid(25.0, 0.005), DensityMatrix::excited_level(2));
  const auto pp = positivity_report(r.pp);
  const auto npp = positivity_report(r.npp);
  EXPECT_GE(pp.lowest_eigenvalue, -1e-6);
  EXPECT_FALSE(pp.first_negativity_time.has_value());
  ASSERT_TRUE(npp.first_negativity_time.has_value());
  EXPECT_GT(*npp.first_negativity_time, 0.0);
  double min_ground = 1.0;
  for (const auto& rho : r.npp.states) min_ground = std::min(min_ground, rho.population(0));
  EXPECT_LT(min_ground, -0.01);
  EXPECT_LE(pp.max_hermiticity_residual, 1e-9);
  EXPECT_LE(npp.max_hermiticity_residual, 1e-9);
}

TEST(MasterEquation, ModerateMemoryBothPositive) {
  const auto r = run(1.0, BathSpec{0.2, 0.2, 0.0}, TimeGrid(25.0, 0.005), DensityMatrix::excited_level(2));
  EXPECT_GE(positivity_report(r.npp).lowest_eigenvalue, -1e-3);
  EXPECT_GE(positivity_report(r.pp).lowest_eigenvalue, -1e-6);
}

TEST(MasterEquation, HermitianForGeneralInitialState) {
  const auto r = run(1.0, BathSpec{0.8, 0.05, 0.3}, TimeGrid(10.0, 0.01), coherent_superposition());
  for (std::size_t k = 0; k < r.pp.size(); ++k) {
    EXPECT_LE(r.pp.hermiticity_residual[k], 1e-9);
    EXPECT_LE(r.npp.hermiticity_residual[k], 1e-9);
  }
}

TEST(MasterEquation, DtHalving) {
  const auto sys = SystemSpec::three_level(1.0);
  const BathSpec bath{0.2, 0.2, 0.0};
  const auto rho0 = DensityMatrix::excited_level(2);
  const TimeGrid coarse(25.0, 0.01), fine(25.0, 0.005);
  const auto a = integrate_pp_me(sys, coefficients_for_propagation(sys, bath, coarse), rho0, coarse);
  const auto b = integrate_pp_me(sys, coefficients_for_propagation(sys, bath, fine), rho0, fine);
  for (int l = 0; l < 3; ++l) {
    EXPECT_LE(std::abs(a.states.back().population(l) - b.states.back().population(l)), 1e-6);
  }
}

TEST(MasterEquation, Preconditions) {
  const auto sys = SystemSpec::three_level(1.0);
  const BathSpec bath{0.2, 0.2, 0.0};
  const TimeGrid grid(1.0, 0.01);
  const auto c = coefficients_for_propagation(sys, bath, grid);
  const DensityMatrix half(ComplexMatrix::identity(3) * Complex(0.5));
  EXPECT_THROW(integrate_pp_me(sys, c, half, grid), std::invalid_argument);
  const DensityMatrix negative(ComplexMatrix::diagonal(std::vector<double>{1.1, 0.2, -0.3}));
  EXPECT_THROW(integrate_pp_me(sys, c, negative, grid), std::invalid_argument);
  EXPECT_THROW(integrate_pp_me(sys, integrate_coefficients(sys, bath, grid), DensityMatrix::excited_level(2), grid),
               std::invalid_argument);
}

TEST(PositivityReport, ConstantMixedPath) {
  DensityPath path;
  path.grid = TimeGrid(1.0, 0.1);
  for (std::size_t k = 0; k < path.grid.size(); ++k) path.push_back(DensityMatrix::maximally_mixed(3));
  const auto r = positivity_report(path);
  for (std::size_t k = 0; k < path.size(); ++k) {
    EXPECT_NEAR(r.min_eigenvalue[k], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.trace[k], 1.0, 1e-15);
  }
  EXPECT_FALSE(r.first_negativity_time.has_value());
  EXPECT_NEAR(r.max_trace_drift, 0.0, 1e-15);
}

TEST(PositivityReport, Threshold) {
  DensityPath path;
  path.grid = TimeGrid(0.2, 0.1);
  path.push_back(DensityMatrix::excited_level(2));
  path.push_back(DensityMatrix(ComplexMatrix::diagonal(std::vector<double>{1.0, 1e-7, -1e-7})));
  path.push_back(DensityMatrix(ComplexMatrix::diagonal(std::vector<double>{1.0, 0.1, -0.1})));
  EXPECT_DOUBLE_EQ(*positivity_report(path).first_negativity_time, 0.2);
  EXPECT_DOUBLE_EQ(*positivity_report(path, 1e-8).first_negativity_time, 0.1);
  EXPECT_NEAR(positivity_report(path).lowest_eigenvalue, -0.1, 1e-15);
}

TEST(DensityCsv, Columns) {
  const auto r = run(1.0, BathSpec{0.2, 0.2, 0.0}, TimeGrid(0.02, 0.01), DensityMatrix::excited_level(2));
  std::ostringstream out;
  write_density_csv(out, r.pp, {{"extra", {1.0, 2.0, 3.0}}});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "t,rho00,rho11,rho22,re_rho01,im_rho01,re_rho02,im_rho02,re_rho12,im_rho12,trace,min_eig,"
            "n00,n11,n22,extra");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0,0,1,0,0,0,0,0,0,1,0,0,0,1,1");
  EXPECT_THROW(write_density_csv(out, r.pp, {{"short", {1.0}}}), std::invalid_argument);
}
