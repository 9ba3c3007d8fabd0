#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "ppme/model.hpp"

using namespace ppme;

TEST(MinEigenvalue, Examples) {
  EXPECT_NEAR(min_eigenvalue(DensityMatrix::excited_level(2)), 0.0, 1e-15);
  EXPECT_NEAR(min_eigenvalue(DensityMatrix::maximally_mixed(3)), 1.0 / 3.0, 1e-15);
  const DensityMatrix d(ComplexMatrix::diagonal(std::vector<double>{1.1, 0.2, -0.3}));
  EXPECT_NEAR(min_eigenvalue(d), -0.3, 1e-15);
}

TEST(DensityMatrix, LevelLabels) {
  const auto top = DensityMatrix::excited_level(2);
  EXPECT_EQ(top.population(2), 1.0);
  EXPECT_EQ(top.population(0), 0.0);
  EXPECT_EQ(top.matrix()(0, 0), Complex(1.0));
  const auto ground = DensityMatrix::excited_level(0);
  EXPECT_EQ(ground.matrix()(2, 2), Complex(1.0));
  EXPECT_THROW(basis_state(3), std::out_of_range);
}

TEST(DensityMatrix, RejectsNonHermitian) {
  ComplexMatrix m = ComplexMatrix::identity(3);
  m(0, 1) = Complex(0.0, 0.5);
  EXPECT_THROW(DensityMatrix{m}, NotHermitianError);
  m(1, 0) = Complex(0.0, -0.5);
  EXPECT_NO_THROW(DensityMatrix{m});
}

TEST(SystemSpec, ThreeLevel) {
  const auto s = SystemSpec::three_level(2.5);
  EXPECT_EQ(s.dim, 3u);
  EXPECT_EQ(s.hamiltonian, Complex(2.5) * three_level_ops().jz);
  EXPECT_EQ(s.lindblad, three_level_ops().jminus);
  EXPECT_THROW(SystemSpec::three_level(NAN), InvalidParameterError);
}

TEST(BathSpec, Validation) {
  EXPECT_NO_THROW((BathSpec{0.0, 0.1, 0.0}.validate()));
  try {
    BathSpec{0.8, -0.05, 0.0}.validate();
    FAIL() << "negative gamma accepted";
  } catch (const InvalidParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("bath.gamma"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("> 0"), std::string::npos);
  }
  EXPECT_THROW((BathSpec{-1.0, 0.1, 0.0}.validate()), InvalidParameterError);
  EXPECT_THROW((BathSpec{1.0, 0.0, 0.0}.validate()), InvalidParameterError);
}

TEST(BathSpec, Correlation) {
  const BathSpec b{0.8, 0.05, 0.3};
  EXPECT_NEAR(std::abs(b.correlation(2.0, 2.0) - 0.04), 0.0, 1e-15);
  const Complex expected = 0.04 * std::exp(-0.05 * 1.5) * std::exp(Complex(0.0, -0.3 * 1.5));
  EXPECT_NEAR(std::abs(b.correlation(3.5, 2.0) - expected), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b.correlation(2.0, 3.5) - std::conj(expected)), 0.0, 1e-15);
}

TEST(TimeGrid, Construction) {
  const TimeGrid g(25.0, 0.005);
  EXPECT_EQ(g.n_steps(), 5000u);
  EXPECT_EQ(g.size(), 5001u);
  EXPECT_DOUBLE_EQ(g.t_end(), 25.0);
  EXPECT_THROW(TimeGrid(1.0, 0.3), InvalidParameterError);
  EXPECT_THROW(TimeGrid(1.0, 0.0), InvalidParameterError);
  EXPECT_THROW(TimeGrid(-1.0, 0.1), InvalidParameterError);
  const TimeGrid empty(0.0, 0.1);
  EXPECT_EQ(empty.size(), 1u);
}

TEST(TimeGrid, IndexAndRefine) {
  const TimeGrid g(10.0, 0.01);
  EXPECT_EQ(g.index_of(2.0), 200u);
  EXPECT_EQ(g.index_of(0.0), 0u);
  EXPECT_THROW(g.index_of(2.005), std::out_of_range);
  EXPECT_THROW(g.index_of(10.01), std::out_of_range);
  const auto r = g.refined(2);
  EXPECT_EQ(r.n_steps(), 2000u);
  EXPECT_DOUBLE_EQ(r.dt(), 0.005);
  EXPECT_DOUBLE_EQ(r.t_end(), g.t_end());
  EXPECT_EQ(g.truncated(50).n_steps(), 50u);
}
