#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ppme/coefficients.hpp"

using namespace ppme;

namespace {

double max_diff_at_end(const CoefficientPath& a, const CoefficientPath& b) {
  const std::size_t ka = a.grid.n_steps(), kb = b.grid.n_steps();
  return std::max({std::abs(a.F2[ka] - b.F2[kb]), std::abs(a.G2[ka] - b.G2[kb]),
                   std::abs(a.Ptilde2[ka] - b.Ptilde2[kb]), std::abs(a.Pfstar[ka] - b.Pfstar[kb])});
}

}  // namespace

TEST(Coefficients, VanishAtZero) {
  const auto c = integrate_coefficients(SystemSpec::three_level(1.0), BathSpec{0.8, 0.05, 0.0},
                                        TimeGrid(5.0, 0.01));
  ASSERT_EQ(c.F2.size(), 501u);
  EXPECT_EQ(c.F2[0], Complex{});
  EXPECT_EQ(c.G2[0], Complex{});
  EXPECT_EQ(c.Ptilde2[0], Complex{});
  EXPECT_EQ(c.Pfstar[0], Complex{});
  EXPECT_NE(c.F2[1], Complex{});
}

TEST(Coefficients, ZeroCouplingIdenticallyZero) {
  const auto c = integrate_coefficients(SystemSpec::three_level(1.0), BathSpec{0.0, 0.3, 0.5},
                                        TimeGrid(10.0, 0.01));
  for (std::size_t k = 0; k < c.grid.size(); ++k) {
    EXPECT_EQ(c.F2[k], Complex{});
    EXPECT_EQ(c.G2[k], Complex{});
    EXPECT_EQ(c.Ptilde2[k], Complex{});
    EXPECT_EQ(c.Pfstar[k], Complex{});
  }
}

TEST(Coefficients, Rk4Order) {
  const auto sys = SystemSpec::three_level(1.0);
  for (const BathSpec& bath : {BathSpec{0.2, 0.2, 0.0}, BathSpec{0.8, 0.05, 0.0}}) {
    const auto c1 = integrate_coefficients(sys, bath, TimeGrid(10.0, 0.2));
    const auto c2 = integrate_coefficients(sys, bath, TimeGrid(10.0, 0.1));
    const auto c4 = integrate_coefficients(sys, bath, TimeGrid(10.0, 0.05));
    const double ratio = max_diff_at_end(c1, c2) / max_diff_at_end(c2, c4);
    EXPECT_GT(ratio, 16.0 * 0.7);
    EXPECT_LT(ratio, 16.0 * 1.3);
  }
}

TEST(Coefficients, MarkovLimit) {
  // With omega = Omega = 0 and fast memory decay, F2 relaxes to a.
  const auto c = integrate_coefficients(SystemSpec::three_level(0.0), BathSpec{0.5, 50.0, 0.0},
                                        TimeGrid(2.0, 0.001));
  for (double t : {0.5, 1.0, 2.0}) {
    const auto k = c.grid.index_of(t);
    EXPECT_NEAR(c.F2[k].real(), 0.5, 0.02 * 0.5) << "t = " << t;
    EXPECT_NEAR(c.F2[k].imag(), 0.0, 0.02 * 0.5);
  }
}

TEST(Coefficients, OverflowGuard) {
  // Bath centred on the transition frequency drives the closure to blow up.
  try {
    integrate_coefficients(SystemSpec::three_level(1.0), BathSpec{0.5, 0.05, 1.0}, TimeGrid(20.0, 0.01));
    FAIL() << "expected blow-up";
  } catch (const NonFiniteError& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 20.0);
  }
}

TEST(Coefficients, PropagationLayout) {
  const auto sys = SystemSpec::three_level(1.0);
  const BathSpec bath{0.2, 0.2, 0.0};
  const TimeGrid grid(2.0, 0.01);
  const auto c = coefficients_for_propagation(sys, bath, grid);
  EXPECT_EQ(c.grid.n_steps(), 400u);
  EXPECT_NO_THROW(require_half_step_layout(c, grid));
  EXPECT_THROW(require_half_step_layout(integrate_coefficients(sys, bath, grid), grid),
               std::invalid_argument);
}

TEST(Coefficients, CsvDump) {
  const auto c = integrate_coefficients(SystemSpec::three_level(1.0), BathSpec{0.2, 0.2, 0.0},
                                        TimeGrid(0.2, 0.1));
  std::ostringstream out;
  write_coefficients_csv(out, c);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,re_F2,im_F2,re_G2,im_G2,re_Ptilde2,im_Ptilde2,re_Pfstar,im_Pfstar");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0,0,0,0,0,0,0,0");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
