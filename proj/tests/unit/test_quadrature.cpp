#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "llmc/error.hpp"
#include "llmc/quadrature.hpp"

namespace {

using llmc::quad::integral;
using llmc::quad::integrate;
using llmc::testing::oracle_integral;

TEST(Quadrature, PolynomialIsExact) {
  const double v = integral([](double x) { return 3 * x * x - 2 * x + 1; }, -1.0, 2.0);
  EXPECT_NEAR(v, 9.0 - 3.0 + 3.0, 1e-13);
}

TEST(Quadrature, ExponentialMatchesClosedForm) {
  const double v = integral([](double x) { return std::exp(-x); }, 0.0, 30.0);
  EXPECT_NEAR(v, 1.0 - std::exp(-30.0), 1e-12);
}

TEST(Quadrature, StepFunctionExactWithBreakpoint) {
  const std::vector<double> cuts{std::sqrt(2.0)};
  auto step = [](double x) { return x < std::sqrt(2.0) ? 1.0 : 3.0; };
  EXPECT_NEAR(integral(step, 0.0, 2.0, cuts), std::sqrt(2.0) + 3.0 * (2.0 - std::sqrt(2.0)),
              1e-14);
}

TEST(Quadrature, AgreesWithGaussKronrodOracle) {
  auto f = [](double x) { return std::sin(3 * x) * std::exp(-x * x) + std::sqrt(x); };
  const llmc::quad::Options tight{1e-14, 1e-13, 4000};
  EXPECT_NEAR(integral(f, 0.0, 5.0, {}, tight), oracle_integral(f, {0.0, 5.0}), 1e-11);
}

TEST(Quadrature, BreakpointsOutsideRangeIgnored) {
  const std::vector<double> cuts{-5.0, 0.0, 1.0, 7.0};
  EXPECT_NEAR(integral([](double x) { return x; }, 0.0, 1.0, cuts), 0.5, 1e-15);
}

TEST(Quadrature, EmptyIntervalIsZero) {
  const auto r = integrate([](double) { return 1.0; }, 2.0, 2.0);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.panels, 0u);
}

TEST(Quadrature, PanelBudgetExhaustionThrows) {
  const llmc::quad::Options opts{1e-15, 1e-15, 4};
  auto wild = [](double x) { return std::sin(200 * x); };
  EXPECT_THROW(integral(wild, 0.0, 10.0, {}, opts), llmc::QuadratureError);
}

TEST(Quadrature, ResultIndependentOfBreakpointOrder) {
  auto f = [](double x) { return std::floor(x) * std::cos(x); };
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{3.0, 1.0, 2.0, 2.0};
  EXPECT_EQ(integral(f, 0.0, 4.0, a), integral(f, 0.0, 4.0, b));
}

}  // namespace
