#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "fixtures.hpp"
#include "llmc/error.hpp"
#include "llmc/measure.hpp"
#include "llmc/random.hpp"

namespace {

using namespace llmc;
using llmc::testing::example_problem;
using llmc::testing::exp_measure;
using llmc::testing::exp_target;
using llmc::testing::oracle_integral;

TEST(TargetDensity, CutoffForExponential) {
  const auto pi = exp_target();
  EXPECT_NEAR(pi.domain_cutoff(), 16.0 * std::log(10.0), 1e-3);
  EXPECT_TRUE(pi.cutoff_resolved());
  EXPECT_NEAR(pi.mass(), 1.0, 1e-12);
  EXPECT_EQ(pi(0.0), 0.0);
  EXPECT_EQ(pi(-1.0), 0.0);
}

TEST(TargetDensity, ExplicitCutoffIsKept) {
  const TargetDensity pi([](double x) { return std::exp(-x); }, {}, std::nullopt, 10.0);
  EXPECT_EQ(pi.domain_cutoff(), 10.0);
  EXPECT_NEAR(pi.mass(), 1.0 - std::exp(-10.0), 1e-12);
}

TEST(TargetDensity, NonSmoothMassMatchesClosedForm) {
  const auto p = example_problem("non-smooth");
  const double c = p.pi.domain_cutoff();
  EXPECT_NEAR(p.pi.mass(), 2.0 * (1.0 - std::exp(-0.5 * c)) + 2.0, 1e-9);
  EXPECT_NEAR(p.pi.integrate(1.0, 5.0),
              2.0 * (std::exp(-0.5) - std::exp(-2.5)) + 2.0, 1e-10);
}

TEST(TargetDensity, DoubleWellMassAgreesWithOracle) {
  const auto p = example_problem("double-well");
  auto f = [&](double x) { return p.pi(x); };
  const double c = p.pi.domain_cutoff();
  const double oracle = oracle_integral(f, {0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 9.0, c});
  EXPECT_NEAR(p.pi.mass() / oracle, 1.0, 1e-9);
}

TEST(TargetDensity, EvaluationFailureBecomesMalformedDensity) {
  EXPECT_THROW(build_target({"ln(x - 1)", {}, {}, {}}), MalformedDensity);
  EXPECT_THROW(build_target({"exp(0.1*x*(x-4)*(x-6.02)*(x-10)+0.5)", {}, {}, {}}),
               MalformedDensity);
}

TEST(LevyMeasure, TailOfAtomsAndDensity) {
  const auto mu = example_problem("double-well").mu;
  EXPECT_NEAR(mu.integrated_tail(5.0), 2.0 + std::exp(-5.0), 1e-14);
  // Atoms count only when strictly above x.
  EXPECT_NEAR(mu.integrated_tail(4.0), 2.0 + std::exp(-4.0), 1e-14);
  EXPECT_NEAR(mu.integrated_tail(8.0), std::exp(-8.0), 1e-14);
  EXPECT_DOUBLE_EQ(mu.total_mass(), 4.0);
  EXPECT_NEAR(mu.first_moment(), 4.0 + 16.0 + 1.0, 1e-10);
  EXPECT_NEAR(mu.mean_jump(), 21.0 / 4.0, 1e-10);
  EXPECT_EQ(signed_integrated_tail(mu, -1.0), 0.0);
  EXPECT_EQ(signed_integrated_tail(mu, 0.0), 0.0);
  EXPECT_EQ(signed_integrated_tail(mu, 2.0), mu.integrated_tail(2.0));
}

TEST(LevyMeasure, NumericTailMatchesClosedForm) {
  const LevyMeasure numeric(
      {}, JumpDensity{[](double z) { return z * z * std::exp(-0.5 * z); }, {}, 0.0,
                      std::numeric_limits<double>::infinity(), {}});
  for (double z : {0.01, 0.5, 1.0, 3.0, 10.0, 40.0}) {
    const double closed = std::exp(-0.5 * z) * (2 * z * z + 8 * z + 16);
    EXPECT_NEAR(numeric.density_tail(z), closed, 1e-9 * std::max(closed, 1e-3)) << z;
  }
  EXPECT_NEAR(numeric.density_mass(), 16.0, 1e-8);
}

TEST(LevyMeasure, RestrictionAndOutsideMass) {
  const auto mu = exp_measure();
  const auto r = mu.restricted(0.5, 2.0);
  EXPECT_NEAR(r.total_mass(), std::exp(-0.5) - std::exp(-2.0), 1e-12);
  EXPECT_NEAR(mu.mass_outside(0.5, 2.0), 1.0 - (std::exp(-0.5) - std::exp(-2.0)), 1e-12);
  EXPECT_EQ(r.integrated_tail(3.0), 0.0);

  const LevyMeasure atoms({{4.0, 1.0}, {8.0, 2.0}});
  EXPECT_DOUBLE_EQ(atoms.restricted(0.1, 10.0).total_mass(), 3.0);
  EXPECT_TRUE(atoms.restricted(0.5, 2.0).is_zero());
  EXPECT_DOUBLE_EQ(atoms.mass_outside(0.5, 2.0), 3.0);
}

TEST(LevyMeasure, NonSmoothTailMassAgainstIncompleteGamma) {
  const auto mu = example_problem("non-smooth").mu;
  // int_0^{1/2} z^2 e^{-z/2} dz + int_2^inf z^2 e^{-z/2} dz; the atom at 1 is retained.
  // With z = 2u each piece is 8 Gamma(3) times a regularised incomplete gamma.
  const double expected =
      16.0 * (boost::math::gamma_p(3.0, 0.25) + boost::math::gamma_q(3.0, 1.0));
  EXPECT_NEAR(mu.mass_outside(0.5, 2.0), expected, 1e-10);
}

TEST(LevyMeasure, AssumptionViolationsAreReportedNotThrownAtConstruction) {
  const LevyMeasure negative({{-1.0, 1.0}});
  EXPECT_THROW(negative.require_valid(), InvalidMeasure);

  const LevyMeasure heavy({}, JumpDensity{[](double z) { return 1.0 / ((1 + z) * (1 + z)); }, {},
                                          0.0, std::numeric_limits<double>::infinity(), {}});
  EXPECT_TRUE(heavy.mass_finite());
  EXPECT_FALSE(heavy.moment_finite());
  EXPECT_THROW(heavy.mean_jump(), AssumptionViolation);
  EXPECT_THROW(heavy.require_valid(), InvalidMeasure);

  const LevyMeasure zero;
  EXPECT_TRUE(zero.is_zero());
  EXPECT_THROW(zero.total_mass(), InvalidMeasure);
}

TEST(LevyMeasure, DoubleIntegratedTail) {
  const auto mu = exp_measure();
  for (double x : {0.1, 1.0, 5.0}) {
    EXPECT_NEAR(double_integrated_tail(mu, x), std::exp(-x), 1e-10);
  }
  EXPECT_EQ(double_integrated_tail(mu, -1.0), 0.0);
  EXPECT_NEAR(double_integrated_tail(llmc::testing::atom(1.0), 0.25), 0.75, 1e-12);
}

TEST(LevyMeasure, DiscontinuitiesListed) {
  const auto d = example_problem("double-well").mu.discontinuities();
  EXPECT_NE(std::find(d.begin(), d.end(), 4.0), d.end());
  EXPECT_NE(std::find(d.begin(), d.end(), 8.0), d.end());
}

// Properties over the built-in measures.

class MeasureProperty : public ::testing::TestWithParam<const char*> {};

TEST_P(MeasureProperty, TailIsNonIncreasingAndStartsAtTotalMass) {
  const auto mu = example_problem(GetParam()).mu;
  llmc::RandomStream rng(11, 0);
  std::vector<double> xs(2000);
  for (auto& x : xs) x = 30.0 * rng.uniform();
  std::sort(xs.begin(), xs.end());
  double prev = mu.integrated_tail(1e-12);
  EXPECT_NEAR(prev, mu.total_mass(), 1e-9);
  for (double x : xs) {
    const double t = mu.integrated_tail(x);
    ASSERT_LE(t, prev + 1e-15) << x;
    ASSERT_GE(t, 0.0);
    prev = t;
  }
}

TEST_P(MeasureProperty, TailIntegratesToFirstMoment) {
  const auto mu = example_problem(GetParam()).mu;
  std::vector<double> cuts{0.0};
  for (double d : mu.discontinuities()) {
    if (d > 0.0) cuts.push_back(d);
  }
  cuts.push_back(200.0);
  std::sort(cuts.begin(), cuts.end());
  const double integral = oracle_integral([&](double x) { return mu.integrated_tail(x); }, cuts);
  EXPECT_NEAR(integral / mu.first_moment(), 1.0, 1e-8);
}

TEST_P(MeasureProperty, SamplesFollowNormalisedMeasure) {
  const auto mu = example_problem(GetParam()).mu;
  llmc::RandomStream rng(99, 3);
  const std::size_t n = 20000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = sample_jump(mu, rng);
  std::sort(draws.begin(), draws.end());
  ASSERT_GT(draws.front(), 0.0);
  // With atoms the exact CDF jumps; the continuous-case critical value is
  // conservative for such laws.
  const double total = mu.total_mass();
  auto cdf = [&](double x) { return 1.0 - mu.integrated_tail(x) / total; };
  auto cdf_left = [&](double x) { return 1.0 - mu.integrated_tail(std::nextafter(x, 0.0)) / total; };
  // Compare at distinct values: below a tie block against F(x-), after it
  // against F(x).
  double d = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && draws[j] == draws[i]) ++j;
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(j) / n;
    d = std::max({d, std::abs(hi - cdf(draws[i])), std::abs(lo - cdf_left(draws[i]))});
    i = j;
  }
  EXPECT_LT(d, llmc::testing::ks_critical_1pct(n));
}

INSTANTIATE_TEST_SUITE_P(Examples, MeasureProperty,
                         ::testing::Values("double-well", "non-smooth", "exponential"));

TEST(LevyMeasure, AtomFrequencies) {
  const auto mu = example_problem("double-well").mu;
  llmc::RandomStream rng(5, 0);
  const int n = 40000;
  int at4 = 0;
  int at8 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = mu.sample(rng);
    at4 += z == 4.0;
    at8 += z == 8.0;
  }
  // Binomial standard errors are about 0.0022 and 0.0025.
  EXPECT_NEAR(at4 / double(n), 0.25, 0.01);
  EXPECT_NEAR(at8 / double(n), 0.5, 0.01);
}

}  // namespace
