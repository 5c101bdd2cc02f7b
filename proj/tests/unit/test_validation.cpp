#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "llmc/validation.hpp"

namespace {

using namespace llmc;
using llmc::testing::example_problem;

Verdict verdict_of(const ValidationReport& r, const std::string& check) {
  const Finding* f = r.find(check);
  EXPECT_NE(f, nullptr) << check;
  return f ? f->verdict : Verdict::Fail;
}

TEST(ValidateB1, NonSmoothPassesWithHalfRate) {
  const auto r = validate_b1(example_problem("non-smooth").pi);
  EXPECT_EQ(r.overall(), Verdict::Pass);
  const Finding* tail = r.find("tail");
  ASSERT_NE(tail, nullptr);
  ASSERT_TRUE(tail->value.has_value());
  EXPECT_NEAR(*tail->value, 0.5, 0.02);
}

TEST(ValidateB1, ExponentialPassesWithUnitRate) {
  const auto r = validate_b1(llmc::testing::exp_target());
  EXPECT_EQ(r.overall(), Verdict::Pass);
  EXPECT_NEAR(*r.find("tail")->value, 1.0, 0.02);
}

TEST(ValidateB1, QuarticExponentWarnsOnTail) {
  const auto r = validate_b1(example_problem("double-well").pi);
  EXPECT_EQ(verdict_of(r, "tail"), Verdict::Warn);
  EXPECT_EQ(verdict_of(r, "origin"), Verdict::Pass);
  EXPECT_EQ(verdict_of(r, "positivity"), Verdict::Pass);
  EXPECT_EQ(r.overall(), Verdict::Warn);
}

TEST(ValidateB1, PolynomialTailFails) {
  const TargetDensity pi([](double x) { return 1.0 / std::pow(1.0 + x, 3); }, {});
  EXPECT_EQ(verdict_of(validate_b1(pi), "tail"), Verdict::Fail);
}

TEST(ValidateB1, IntegrableSingularityAtOriginPasses) {
  // int_0^x z^-0.9 dz / (x * x^-0.9) = 10.
  const TargetDensity pi([](double x) { return std::pow(x, -0.9) * std::exp(-x); }, {});
  const auto r = validate_b1(pi);
  EXPECT_EQ(verdict_of(r, "origin"), Verdict::Pass);
  EXPECT_NEAR(*r.find("origin")->value, 10.0, 1.5);
}

TEST(ValidateB1, InteriorGapFailsPositivity) {
  const auto pi = build_target({"exp(-x) * (indicator(0, 1.2) + indicator(1.5, 60))", {}, {}, {}});
  EXPECT_EQ(verdict_of(validate_b1(pi), "positivity"), Verdict::Fail);
}

TEST(ValidateB2, BuiltInMeasuresPass) {
  for (const char* id : {"double-well", "non-smooth", "exponential"}) {
    EXPECT_EQ(validate_b2(example_problem(id).mu).overall(), Verdict::Pass) << id;
  }
}

TEST(ValidateB2, NegativeAtomFailsSupport) {
  const auto r = validate_b2(LevyMeasure({{-1.0, 1.0}}));
  EXPECT_EQ(verdict_of(r, "support"), Verdict::Fail);
  EXPECT_EQ(r.overall(), Verdict::Fail);
}

TEST(ValidateB2, DensityReachingNegativeJumpsFails) {
  const LevyMeasure mu({}, JumpDensity{[](double) { return 1.0; }, {}, -1.0, 1.0, {}});
  EXPECT_EQ(verdict_of(validate_b2(mu), "support"), Verdict::Fail);
}

TEST(ValidateB2, InfiniteMomentFails) {
  const LevyMeasure mu({}, JumpDensity{[](double z) { return 1.0 / ((1 + z) * (1 + z)); }, {}, 0.0,
                                       std::numeric_limits<double>::infinity(), {}});
  const auto r = validate_b2(mu);
  EXPECT_EQ(verdict_of(r, "mass"), Verdict::Pass);
  EXPECT_EQ(verdict_of(r, "moment"), Verdict::Fail);
}

TEST(CheckC1, CompactSupportAwayFromZero) {
  const auto f = check_c1(LevyMeasure({{0.5, 1.0}, {3.0, 1.0}}));
  EXPECT_EQ(f.verdict, Verdict::Pass);
  ASSERT_TRUE(f.value.has_value());
  EXPECT_EQ(*f.value, 4.0);
  EXPECT_EQ(check_c1(llmc::testing::exp_measure()).verdict, Verdict::Fail);
}

TEST(CheckC2, PiecewiseLipschitzTargets) {
  EXPECT_EQ(check_c2(example_problem("non-smooth").pi).verdict, Verdict::Pass);
  EXPECT_EQ(check_c2(example_problem("double-well").pi).verdict, Verdict::Pass);
  EXPECT_EQ(check_c2(llmc::testing::exp_target()).verdict, Verdict::Pass);
}

TEST(Verdict, Names) {
  EXPECT_STREQ(to_string(Verdict::Pass), "PASS");
  EXPECT_STREQ(to_string(Verdict::Warn), "WARN");
  EXPECT_STREQ(to_string(Verdict::Fail), "FAIL");
  EXPECT_EQ(ValidationReport{}.overall(), Verdict::Pass);
}

}  // namespace
