#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "llmc/drift.hpp"
#include "llmc/drift_field.hpp"
#include "llmc/error.hpp"
#include "llmc/random.hpp"

namespace {

using namespace llmc;
using llmc::testing::example_problem;

TEST(DriftField, RejectsTinyTables) {
  EXPECT_THROW(build_drift_table(llmc::testing::exp_target(), llmc::testing::exp_measure(), 32),
               PreconditionError);
}

TEST(DriftField, ExponentialPairIsExactToRoundoff) {
  const auto field = build_drift_table(llmc::testing::exp_target(), llmc::testing::exp_measure());
  EXPECT_GE(field.grid().size(), 512u);
  EXPECT_FALSE(field.accuracy_warning());
  llmc::RandomStream rng(3, 0);
  for (int i = 0; i < 500; ++i) {
    const double x = 1e-6 + rng.uniform() * 36.0;
    EXPECT_NEAR(field(x), -x, 1e-10 * std::max(1.0, x)) << x;
  }
}

class FieldExamples : public ::testing::TestWithParam<const char*> {};

TEST_P(FieldExamples, InterpolantTracksExactDrift) {
  const auto p = example_problem(GetParam());
  const auto field = build_drift_table(p.pi, p.mu);
  EXPECT_LT(field.validation_error(), 1e-4);
  llmc::RandomStream rng(17, 1);
  const double hi = field.grid_max();
  for (int i = 0; i < 400; ++i) {
    const double x = i % 2 ? std::exp(std::log(1e-6) + rng.uniform() * (std::log(hi) - std::log(1e-6)))
                           : rng.uniform() * hi;
    if (!(x > 0.0)) continue;
    const double exact = drift_cp(p.pi, p.mu, x);
    EXPECT_LT(std::abs(field(x) - exact), 1e-4 * std::abs(exact)) << x;
  }
}

TEST_P(FieldExamples, ValuesNegativeAndGridSorted) {
  const auto p = example_problem(GetParam());
  const auto field = build_drift_table(p.pi, p.mu, 128);
  const auto g = field.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    ASSERT_LT(field.values()[i], 0.0);
    if (i > 0) ASSERT_GT(g[i], g[i - 1]);
  }
}

TEST_P(FieldExamples, OutsideGridBehaviour) {
  const auto p = example_problem(GetParam());
  const auto field = build_drift_table(p.pi, p.mu, 128);
  EXPECT_EQ(field(1e-8), field.exact(1e-8));
  EXPECT_EQ(field(2.0 * field.grid_max()), field.values().back());
}

INSTANTIATE_TEST_SUITE_P(Examples, FieldExamples,
                         ::testing::Values("double-well", "non-smooth"));

TEST(DriftField, JumpOfTargetIsResolved) {
  const auto p = example_problem("non-smooth");
  const auto field = build_drift_table(p.pi, p.mu);
  for (double b : {2.0, 4.0}) {
    for (double x : {b - 1e-3, b + 1e-3}) {
      const double exact = drift_cp(p.pi, p.mu, x);
      EXPECT_LT(std::abs(field(x) - exact), 1e-4 * std::abs(exact)) << x;
    }
  }
}

TEST(DriftField, ThreadCountDoesNotChangeTable) {
  const auto p = example_problem("double-well");
  DriftTableOptions one;
  one.threads = 1;
  DriftTableOptions many;
  many.threads = 4;
  const auto a = build_drift_table(p.pi, p.mu, 256, one);
  const auto b = build_drift_table(p.pi, p.mu, 256, many);
  ASSERT_EQ(a.grid().size(), b.grid().size());
  for (std::size_t i = 0; i < a.grid().size(); ++i) {
    EXPECT_EQ(a.grid()[i], b.grid()[i]);
    EXPECT_EQ(a.values()[i], b.values()[i]);
  }
}

TEST(DriftField, CsvRows) {
  const auto field = build_drift_table(llmc::testing::exp_target(), llmc::testing::exp_measure(), 128);
  std::ostringstream nodes;
  field.write_csv(nodes);
  std::ostringstream rows;
  field.write_csv(rows, 100);
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
  EXPECT_EQ(count(nodes.str()), static_cast<long>(field.grid().size()) + 1);
  EXPECT_EQ(count(rows.str()), 101);
  EXPECT_EQ(rows.str().rfind("x,phi\n", 0), 0u);
}

}  // namespace
