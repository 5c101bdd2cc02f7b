#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "llmc/catalog.hpp"
#include "llmc/error.hpp"
#include "llmc/io.hpp"
#include "llmc/random.hpp"

namespace {

using namespace llmc;

TEST(Catalog, ExampleIds) {
  const auto ids = example_ids();
  EXPECT_EQ(ids.size(), 3u);
  EXPECT_THROW(example("nope"), PreconditionError);
  EXPECT_EQ(example("double-well").name, "double-well");
}

TEST(Catalog, RawSignDoubleWellIsNotADensity) {
  EXPECT_THROW(build_target(example("double-well", true).target), MalformedDensity);
}

// Derivative of -0.1 x (x-4)(x-6.02)(x-10) by the product rule.
double exponent_slope(double x) {
  const double r[4] = {0.0, 4.0, 6.02, 10.0};
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double prod = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) prod *= x - r[j];
    }
    s += prod;
  }
  return -0.1 * s;
}

double slope_root(double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (exponent_slope(lo) > 0) == (exponent_slope(mid) > 0) ? lo = mid : hi = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(Catalog, DoubleWellModesOfTarget) {
  const auto p = llmc::testing::example_problem("double-well");
  std::vector<double> maxima;
  const double h = 1e-4;
  for (double x = h; x < 10.5; x += h) {
    if (p.pi(x) > p.pi(x - h) && p.pi(x) >= p.pi(x + h)) maxima.push_back(x);
  }
  ASSERT_EQ(maxima.size(), 2u);
  const double m1 = slope_root(0.5, 3.0);
  const double m2 = slope_root(7.0, 10.0);
  EXPECT_NEAR(maxima[0], m1, 2e-4);
  EXPECT_NEAR(maxima[1], m2, 2e-4);
  // The reference modes were read off a plot; the exact maxima sit within 0.015.
  EXPECT_NEAR(m1, kDoubleWellModes[0], 0.015);
  EXPECT_NEAR(m2, kDoubleWellModes[1], 0.015);
}

TEST(Catalog, PlateauMassAgainstQuadrature) {
  const auto p = llmc::testing::example_problem("non-smooth");
  const double inside =
      llmc::testing::oracle_integral([&](double x) { return p.pi(x); }, {2.0, 4.0}) / p.pi.mass();
  EXPECT_NEAR(non_smooth_plateau_mass(), inside, 1e-10);
  EXPECT_NEAR(non_smooth_plateau_mass(), 0.61627, 1e-5);
}

TEST(Catalog, ExtraBreakpointsMerged) {
  const auto pi = build_target({"exp(-x) + indicator(2, 4)", {3.0, 2.0}, {}, {}});
  const auto b = pi.breakpoints();
  EXPECT_EQ(std::vector<double>(b.begin(), b.end()), (std::vector<double>{2.0, 3.0, 4.0}));
}

TEST(Io, FormatNumberRoundTrips) {
  llmc::RandomStream rng(31, 0);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::exp(80.0 * rng.uniform() - 40.0) * (rng.uniform() < 0.5 ? -1 : 1);
    const std::string s = format_number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    ASSERT_EQ(back, v) << s;
  }
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(Io, SamplesCsv) {
  std::ostringstream os;
  const std::vector<double> v{1.5, 0.25};
  write_samples_csv(os, v);
  EXPECT_EQ(os.str(), "x\n1.5\n0.25\n");
}

TEST(Io, HistogramCsvIntegratesToInsideFraction) {
  const EmpiricalDistribution e({0.5, 1.5, 1.6, 2.5, 9.0});
  std::ostringstream os;
  write_histogram_csv(os, e, 0.0, 3.0, 3);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "bin_left,bin_right,density");
  double total = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    double l = 0, r = 0, d = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    ls >> l >> c1 >> r >> c2 >> d;
    total += (r - l) * d;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
  EXPECT_NEAR(total, 0.8, 1e-12);
}

TEST(Io, TrajectoryCsv) {
  Trajectory tr;
  tr.times = {0.0, 1.0};
  tr.states = {1.0, 2.5};
  tr.jump_flags = {0, 1};
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  EXPECT_EQ(os.str(), "time,state,jump_flag\n0,1,0\n1,2.5,1\n");
}

}  // namespace
