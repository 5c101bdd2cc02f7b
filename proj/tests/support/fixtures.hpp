#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "llmc/catalog.hpp"
#include "llmc/measure.hpp"

namespace llmc::testing {

inline TargetDensity exp_target() {
  return TargetDensity([](double x) { return std::exp(-x); }, {});
}

inline LevyMeasure exp_measure() {
  return LevyMeasure({}, JumpDensity{[](double z) { return std::exp(-z); },
                                     [](double z) { return std::exp(-z); }, 0.0,
                                     std::numeric_limits<double>::infinity(), {}});
}

inline LevyMeasure atom(double location, double mass = 1.0) {
  return LevyMeasure({{location, mass}});
}

inline Problem example_problem(const std::string& id) { return build_problem(example(id)); }

/// Boost Gauss-Kronrod over consecutive cuts, used as an independent oracle.
template <class F>
double oracle_integral(F f, std::vector<double> cuts) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1],
                                                                         20, 1e-13);
  }
  return sum;
}

/// Log-spaced grid of n points on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) /
                                       static_cast<double>(n - 1));
  }
  return g;
}

/// Asymptotic Kolmogorov critical value at the 1% level.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("llmc_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace llmc::testing
