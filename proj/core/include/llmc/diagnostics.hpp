#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "llmc/empirical.hpp"
#include "llmc/measure.hpp"

namespace llmc {

/// Smooth bump amplitude * exp(-1 / (1 - u^2)) with u = (x - center) / radius,
/// zero for |u| >= 1.
class TestFunction {
 public:
  /// Throws PreconditionError unless radius > 0 and center - radius >= 0.
  TestFunction(double center, double radius, double amplitude = 1.0);

  double operator()(double x) const;
  double derivative(double x) const;

  double center() const { return center_; }
  double radius() const { return radius_; }
  double amplitude() const { return amplitude_; }
  double lower() const { return center_ - radius_; }
  double upper() const { return center_ + radius_; }

 private:
  double center_;
  double radius_;
  double amplitude_;
};

/// pi(0, x] / pi(0, cutoff] by quadrature.
double target_cdf(const TargetDensity& pi, double x);

/// Normalised target CDF backed by cumulative masses on a fine cell grid;
/// each query integrates only inside one cell.
class TargetCdf {
 public:
  explicit TargetCdf(const TargetDensity& pi, std::size_t cells = 2048);

  double operator()(double x) const;
  /// Smallest x with F(x) >= p, to about 1e-12 relative.
  double quantile(double p) const;
  double cutoff() const { return edges_.back(); }
  const TargetDensity& target() const { return pi_; }

 private:
  TargetDensity pi_;
  std::vector<double> edges_;
  std::vector<double> cumulative_;
  double total_ = 0.0;

  double partial(std::size_t cell, double x) const;
};

/// sup_x |F_n(x) - F(x)|, checked on both sides of every sample.
double ks_distance(const EmpiricalDistribution& samples, const TargetCdf& cdf);
double ks_distance(const EmpiricalDistribution& samples, const TargetDensity& pi);

/// Half the L1 distance between binned empirical and target masses over
/// equal-width bins spanning [0, max(cutoff, largest sample)].
double histogram_tv(const EmpiricalDistribution& samples, const TargetCdf& cdf, std::size_t bins);
double histogram_tv(const EmpiricalDistribution& samples, const TargetDensity& pi,
                    std::size_t bins);

using DriftFunction = std::function<double(double)>;

/// (A f)(x) = phi(x) f'(x) + int (f(x + z) - f(x)) mu(dz). phi is only
/// evaluated where f'(x) != 0.
double generator_apply(const DriftFunction& phi, const LevyMeasure& mu, const TestFunction& f,
                       double x);

/// int_0^cutoff (A f)(x) pi(x) dx / int pi with phi = drift_cp.
double invariance_residual(const TargetDensity& pi, const LevyMeasure& mu, const TestFunction& f);
/// Same with a caller-supplied drift, e.g. a deliberately wrong one.
double invariance_residual(const TargetDensity& pi, const LevyMeasure& mu, const TestFunction& f,
                           const DriftFunction& phi);

/// Five bumps centred at the 10/30/50/70/90% target quantiles, each with
/// radius half the distance to the nearer end of (0, cutoff).
std::vector<TestFunction> default_bumps(const TargetCdf& cdf);

struct TruncationRow {
  unsigned n = 0;
  double sup_error = 0.0;
  /// mu((0, 1/n] U [n, inf)).
  double tail_mass = 0.0;
  /// sup_error / tail_mass, or 0 when the tail mass is 0.
  double ratio = 0.0;
};

struct TruncationReport {
  std::vector<TruncationRow> rows;
  /// sup_error non-increasing in n.
  bool monotone = true;
  /// Every ratio within 1.5x of the ratio at the smallest n.
  bool ratio_bounded = true;
};

TruncationReport truncation_report(const TargetDensity& pi, const LevyMeasure& mu,
                                   std::span<const unsigned> n_list, std::span<const double> grid);

/// Locations of the `count` highest local maxima of a Gaussian kernel
/// density estimate, at least `min_separation` apart, in ascending order.
std::vector<double> find_modes(const EmpiricalDistribution& samples, double bandwidth = 0.1,
                               std::size_t count = 2, double min_separation = 1.0);

/// Lag-k sample autocorrelation of a series in recording order.
double autocorrelation(std::span<const double> series, std::size_t lag);

}  // namespace llmc
