#include "llmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "llmc/drift.hpp"
#include "llmc/error.hpp"
#include "llmc/quadrature.hpp"

namespace llmc {

namespace {

quad::Options tight(double scale) {
  quad::Options o;
  o.abs_tol = 1e-14 * scale;
  o.rel_tol = 1e-12;
  o.max_panels = 20000;
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// EmpiricalDistribution

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values)
    : values_(std::move(values)) {
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw PreconditionError("samples must be positive and finite");
    }
  }
  std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::ecdf(double x) const {
  if (values_.empty()) return 0.0;
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::mass_between(double a, double b) const {
  if (values_.empty() || !(b > a)) return 0.0;
  const auto lo = std::upper_bound(values_.begin(), values_.end(), a);
  const auto hi = std::lower_bound(values_.begin(), values_.end(), b);
  return hi > lo ? static_cast<double>(hi - lo) / static_cast<double>(values_.size()) : 0.0;
}

std::vector<std::size_t> EmpiricalDistribution::histogram(double lo, double hi,
                                                          std::size_t bins) const {
  if (bins == 0 || !(hi > lo)) throw PreconditionError("histogram needs bins > 0 and hi > lo");
  std::vector<std::size_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values_) {
    if (v < lo || v > hi) continue;
    auto b = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(b, bins - 1)]++;
  }
  return counts;
}

// ---------------------------------------------------------------------------
// TestFunction

TestFunction::TestFunction(double center, double radius, double amplitude)
    : center_(center), radius_(radius), amplitude_(amplitude) {
  if (!(radius > 0.0) || !(center - radius >= 0.0) || !std::isfinite(center)) {
    throw PreconditionError("bump needs radius > 0 and support inside (0, inf)");
  }
}

double TestFunction::operator()(double x) const {
  const double u = (x - center_) / radius_;
  if (!(std::abs(u) < 1.0)) return 0.0;
  return amplitude_ * std::exp(-1.0 / (1.0 - u * u));
}

double TestFunction::derivative(double x) const {
  const double u = (x - center_) / radius_;
  if (!(std::abs(u) < 1.0)) return 0.0;
  const double q = 1.0 - u * u;
  return amplitude_ * std::exp(-1.0 / q) * (-2.0 * u / (q * q)) / radius_;
}

// ---------------------------------------------------------------------------
// Target CDF

double target_cdf(const TargetDensity& pi, double x) {
  if (!(x > 0.0)) return 0.0;
  const double c = pi.domain_cutoff();
  if (x >= c) return 1.0;
  return pi.integrate(0.0, x, tight(pi.mass())) / pi.mass();
}

TargetCdf::TargetCdf(const TargetDensity& pi, std::size_t cells) : pi_(pi) {
  if (cells < 2) throw PreconditionError("target CDF needs at least 2 cells");
  const double c = pi.domain_cutoff();
  for (std::size_t i = 0; i <= cells; ++i) {
    edges_.push_back(c * static_cast<double>(i) / static_cast<double>(cells));
  }
  for (double b : pi.breakpoints()) {
    if (b < c) edges_.push_back(b);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  edges_.back() = c;
  cumulative_.assign(edges_.size(), 0.0);
  const auto opts = tight(pi.mass());
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    cumulative_[i + 1] = cumulative_[i] + pi.integrate(edges_[i], edges_[i + 1], opts);
  }
  total_ = cumulative_.back();
}

double TargetCdf::partial(std::size_t cell, double x) const {
  return pi_.integrate(edges_[cell], x, tight(total_));
}

double TargetCdf::operator()(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (x >= edges_.back()) return 1.0;
  const auto cell =
      static_cast<std::size_t>(std::upper_bound(edges_.begin(), edges_.end(), x) - edges_.begin()) - 1;
  return std::min(1.0, (cumulative_[cell] + partial(cell, x)) / total_);
}

double TargetCdf::quantile(double p) const {
  if (!(p > 0.0)) return 0.0;
  if (p >= 1.0) return edges_.back();
  const double target = p * total_;
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target);
  const std::size_t cell = std::max<std::size_t>(1, static_cast<std::size_t>(it - cumulative_.begin())) - 1;
  double lo = edges_[cell];
  double hi = edges_[cell + 1];
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cumulative_[cell] + partial(cell, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double ks_distance(const EmpiricalDistribution& samples, const TargetCdf& cdf) {
  const auto v = samples.values();
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_distance(const EmpiricalDistribution& samples, const TargetDensity& pi) {
  return ks_distance(samples, TargetCdf(pi));
}

double histogram_tv(const EmpiricalDistribution& samples, const TargetCdf& cdf, std::size_t bins) {
  if (bins < 2) throw PreconditionError("histogram_tv needs at least 2 bins");
  if (samples.empty()) throw PreconditionError("histogram_tv needs samples");
  const double hi = std::max(cdf.cutoff(), samples.max());
  const auto counts = samples.histogram(0.0, hi, bins);
  const double n = static_cast<double>(samples.size());
  const double width = hi / static_cast<double>(bins);
  double tv = 0.0;
  double left = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double right = cdf(width * static_cast<double>(b + 1));
    tv += std::abs(static_cast<double>(counts[b]) / n - (right - left));
    left = right;
  }
  return std::min(1.0, 0.5 * tv);
}

double histogram_tv(const EmpiricalDistribution& samples, const TargetDensity& pi,
                    std::size_t bins) {
  return histogram_tv(samples, TargetCdf(pi), bins);
}

// ---------------------------------------------------------------------------
// Generator and invariance

double generator_apply(const DriftFunction& phi, const LevyMeasure& mu, const TestFunction& f,
                       double x) {
  double v = 0.0;
  const double df = f.derivative(x);
  if (df != 0.0) v += phi(x) * df;
  const double fx = f(x);
  for (const auto& a : mu.atoms()) v += a.mass * (f(x + a.location) - fx);
  if (mu.has_density()) {
    const double lo = std::max(std::max(0.0, mu.density()->support_lower), f.lower() - x);
    const double hi = std::min(mu.density_upper(), f.upper() - x);
    if (hi > lo) {
      const auto cuts = mu.discontinuities();
      quad::Options o;
      o.abs_tol = 1e-15;
      o.rel_tol = 1e-12;
      o.max_panels = 20000;
      v += quad::integral([&](double z) { return f(x + z) * mu.density_at(z); }, lo, hi, cuts, o);
    }
    v -= fx * mu.density_mass();
  }
  return v;
}

double invariance_residual(const TargetDensity& pi, const LevyMeasure& mu, const TestFunction& f) {
  return invariance_residual(pi, mu, f, [&](double x) { return drift_cp(pi, mu, x); });
}

double invariance_residual(const TargetDensity& pi, const LevyMeasure& mu, const TestFunction& f,
                           const DriftFunction& phi) {
  std::vector<double> cuts(pi.breakpoints().begin(), pi.breakpoints().end());
  cuts.push_back(f.lower());
  for (double m : mu.discontinuities()) {
    cuts.push_back(f.lower() - m);
    cuts.push_back(f.upper() - m);
  }
  if (mu.has_density()) {
    cuts.push_back(f.lower() - mu.density_upper());
    cuts.push_back(f.upper() - mu.density_upper());
  }
  const double mass = pi.mass();
  quad::Options o;
  o.abs_tol = 1e-12 * mass;
  o.rel_tol = 1e-10;
  o.max_panels = 20000;
  const double value = quad::integral(
      [&](double x) { return generator_apply(phi, mu, f, x) * pi(x); }, 0.0, f.upper(), cuts, o);
  return value / mass;
}

std::vector<TestFunction> default_bumps(const TargetCdf& cdf) {
  std::vector<TestFunction> out;
  const double c_max = cdf.cutoff();
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double c = cdf.quantile(p);
    out.emplace_back(c, 0.5 * std::min(c, c_max - c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncation

TruncationReport truncation_report(const TargetDensity& pi, const LevyMeasure& mu,
                                   std::span<const unsigned> n_list, std::span<const double> grid) {
  TruncationReport report;
  std::vector<double> exact(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) exact[i] = drift_cp(pi, mu, grid[i]);
  for (unsigned n : n_list) {
    TruncationRow row;
    row.n = n;
    const double nn = static_cast<double>(n);
    row.tail_mass = mu.mass_outside(1.0 / nn, nn);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      row.sup_error =
          std::max(row.sup_error, std::abs(exact[i] - truncated_drift(pi, mu, n, grid[i])));
    }
    row.ratio = row.tail_mass > 0.0 ? row.sup_error / row.tail_mass : 0.0;
    report.rows.push_back(row);
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].sup_error > report.rows[i - 1].sup_error) report.monotone = false;
    if (report.rows[i].ratio > 1.5 * report.rows.front().ratio) report.ratio_bounded = false;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Modes and autocorrelation

std::vector<double> find_modes(const EmpiricalDistribution& samples, double bandwidth,
                               std::size_t count, double min_separation) {
  if (samples.empty()) return {};
  if (!(bandwidth > 0.0)) throw PreconditionError("bandwidth must be positive");
  const double step = bandwidth / 10.0;
  const double lo = std::max(0.0, samples.min() - 4.0 * bandwidth);
  const double hi = samples.max() + 4.0 * bandwidth;
  const auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  std::vector<double> counts(bins, 0.0);
  for (double v : samples.values()) {
    counts[std::min(bins - 1, static_cast<std::size_t>((v - lo) / step))] += 1.0;
  }
  const auto reach = static_cast<std::ptrdiff_t>(40);  // 4 bandwidths in bins
  std::vector<double> kernel(2 * reach + 1);
  for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
    const double u = static_cast<double>(k) * step / bandwidth;
    kernel[k + reach] = std::exp(-0.5 * u * u);
  }
  std::vector<double> density(bins, 0.0);
  for (std::size_t i = 0; i < bins; ++i) {
    if (counts[i] == 0.0) continue;
    for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
      const auto j = static_cast<std::ptrdiff_t>(i) + k;
      if (j >= 0 && j < static_cast<std::ptrdiff_t>(bins)) density[j] += counts[i] * kernel[k + reach];
    }
  }
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < bins; ++i) {
    if (density[i] > density[i - 1] && density[i] >= density[i + 1]) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(),
            [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });
  std::vector<double> modes;
  for (std::size_t i : peaks) {
    const double x = lo + (static_cast<double>(i) + 0.5) * step;
    const bool separated = std::all_of(modes.begin(), modes.end(), [&](double m) {
      return std::abs(m - x) >= min_separation;
    });
    if (separated) modes.push_back(x);
    if (modes.size() == count) break;
  }
  std::sort(modes.begin(), modes.end());
  return modes;
}

double autocorrelation(std::span<const double> series, std::size_t lag) {
  if (series.size() <= lag + 1) throw PreconditionError("series too short for the lag");
  const double n = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  if (var == 0.0) return 0.0;
  double cov = 0.0;
  for (std::size_t i = 0; i + lag < series.size(); ++i) {
    cov += (series[i] - mean) * (series[i + lag] - mean);
  }
  return cov / var;
}

}  // namespace llmc
