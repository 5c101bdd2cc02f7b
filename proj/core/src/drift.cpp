#include "llmc/drift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "llmc/error.hpp"

namespace llmc {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

quad::Options ratio_options(double pi_x) {
  quad::Options o;
  o.abs_tol = 1e-10 * pi_x;
  o.rel_tol = 1e-8;
  o.max_panels = 20000;
  return o;
}

double checked_pi(const TargetDensity& pi, double x) {
  if (!(x > 0.0)) throw PreconditionError("drift requires x > 0, got " + fmt(x));
  const double p = pi(x);
  if (!(p > 0.0)) throw DegenerateDensity("pi vanishes at interior point x=" + fmt(x));
  return p;
}

double checked_ratio(double numerator, double pi_x, double x) {
  const double r = numerator / pi_x;
  if (!std::isfinite(r)) {
    const std::string cause = std::isfinite(numerator)
                                  ? "pi(x)=" + fmt(pi_x) + " underflows"
                                  : "convolution overflows (" + fmt(numerator) + ")";
    throw DriftOverflow("drift is not finite at x=" + fmt(x) + ": " + cause);
  }
  return r;
}

// Panel boundaries for int_0^x g(z) pi(x - z) dz where g jumps at `marks`.
std::vector<double> convolution_cuts(const TargetDensity& pi, std::span<const double> marks,
                                     double x) {
  std::vector<double> cuts;
  for (double b : pi.breakpoints()) {
    if (b < x) cuts.push_back(x - b);
  }
  for (double m : marks) {
    if (m > 0.0 && m < x) cuts.push_back(m);
  }
  return cuts;
}

}  // namespace

double tail_convolution(const LevyMeasure& mu, const TargetDensity& pi, double x) {
  const double pi_x = checked_pi(pi, x);
  const auto marks = mu.discontinuities();
  const auto cuts = convolution_cuts(pi, marks, x);
  auto integrand = [&](double z) { return mu.integrated_tail(z) * pi(x - z); };
  return quad::integral(integrand, 0.0, x, cuts, ratio_options(pi_x));
}

double drift_cp(const TargetDensity& pi, const LevyMeasure& mu, double x) {
  const double pi_x = checked_pi(pi, x);
  return -checked_ratio(tail_convolution(mu, pi, x), pi_x, x);
}

double drift_alt(const TargetDensity& pi, const LevyMeasure& mu, double x) {
  const double pi_x = checked_pi(pi, x);
  const double total = mu.total_mass();
  const auto atoms = mu.atoms();
  const auto marks = mu.discontinuities();
  const auto pi_bps = pi.breakpoints();

  // (mu * pi)(z) has kinks or jumps at b, a_i, a_i + b and d_k + b.
  std::vector<double> outer_cuts(pi_bps.begin(), pi_bps.end());
  for (double m : marks) {
    outer_cuts.push_back(m);
    for (double b : pi_bps) outer_cuts.push_back(m + b);
  }

  // The integrand terms are of size |mu| pi while the result is of size
  // pi(x) |phi(x)|, so far in the tail the tolerance has a round-off floor.
  quad::Options outer = ratio_options(pi_x);
  outer.abs_tol = std::max(1e-11 * pi_x, 1e-14 * total * pi.mass());
  outer.rel_tol = 1e-10;
  quad::Options inner;
  inner.abs_tol = 1e-12 * pi_x / std::max(1.0, x);
  inner.rel_tol = 1e-11;
  inner.max_panels = 20000;

  const double lower = mu.has_density() ? std::max(0.0, mu.density()->support_lower) : 0.0;
  const double upper = mu.has_density() ? mu.density_upper() : 0.0;

  auto convolved = [&](double z) {
    double v = 0.0;
    for (const auto& a : atoms) {
      if (a.location < z) v += a.mass * pi(z - a.location);
    }
    const double hi = std::min(z, upper);
    if (mu.has_density() && hi > lower) {
      std::vector<double> cuts(marks.begin(), marks.end());
      for (double b : pi_bps) {
        if (b < z) cuts.push_back(z - b);
      }
      v += quad::integral([&](double u) { return mu.density_at(u) * pi(z - u); }, lower, hi, cuts,
                          inner);
    }
    return v;
  };
  auto integrand = [&](double z) { return convolved(z) - total * pi(z); };
  const double numerator = quad::integral(integrand, 0.0, x, outer_cuts, outer);
  return checked_ratio(numerator, pi_x, x);
}

GeneralDrift drift_general(const TargetDensity& pi, const LevyTriplet& triplet, double x) {
  if (!triplet.is_nondeterministic()) {
    throw PreconditionError("drift needs sigma^2 > 0 or a non-zero Levy measure");
  }
  if (triplet.sigma_sq < 0.0) throw PreconditionError("sigma^2 must be non-negative");
  const double pi_x = checked_pi(pi, x);
  const bool has_rho = triplet.rho && !triplet.rho->is_zero();
  const double h = std::max(1e-6, 1e-6 * x);
  if (triplet.sigma_sq > 0.0 || has_rho) {
    for (double b : pi.breakpoints()) {
      if (std::abs(x - b) <= h) {
        throw NonDifferentiablePoint("pi is not differentiable near breakpoint " + fmt(b) +
                                     " (x=" + fmt(x) + ")");
      }
    }
    if (x - h <= 0.0) throw NonDifferentiablePoint("difference step leaves (0, inf) at x=" + fmt(x));
  }

  double numerator = -tail_convolution(triplet.mu, pi, x);
  if (triplet.sigma_sq > 0.0) {
    const double dpi = (pi(x + h) - pi(x - h)) / (2.0 * h);
    numerator += 0.5 * triplet.sigma_sq * dpi;
  }
  if (has_rho) {
    const auto& rho = *triplet.rho;
    const auto marks = rho.discontinuities();
    auto conv = [&](double y) {
      const auto cuts = convolution_cuts(pi, marks, y);
      return quad::integral([&](double z) { return double_integrated_tail(rho, z) * pi(y - z); },
                            0.0, y, cuts, ratio_options(pi(y)));
    };
    numerator += (conv(x + h) - conv(x - h)) / (2.0 * h);
  }
  return {checked_ratio(numerator, pi_x, x) - triplet.gamma, has_rho};
}

double truncated_drift(const TargetDensity& pi, const LevyMeasure& mu, unsigned n, double x) {
  if (n == 0) throw PreconditionError("truncation level must be positive");
  const double nn = static_cast<double>(n);
  const LevyMeasure mu_n = mu.restricted(1.0 / nn, nn);
  if (mu_n.is_zero()) {
    throw TrivialTruncation("mu restricted to (1/" + std::to_string(n) + ", " +
                            std::to_string(n) + ") carries no mass");
  }
  return drift_cp(pi, mu_n, x);
}

}  // namespace llmc
