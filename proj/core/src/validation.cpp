#include "llmc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "llmc/error.hpp"

namespace llmc {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Least-squares slope of ys against xs.
double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

bool near_breakpoint(const TargetDensity& pi, double x) {
  for (double b : pi.breakpoints()) {
    if (std::abs(x - b) <= 1e-12 * std::max(1.0, b)) return true;
  }
  return false;
}

Finding tail_finding(const TargetDensity& pi) {
  Finding f{"tail", Verdict::Pass, "", std::nullopt};
  if (!pi.cutoff_resolved()) {
    f.verdict = Verdict::Fail;
    f.detail = "pi does not fall below 1e-16 of its peak before x=" + num(pi.domain_cutoff()) +
               "; no exponential decay";
    return f;
  }
  constexpr int kPoints = 64;
  const double hi = pi.domain_cutoff();
  const double lo = hi / 10.0;
  std::vector<double> xs, ys;
  for (int i = 0; i < kPoints; ++i) {
    const double x = lo + (hi - lo) * i / (kPoints - 1);
    const double v = pi(x);
    if (v > 0.0) {
      xs.push_back(x);
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 8) {
    f.verdict = Verdict::Fail;
    f.detail = "pi vanishes on most of the tail window";
    return f;
  }
  // Average slope over the decade against the local slope over its last
  // eighth: equal for exponential decay, steeper at the end for faster
  // decay, flatter for slower decay.
  const std::size_t tail = std::max<std::size_t>(xs.size() / 8, 4);
  const std::vector<double> xe(xs.end() - static_cast<long>(tail), xs.end());
  const std::vector<double> ye(ys.end() - static_cast<long>(tail), ys.end());
  const double slope = ls_slope(xs, ys);
  const double end_slope = ls_slope(xe, ye);
  f.value = -slope;
  if (!(slope < 0.0) || !(end_slope < 0.0)) {
    f.verdict = Verdict::Fail;
    f.detail = "log pi is not decreasing on [" + num(lo) + ", " + num(hi) + "]";
    return f;
  }
  if (std::abs(end_slope - slope) <= 0.1 * std::abs(slope)) {
    f.detail = "log pi asymptotically linear, alpha_hat=" + num(-slope);
  } else if (end_slope < slope) {
    f.verdict = Verdict::Warn;
    f.detail = "super-exponential decay (slope " + num(slope) + " over the last decade, " +
               num(end_slope) + " at its end): pi(x)e^{alpha x} -> 0 for every alpha, so the "
               "limit constant is 0 rather than positive; accepted with warning";
  } else {
    f.verdict = Verdict::Fail;
    f.detail = "sub-exponential decay (slope " + num(slope) + " over the last decade, " +
               num(end_slope) + " at its end)";
  }
  return f;
}

Finding origin_finding(const TargetDensity& pi) {
  Finding f{"origin", Verdict::Pass, "", std::nullopt};
  std::vector<double> ratios;
  for (int k = 1; k <= 6; ++k) {
    const double x = std::pow(10.0, -k);
    const double px = pi(x);
    const double mass = pi.integrate(0.0, x);
    const double r = mass / (x * px);
    if (!(px > 0.0) || !std::isfinite(r)) {
      f.verdict = Verdict::Fail;
      f.detail = "int_0^x pi / (x pi(x)) is not finite at x=" + num(x);
      return f;
    }
    ratios.push_back(r);
  }
  const double r4 = ratios[3], r5 = ratios[4], r6 = ratios[5];
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  f.value = worst;
  if (r6 > r5 && r5 > r4 && r6 > 2.0 * r4) {
    f.verdict = Verdict::Fail;
    f.detail = "int_0^x pi / (x pi(x)) diverges as x -> 0 (" + num(r4) + " at 1e-4, " + num(r6) +
               " at 1e-6)";
  } else {
    f.detail = "int_0^x pi <= C' x pi(x) near 0 with C'~" + num(worst) + " (ratio " + num(r6) +
               " at x=1e-6)";
  }
  return f;
}

Finding positivity_finding(const TargetDensity& pi) {
  Finding f{"positivity", Verdict::Pass, "", std::nullopt};
  const double hi = pi.domain_cutoff();
  const double lo = std::min(1e-6, hi / 2);
  std::size_t zeros = 0;
  double first_zero = 0.0;
  auto check = [&](double x) {
    if (near_breakpoint(pi, x)) return;
    if (!(pi(x) > 0.0)) {
      if (zeros++ == 0) first_zero = x;
    }
  };
  constexpr int kPoints = 256;
  for (int i = 0; i < kPoints; ++i) {
    check(lo * std::pow(hi / lo, static_cast<double>(i) / (kPoints - 1)));
    check(hi * (i + 1) / kPoints);
  }
  f.value = static_cast<double>(zeros);
  if (zeros > 0) {
    f.verdict = Verdict::Fail;
    f.detail = std::to_string(zeros) + " grid points with pi = 0 (first at x=" + num(first_zero) +
               ")";
  } else {
    f.detail = "pi > 0 on a " + std::to_string(2 * kPoints) + "-point grid over (0, " + num(hi) +
               "]";
  }
  return f;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Warn: return "WARN";
    case Verdict::Fail: return "FAIL";
  }
  return "?";
}

Verdict ValidationReport::overall() const {
  Verdict worst = Verdict::Pass;
  for (const auto& f : findings) {
    if (static_cast<int>(f.verdict) > static_cast<int>(worst)) worst = f.verdict;
  }
  return worst;
}

const Finding* ValidationReport::find(const std::string& check) const {
  for (const auto& f : findings) {
    if (f.check == check) return &f;
  }
  return nullptr;
}

ValidationReport validate_b1(const TargetDensity& pi) {
  ValidationReport report{"b1", {}};
  report.findings.push_back(tail_finding(pi));
  report.findings.push_back(origin_finding(pi));
  report.findings.push_back(positivity_finding(pi));
  return report;
}

ValidationReport validate_b2(const LevyMeasure& mu) {
  ValidationReport report{"b2", {}};

  Finding support{"support", Verdict::Pass, "all jumps are positive", std::nullopt};
  for (const auto& a : mu.atoms()) {
    if (!(a.location > 0.0)) {
      support.verdict = Verdict::Fail;
      support.detail = "atom at " + num(a.location) + " is not in (0, inf) (negative support)";
      break;
    }
    if (!(a.mass > 0.0)) {
      support.verdict = Verdict::Fail;
      support.detail = "atom at " + num(a.location) + " has non-positive mass";
      break;
    }
  }
  if (support.verdict == Verdict::Pass && mu.has_density() && mu.density()->support_lower < 0.0) {
    support.verdict = Verdict::Fail;
    support.detail = "jump density support extends below 0 (negative support)";
  }
  report.findings.push_back(support);

  Finding mass{"mass", Verdict::Pass, "", std::nullopt};
  try {
    mass.value = mu.total_mass();
    mass.detail = "|mu| = " + num(*mass.value);
  } catch (const InvalidMeasure& e) {
    mass.verdict = Verdict::Fail;
    mass.detail = e.what();
  }
  report.findings.push_back(mass);

  Finding moment{"moment", Verdict::Pass, "", std::nullopt};
  if (!mu.moment_finite() || !mu.mass_finite()) {
    moment.verdict = Verdict::Fail;
    moment.detail = "infinite first moment: int z mu(dz) diverges";
  } else {
    moment.value = mu.first_moment();
    moment.detail = "int z mu(dz) = " + num(*moment.value);
  }
  report.findings.push_back(moment);
  return report;
}

Finding check_c1(const LevyMeasure& mu) {
  Finding f{"c1", Verdict::Pass, "", std::nullopt};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& a : mu.atoms()) {
    lo = std::min(lo, a.location);
    hi = std::max(hi, a.location);
  }
  if (mu.has_density()) {
    lo = std::min(lo, mu.density()->support_lower);
    hi = std::max(hi, mu.density()->support_upper);
  }
  if (!(lo > 0.0) || !std::isfinite(hi) || !(hi > 0.0)) {
    f.verdict = Verdict::Fail;
    f.detail = "support of mu is not contained in (1/n, n) for any n";
    return f;
  }
  const double n = std::floor(std::max(1.0 / lo, hi)) + 1.0;
  f.value = n;
  f.detail = "supp mu inside (1/" + num(n) + ", " + num(n) + ")";
  return f;
}

Finding check_c2(const TargetDensity& pi) {
  Finding f{"c2", Verdict::Pass, "", std::nullopt};
  std::vector<double> edges{0.0};
  for (double b : pi.breakpoints()) {
    if (b < pi.domain_cutoff()) edges.push_back(b);
  }
  edges.push_back(pi.domain_cutoff());
  double lipschitz = 0.0;
  constexpr int kPoints = 200;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p] == 0.0 ? std::min(1e-3, edges[p + 1] / 10) : edges[p];
    const double b = edges[p + 1];
    const double pad = 1e-9 * std::max(1.0, b);
    double prev_x = a + pad;
    double prev_v = pi(prev_x);
    for (int i = 1; i <= kPoints; ++i) {
      const double x = a + pad + (b - a - 2 * pad) * i / kPoints;
      const double v = pi(x);
      lipschitz = std::max(lipschitz, std::abs(v - prev_v) / (x - prev_x));
      prev_x = x;
      prev_v = v;
    }
  }
  f.value = lipschitz;
  if (!std::isfinite(lipschitz)) {
    f.verdict = Verdict::Fail;
    f.detail = "pi is not Lipschitz between its declared breakpoints";
  } else {
    const std::size_t pieces = edges.size() - 1;
    f.detail = "pi piecewise Lipschitz on " + std::to_string(pieces) +
               (pieces == 1 ? " piece" : " pieces") + " (max slope estimate " + num(lipschitz) + ")";
  }
  return f;
}

}  // namespace llmc
