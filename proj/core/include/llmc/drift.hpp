#pragma once

#include <functional>

#include "llmc/measure.hpp"
#include "llmc/quadrature.hpp"

namespace llmc {

/// (mu_s * pi)(x) = int_0^x mu(z, inf) pi(x - z) dz for x > 0.
///
/// Panels are split at x - b for every breakpoint b of pi and at every atom
/// and density discontinuity of mu. Tolerances are relative to pi(x) so the
/// drift ratio keeps its accuracy where pi is tiny or huge.
double tail_convolution(const LevyMeasure& mu, const TargetDensity& pi, double x);

/// phi(x) = -(mu_s * pi)(x) / pi(x).
double drift_cp(const TargetDensity& pi, const LevyMeasure& mu, double x);

/// phi(x) = int_0^x ((mu * pi)(z) - |mu| pi(z)) dz / pi(x), computed as a
/// nested quadrature that shares no code path with drift_cp beyond pi itself.
double drift_alt(const TargetDensity& pi, const LevyMeasure& mu, double x);

struct GeneralDrift {
  double value = 0.0;
  /// Set when rho contributes: the value can be evaluated but not simulated.
  bool evaluation_only = false;
};

/// Full drift for a Levy triplet:
///   ((sigma^2/2) pi'(x) - (mu_s * pi)(x) + (rhobarbar * pi)'(x)) / pi(x) - gamma.
/// Derivatives use central differences with h = max(1e-6, 1e-6 x); x within
/// h of a breakpoint of pi is rejected when sigma^2 > 0 or rho is present.
GeneralDrift drift_general(const TargetDensity& pi, const LevyTriplet& triplet, double x);

/// drift_cp with mu replaced by mu restricted to the open interval (1/n, n).
double truncated_drift(const TargetDensity& pi, const LevyMeasure& mu, unsigned n, double x);

}  // namespace llmc
