#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "llmc/quadrature.hpp"
#include "llmc/random.hpp"

namespace llmc {

using RealFunction = std::function<double(double)>;

/// Unnormalised target density pi on (0, inf).
class TargetDensity {
 public:
  /// `breakpoints` are points where pi may jump or kink. When `domain_cutoff`
  /// is absent it is found as the smallest x with pi(x) < 1e-16 * max pi.
  TargetDensity(RealFunction density, std::vector<double> breakpoints,
                std::optional<double> tail_rate_hint = std::nullopt,
                std::optional<double> domain_cutoff = std::nullopt);

  /// pi(x); zero for x <= 0. Evaluation errors of the underlying function
  /// are rethrown as MalformedDensity.
  double operator()(double x) const;

  std::span<const double> breakpoints() const { return state_->breakpoints; }
  std::optional<double> tail_rate_hint() const { return state_->tail_rate_hint; }
  double domain_cutoff() const { return state_->cutoff; }
  /// False when the cutoff search gave up without seeing pi decay.
  bool cutoff_resolved() const { return state_->cutoff_resolved; }
  /// Largest pi value seen while locating the cutoff.
  double peak() const { return state_->peak; }
  /// Integral of pi over (0, domain_cutoff).
  double mass() const { return state_->mass; }

  /// Integral of pi over (a, b), split at the breakpoints.
  double integrate(double a, double b, const quad::Options& opts = {}) const;

 private:
  struct State {
    RealFunction density;
    std::vector<double> breakpoints;
    std::optional<double> tail_rate_hint;
    double cutoff = 0.0;
    bool cutoff_resolved = true;
    double peak = 0.0;
    double mass = 0.0;
  };
  std::shared_ptr<const State> state_;
};

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// Absolutely continuous part of a jump measure.
struct JumpDensity {
  RealFunction density;
  /// Closed-form integral of the density over (z, inf); numeric when empty.
  RealFunction tail;
  double support_lower = 0.0;
  double support_upper = std::numeric_limits<double>::infinity();
  std::vector<double> breakpoints;
};

/// Finite jump measure on (0, inf): atoms plus an optional density part.
///
/// Construction never throws for measures that merely violate the standing
/// assumptions (negative atoms, infinite mass or moment); those are reported
/// by validate_b2 and enforced by require_valid().
class LevyMeasure {
 public:
  LevyMeasure() : LevyMeasure(std::vector<Atom>{}) {}
  explicit LevyMeasure(std::vector<Atom> atoms, std::optional<JumpDensity> density = std::nullopt);

  std::span<const Atom> atoms() const;
  bool has_density() const;
  const std::optional<JumpDensity>& density() const;

  /// Density value at z, zero outside its support.
  double density_at(double z) const;
  /// Integral of the density part over (z, inf).
  double density_tail(double z) const;
  double density_mass() const;

  /// mu(x, inf) for x > 0: atom masses strictly above x plus the density tail.
  double integrated_tail(double x) const;

  /// |mu|; throws InvalidMeasure when zero or non-finite.
  double total_mass() const;
  /// int z mu(dz) / |mu|; throws AssumptionViolation when infinite.
  double mean_jump() const;
  /// int z mu(dz) (not normalised).
  double first_moment() const;

  bool mass_finite() const;
  bool moment_finite() const;
  bool is_zero() const;

  /// Effective upper end of the density support used for quadrature.
  double density_upper() const;

  /// Points where z -> mu(z, inf) is not smooth: atom locations, density
  /// breakpoints and support ends.
  std::vector<double> discontinuities() const;

  /// mu(. intersected with (lo, hi)).
  LevyMeasure restricted(double lo, double hi) const;
  /// mu((0, lo] U [hi, inf)).
  double mass_outside(double lo, double hi) const;

  /// Throws InvalidMeasure unless all atoms are positive, the density lives
  /// on (0, inf), and mass and first moment are finite and positive.
  void require_valid() const;

  /// One draw from mu / |mu|.
  double sample(RandomStream& rng) const;

 private:
  struct State;
  std::shared_ptr<const State> state_;

  double density_tail_numeric(double z) const;
  double invert_density_tail(double target) const;
};

/// Characteristic triplet (gamma, sigma^2, mu + rho). rho is evaluation-only.
struct LevyTriplet {
  double gamma = 0.0;
  double sigma_sq = 0.0;
  LevyMeasure mu;
  std::optional<LevyMeasure> rho;

  /// sigma^2 > 0 or Pi != 0.
  bool is_nondeterministic() const;
};

double integrated_tail(const LevyMeasure& mu, double x);
double signed_integrated_tail(const LevyMeasure& mu, double x);
/// int_(x, inf) rho(z, inf) dz for x > 0, zero for x <= 0 (spectrally positive).
double double_integrated_tail(const LevyMeasure& rho, double x);
double total_mass(const LevyMeasure& mu);
double mean_jump(const LevyMeasure& mu);
double sample_jump(const LevyMeasure& mu, RandomStream& rng);

}  // namespace llmc
