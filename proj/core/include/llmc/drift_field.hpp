#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "llmc/measure.hpp"

namespace llmc {

struct DriftTableOptions {
  double x_min = 1e-6;
  /// Maximum relative interpolation error accepted at the validation points.
  double tolerance = 1e-4;
  std::size_t validation_points = 256;
  /// Each refinement doubles the base grid; 2 refinements is a 4x grid.
  int max_refinements = 2;
  /// Worker threads for the grid evaluation; 0 picks the hardware count.
  unsigned threads = 0;
};

/// Tabulated drift with cubic Hermite interpolation of log(-phi) against
/// log(x). Nodes sit on both sides of each jump of pi, and interpolation
/// never crosses a kink of phi. Below the grid the exact drift is used;
/// above the domain cutoff the last value is held.
class DriftField {
 public:
  double operator()(double x) const;
  /// drift_cp evaluated directly.
  double exact(double x) const;

  std::span<const double> grid() const { return x_; }
  std::span<const double> values() const { return phi_; }
  double grid_min() const { return x_.front(); }
  double grid_max() const { return x_.back(); }
  /// Largest relative error seen at the validation points.
  double validation_error() const { return validation_error_; }
  int refinements() const { return refinements_; }
  /// True when the tolerance was still missed after the last refinement.
  bool accuracy_warning() const { return accuracy_warning_; }

  const TargetDensity& target() const { return pi_; }
  const LevyMeasure& measure() const { return mu_; }

  /// Writes "x,phi" rows for every grid node.
  void write_csv(std::ostream& os) const;
  /// Writes `rows` rows of the interpolated drift on the base layout
  /// (a quarter log-spaced near 0, the rest linear up to grid_max).
  void write_csv(std::ostream& os, std::size_t rows) const;

 private:
  friend DriftField build_drift_table(const TargetDensity&, const LevyMeasure&, std::size_t,
                                      const DriftTableOptions&);
  DriftField(TargetDensity pi, LevyMeasure mu) : pi_(std::move(pi)), mu_(std::move(mu)) {}

  TargetDensity pi_;
  LevyMeasure mu_;
  std::vector<double> x_;
  std::vector<double> phi_;
  std::vector<double> t_;       // log x
  std::vector<double> psi_;     // log(-phi)
  std::vector<double> slope_;   // d psi / dt
  std::vector<char> bridge_;    // interval i -> i+1 straddles a jump of pi
  double validation_error_ = 0.0;
  int refinements_ = 0;
  bool accuracy_warning_ = false;
};

/// Evaluates drift_cp on a grid of about n_points nodes (n_points >= 64),
/// then checks the interpolant against exact values at random off-grid
/// points and refines the grid while the relative error exceeds the
/// tolerance. Throws FormulaInconsistency if any drift value is >= 0.
DriftField build_drift_table(const TargetDensity& pi, const LevyMeasure& mu,
                             std::size_t n_points = 512, const DriftTableOptions& opts = {});

}  // namespace llmc
