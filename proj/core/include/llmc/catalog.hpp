#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmc/measure.hpp"

namespace llmc {

/// Textual description of a target density; expressions use the density DSL.
struct TargetSpec {
  std::string density;
  /// Extra breakpoints merged with the indicator endpoints of `density`.
  std::vector<double> breakpoints;
  std::optional<double> cutoff;
  std::optional<double> tail_rate;
};

struct JumpDensitySpec {
  std::string density;
  /// Closed form of int_z^inf density; empty for numeric tails.
  std::string tail;
  double support_lower = 0.0;
  double support_upper = std::numeric_limits<double>::infinity();
  std::vector<double> breakpoints;
};

struct MeasureSpec {
  std::vector<Atom> atoms;
  std::optional<JumpDensitySpec> density;
};

struct ProblemSpec {
  std::string name;
  TargetSpec target;
  MeasureSpec measure;
};

struct Problem {
  TargetDensity pi;
  LevyMeasure mu;
};

/// Parses the expressions and builds the objects. DSL errors propagate
/// unchanged; density construction failures surface as MalformedDensity.
TargetDensity build_target(const TargetSpec& spec);
LevyMeasure build_measure(const MeasureSpec& spec);
Problem build_problem(const ProblemSpec& spec);

/// Built-in problems: "double-well", "non-smooth" and "exponential"
/// (pi = e^{-x}, mu = e^{-z} dz, drift exactly -x). `raw_sign` selects the
/// double-well exponent with the sign as printed, which grows like +x^4/10
/// and is not a density. Throws PreconditionError for unknown ids.
ProblemSpec example(std::string_view id, bool raw_sign = false);
std::vector<std::string> example_ids();

/// Modes of the built-in double well and the target mass of (2, 4) for the
/// non-smooth example.
inline constexpr double kDoubleWellModes[2] = {1.41, 8.61};
double non_smooth_plateau_mass();

}  // namespace llmc
