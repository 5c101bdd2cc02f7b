#pragma once

#include <optional>
#include <string>
#include <vector>

#include "llmc/measure.hpp"

namespace llmc {

enum class Verdict { Pass, Warn, Fail };

const char* to_string(Verdict v);

struct Finding {
  std::string check;
  Verdict verdict = Verdict::Pass;
  std::string detail;
  std::optional<double> value;
};

struct ValidationReport {
  std::string subject;
  std::vector<Finding> findings;

  /// Worst verdict over all findings (Pass when empty).
  Verdict overall() const;
  const Finding* find(const std::string& check) const;
};

/// Target-density assumption: exponential tail, origin bound
/// int_0^x pi <= C' x pi(x), and positivity. Findings: "tail", "origin",
/// "positivity".
ValidationReport validate_b1(const TargetDensity& pi);

/// Jump-measure assumption: support in (0, inf), finite mass and first
/// moment. Findings: "support", "mass", "moment".
ValidationReport validate_b2(const LevyMeasure& mu);

/// supp mu inside (1/n, n) for some n. Pass/Fail; value holds the smallest
/// such n when it exists.
Finding check_c1(const LevyMeasure& mu);

/// pi piecewise Lipschitz with respect to its breakpoints (grid estimate).
Finding check_c2(const TargetDensity& pi);

}  // namespace llmc
