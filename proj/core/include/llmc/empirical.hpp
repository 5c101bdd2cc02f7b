#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace llmc {

/// Sorted positive samples with ECDF and histogram views.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  /// Sorts the values; throws PreconditionError on non-positive or
  /// non-finite entries.
  explicit EmpiricalDistribution(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const double> values() const { return values_; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  /// Fraction of samples <= x.
  double ecdf(double x) const;
  /// Fraction of samples in the open interval (a, b).
  double mass_between(double a, double b) const;
  /// Sample counts over `bins` equal-width bins spanning [lo, hi]; the last
  /// bin is closed, values outside are dropped.
  std::vector<std::size_t> histogram(double lo, double hi, std::size_t bins) const;

 private:
  std::vector<double> values_;
};

}  // namespace llmc
