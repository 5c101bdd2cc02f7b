#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

#include "llmc/empirical.hpp"
#include "llmc/sampler.hpp"

namespace llmc {

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double v);

/// One-column CSV with header "x".
void write_samples_csv(std::ostream& os, std::span<const double> samples);

/// CSV "time,state,jump_flag".
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

/// CSV "bin_left,bin_right,density" over `bins` equal-width bins of [lo, hi];
/// densities integrate to the fraction of samples inside the range.
void write_histogram_csv(std::ostream& os, const EmpiricalDistribution& samples, double lo,
                         double hi, std::size_t bins);

}  // namespace llmc
