#include "llmc/io.hpp"

#include <charconv>
#include <ostream>

namespace llmc {

std::string format_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_samples_csv(std::ostream& os, std::span<const double> samples) {
  os << "x\n";
  for (double v : samples) os << format_number(v) << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "time,state,jump_flag\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    os << format_number(tr.times[i]) << ',' << format_number(tr.states[i]) << ','
       << static_cast<int>(tr.jump_flags[i]) << '\n';
  }
}

void write_histogram_csv(std::ostream& os, const EmpiricalDistribution& samples, double lo,
                         double hi, std::size_t bins) {
  const auto counts = samples.histogram(lo, hi, bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  const double n = static_cast<double>(samples.size());
  os << "bin_left,bin_right,density\n";
  for (std::size_t b = 0; b < bins; ++b) {
    const double left = lo + width * static_cast<double>(b);
    const double right = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    os << format_number(left) << ',' << format_number(right) << ','
       << format_number(static_cast<double>(counts[b]) / (n * width)) << '\n';
  }
}

}  // namespace llmc
