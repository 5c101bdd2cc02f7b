#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmc/catalog.hpp"
#include "llmc/error.hpp"
#include "llmc/sampler.hpp"

namespace llmc::cli {

class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct TruncationGrid {
  double lo = 0.1;
  /// Defaults to the 0.999 quantile of the target when absent.
  std::optional<double> hi;
  std::size_t points = 256;
};

struct RunConfig {
  ProblemSpec problem;
  SimConfig sim;
  std::size_t samples = 50000;
  std::size_t table_points = 512;
  std::string output_dir;  // empty: use the environment default
  std::size_t bins = 100;
  std::vector<unsigned> truncation_n{2, 4, 8, 16};
  TruncationGrid truncation_grid;
};

/// Parses the sectioned key = value format described in docs/config.md.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Renders a config that parses back to the same values, numbers in
/// shortest round-trip form.
std::string to_config_text(const RunConfig& cfg);

}  // namespace llmc::cli
