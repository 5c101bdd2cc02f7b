#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace llmc::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "LLMC_OUT_DIR";

/// Output directory: the config value, else $LLMC_OUT_DIR, else "llmc_out".
std::string output_directory(const RunConfig& cfg);

int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_drift(const RunConfig& cfg, std::ostream& out);
int cmd_sample(const RunConfig& cfg, std::ostream& out);
/// `samples_csv` optionally names a one-column sample file for KS and TV.
int cmd_diagnose(const RunConfig& cfg, const std::optional<std::string>& samples_csv,
                 std::ostream& out);

struct ReproduceOptions {
  std::string example_id;
  bool raw_sign = false;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
};

/// The built-in run configuration used by `reproduce`.
RunConfig reproduce_config(const ReproduceOptions& opts);
int cmd_reproduce(const ReproduceOptions& opts, std::ostream& out);

/// Full command-line entry point; maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace llmc::cli
