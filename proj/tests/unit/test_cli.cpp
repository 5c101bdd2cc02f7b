#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "fixtures.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using llmc::testing::TempDir;

const char* kNonSmooth = R"cfg([target]
density = "exp(-0.5*x) + indicator(2, 4)"
tail_rate = 0.5

[jump_measure]
atom_locations = 1
atom_masses = 1
density = "x^2*exp(-0.5*x)"
density_tail = "exp(-0.5*x)*(2*x^2 + 8*x + 16)"

[sim]
samples = 600
seed = 3
burn_in = 10
)cfg";

const char* kExponential = R"cfg([target]
density = "exp(-x)"

[jump_measure]
density = "exp(-x)"
density_tail = "exp(-x)"
)cfg";

const char* kDoubleWell = R"cfg([target]
density = "exp(-0.1*x*(x-4)*(x-6.02)*(x-10))"

[jump_measure]
atom_locations = 4, 8
atom_masses = 1, 2
density = "exp(-x)"
density_tail = "exp(-x)"
)cfg";

const char* kNegativeAtom = R"cfg([target]
density = "exp(-x)"

[jump_measure]
atom_locations = -1
atom_masses = 1
)cfg";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "llmc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = llmc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write(const TempDir& dir, const std::string& name, const std::string& text) {
  const auto p = dir.path() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::pair<double, double>> read_drift(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,phi");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return rows;
}

TEST(Cli, ValidateExitCodes) {
  TempDir dir("cli_validate");
  const auto out = (dir.path() / "out").string();
  auto r = run({"validate", "--config", write(dir, "ns.ini", kNonSmooth), "--out", out});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("verdict: PASS"), std::string::npos);
  const auto report = nlohmann::json::parse(slurp(fs::path(out) / "validation.json"));
  EXPECT_EQ(report["verdict"], "PASS");

  r = run({"validate", "--config", write(dir, "dw.ini", kDoubleWell), "--out", out});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("WARN"), std::string::npos);

  r = run({"validate", "--config", write(dir, "neg.ini", kNegativeAtom), "--out", out});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(slurp(fs::path(out) / "validation.json"))["b2"][0]["verdict"],
            "FAIL");
}

TEST(Cli, DriftCsvForNonSmooth) {
  TempDir dir("cli_drift");
  const auto out = dir.path() / "out";
  const auto r = run({"drift", "--config", write(dir, "ns.ini", kNonSmooth), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_drift(out / "drift.csv");
  EXPECT_EQ(rows.size(), 512u);
  for (const auto& [x, phi] : rows) ASSERT_LT(phi, 0.0) << x;
}

TEST(Cli, DriftCsvForClosedForm) {
  TempDir dir("cli_drift_cf");
  const auto out = dir.path() / "out";
  const auto r = run({"drift", "--config", write(dir, "e.ini", kExponential), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& [x, phi] : read_drift(out / "drift.csv")) EXPECT_NEAR(phi, -x, 1e-6);
}

TEST(Cli, ConfigErrorsExitTwo) {
  TempDir dir("cli_errors");
  EXPECT_EQ(run({"drift", "--config", write(dir, "m.ini", "[target]\nbreakpoints = 1\n[jump_measure]\natom_locations = 1\natom_masses = 1\n")}).code, 2);
  std::string zero = kNonSmooth;
  zero.replace(zero.find("samples = 600"), 13, "samples = 0");
  const auto r = run({"sample", "--config", write(dir, "z.ini", zero)});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("samples"), std::string::npos);
  EXPECT_EQ(run({"sample", "--config", (dir.path() / "missing.ini").string()}).code, 2);
  EXPECT_EQ(run({"sample"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, SampleWritesArtifactsAndRoundTrips) {
  TempDir dir("cli_sample");
  const auto out1 = dir.path() / "first";
  auto r = run({"sample", "--config", write(dir, "ns.ini", kNonSmooth), "--out", out1.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"samples.csv", "histogram.csv", "diagnostics.json", "run_config.ini",
                        "summary.json"}) {
    EXPECT_TRUE(fs::exists(out1 / f)) << f;
  }
  const auto diag = nlohmann::json::parse(slurp(out1 / "diagnostics.json"));
  EXPECT_TRUE(diag.contains("ks"));
  EXPECT_TRUE(diag.contains("tv"));
  EXPECT_EQ(diag["residuals"].size(), 5u);
  EXPECT_EQ(slurp(out1 / "histogram.csv").rfind("bin_left,bin_right,density\n", 0), 0u);
  const auto samples = slurp(out1 / "samples.csv");
  EXPECT_EQ(std::count(samples.begin(), samples.end(), '\n'), 601);
  EXPECT_EQ(nlohmann::json::parse(slurp(out1 / "summary.json"))["sim"]["seed"], 3);

  // The recorded config reproduces the run byte for byte.
  const auto out2 = dir.path() / "second";
  r = run({"sample", "--config", (out1 / "run_config.ini").string(), "--out", out2.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(out2 / "samples.csv"), samples);
  EXPECT_EQ(slurp(out2 / "diagnostics.json"), slurp(out1 / "diagnostics.json"));

  // A different seed changes the draws.
  const auto out3 = dir.path() / "third";
  r = run({"sample", "--config", (out1 / "run_config.ini").string(), "--out", out3.string(),
           "--seed", "4"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(slurp(out3 / "samples.csv"), samples);
}

TEST(Cli, DiagnoseWithAndWithoutSamples) {
  TempDir dir("cli_diagnose");
  const auto cfg = write(dir, "ns.ini", kNonSmooth);
  const auto out = dir.path() / "out";
  auto r = run({"diagnose", "--config", cfg, "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto diag = nlohmann::json::parse(slurp(out / "diagnostics.json"));
  EXPECT_TRUE(diag["ks"].is_null());
  EXPECT_EQ(diag["truncation"].size(), 4u);
  for (const auto& row : diag["residuals"]) EXPECT_LT(std::abs(row["value"].get<double>()), 1e-5);
  double worst_control = 0.0;
  for (const auto& row : diag["negative_control"]) {
    worst_control = std::max(worst_control, std::abs(row["value"].get<double>()));
  }
  EXPECT_GT(worst_control, 1e-3);

  const auto samples = write(dir, "s.csv", "x\n0.5\n1.5\n3.0\n");
  r = run({"diagnose", "--config", cfg, "--out", out.string(), "--samples", samples});
  ASSERT_EQ(r.code, 0) << r.err;
  diag = nlohmann::json::parse(slurp(out / "diagnostics.json"));
  EXPECT_TRUE(diag["ks"].is_number());
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  TempDir dir("cli_env");
  const auto target = dir.path() / "from_env";
  ::setenv(llmc::cli::kOutDirEnv, target.c_str(), 1);
  const auto r = run({"validate", "--config", write(dir, "e.ini", kExponential)});
  ::unsetenv(llmc::cli::kOutDirEnv);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(target / "validation.json"));
}

TEST(Cli, ReproduceUsage) {
  TempDir dir("cli_reproduce");
  EXPECT_EQ(run({"reproduce", "bogus"}).code, 2);
  const auto r = run({"reproduce", "double-well", "--raw-sign", "--out", dir.path().string()});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, ReproduceSmallRun) {
  TempDir dir("cli_reproduce_small");
  const auto r = run({"reproduce", "non-smooth", "--samples", "500", "--seed", "2", "--out",
                      dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = nlohmann::json::parse(slurp(dir.path() / "summary.json"));
  EXPECT_EQ(s["example"], "non-smooth");
  EXPECT_TRUE(s["plateau_mass"]["expected"].is_number());
  EXPECT_TRUE(fs::exists(dir.path() / "drift.csv"));
  EXPECT_EQ(slurp(dir.path() / "path.csv").rfind("time,state,jump_flag\n", 0), 0u);
}

}  // namespace
