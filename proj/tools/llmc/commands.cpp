#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "llmc/diagnostics.hpp"
#include "llmc/drift.hpp"
#include "llmc/drift_field.hpp"
#include "llmc/expr.hpp"
#include "llmc/io.hpp"
#include "llmc/sampler.hpp"
#include "llmc/validation.hpp"

namespace llmc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kPathHorizon = 20.0;
constexpr std::uint64_t kPathStream = std::uint64_t{1} << 32;

json finding_json(const Finding& f) {
  json j;
  j["check"] = f.check;
  j["verdict"] = to_string(f.verdict);
  j["detail"] = f.detail;
  j["value"] = f.value ? json(*f.value) : json(nullptr);
  return j;
}

void print_finding(std::ostream& out, const std::string& group, const Finding& f) {
  out << std::left << std::setw(4) << group << std::setw(12) << f.check << std::setw(6)
      << to_string(f.verdict) << f.detail << '\n';
}

Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

struct Checked {
  std::optional<TargetDensity> pi;
  std::optional<LevyMeasure> mu;
  json report;
  Verdict verdict = Verdict::Pass;
};

Checked check_problem(const RunConfig& cfg, std::ostream& out) {
  Checked c;
  std::vector<Finding> b1;
  std::vector<Finding> b2;
  try {
    c.pi = build_target(cfg.problem.target);
  } catch (const MalformedDensity& e) {
    b1.push_back({"density", Verdict::Fail, e.what(), std::nullopt});
  }
  try {
    c.mu = build_measure(cfg.problem.measure);
  } catch (const InvalidMeasure& e) {
    b2.push_back({"measure", Verdict::Fail, e.what(), std::nullopt});
  }
  if (c.pi) {
    try {
      const auto r = validate_b1(*c.pi);
      b1.insert(b1.end(), r.findings.begin(), r.findings.end());
    } catch (const MalformedDensity& e) {
      b1.push_back({"density", Verdict::Fail, e.what(), std::nullopt});
      c.pi.reset();
    }
  }
  if (c.mu) {
    const auto r = validate_b2(*c.mu);
    b2.insert(b2.end(), r.findings.begin(), r.findings.end());
  }
  Finding c1{"c1", Verdict::Fail, "jump measure unavailable", std::nullopt};
  Finding c2{"c2", Verdict::Fail, "target density unavailable", std::nullopt};
  if (c.mu) c1 = check_c1(*c.mu);
  if (c.pi) c2 = check_c2(*c.pi);

  json j;
  j["b1"] = json::array();
  j["b2"] = json::array();
  for (const auto& f : b1) {
    print_finding(out, "b1", f);
    j["b1"].push_back(finding_json(f));
    c.verdict = worst(c.verdict, f.verdict);
  }
  for (const auto& f : b2) {
    print_finding(out, "b2", f);
    j["b2"].push_back(finding_json(f));
    c.verdict = worst(c.verdict, f.verdict);
  }
  for (const auto* f : {&c1, &c2}) {
    out << std::left << std::setw(16) << f->check << std::setw(8)
        << (f->verdict == Verdict::Pass ? "MET" : "NOT MET") << f->detail << '\n';
  }
  j["c1"] = finding_json(c1);
  j["c2"] = finding_json(c2);
  const bool unique = c1.verdict == Verdict::Pass || c2.verdict == Verdict::Pass;
  j["uniqueness"] = unique;
  if (!unique) {
    out << "neither (c1) nor (c2) holds\n";
    c.verdict = Verdict::Fail;
  }
  j["verdict"] = to_string(c.verdict);
  out << "verdict: " << to_string(c.verdict) << '\n';
  c.report = std::move(j);
  return c;
}

fs::path prepare_dir(const RunConfig& cfg) {
  const fs::path dir = output_directory(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

DriftTableOptions table_options(const RunConfig& cfg) {
  DriftTableOptions o;
  o.threads = cfg.sim.threads;
  return o;
}

json residuals_json(const TargetDensity& pi, const LevyMeasure& mu,
                    const std::vector<TestFunction>& bumps, double scale, std::ostream* out) {
  json arr = json::array();
  for (const auto& f : bumps) {
    const double v =
        scale == 1.0
            ? invariance_residual(pi, mu, f)
            : invariance_residual(pi, mu, f, [&](double x) { return scale * drift_cp(pi, mu, x); });
    if (out) {
      *out << "  bump(c=" << format_number(f.center()) << ", r=" << format_number(f.radius())
           << ")  residual " << format_number(v) << '\n';
    }
    arr.push_back({{"center", f.center()}, {"radius", f.radius()}, {"value", v}});
  }
  return arr;
}

json truncation_json(const RunConfig& cfg, const TargetDensity& pi, const LevyMeasure& mu,
                     std::ostream& out) {
  json arr = json::array();
  if (cfg.truncation_n.empty()) return arr;
  const auto& g = cfg.truncation_grid;
  const double hi = g.hi ? *g.hi : TargetCdf(pi).quantile(0.999);
  std::vector<double> grid;
  for (std::size_t i = 0; i < g.points; ++i) {
    grid.push_back(g.lo + (hi - g.lo) * static_cast<double>(i) / static_cast<double>(g.points - 1));
  }
  std::vector<unsigned> usable;
  for (unsigned n : cfg.truncation_n) {
    const double nn = static_cast<double>(n);
    if (mu.restricted(1.0 / nn, nn).is_zero()) {
      out << "  n=" << n << ": truncated measure is trivial, skipped\n";
      continue;
    }
    usable.push_back(n);
  }
  const auto report = truncation_report(pi, mu, usable, grid);
  for (const auto& r : report.rows) {
    out << "  n=" << r.n << "  sup|phi-phi_n| " << format_number(r.sup_error) << "  tail mass "
        << format_number(r.tail_mass) << '\n';
    arr.push_back({{"n", r.n}, {"sup_err", r.sup_error}, {"tail_mass", r.tail_mass}});
  }
  out << "  monotone: " << (report.monotone ? "yes" : "no")
      << ", ratio within 1.5x of smallest n: " << (report.ratio_bounded ? "yes" : "no") << '\n';
  return arr;
}

std::vector<double> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, 0, "cannot open samples file '" + path + "'");
  std::vector<double> v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line == "x") continue;
    if (line.empty()) continue;
    double d = 0.0;
    const auto r = std::from_chars(line.data(), line.data() + line.size(), d);
    if (r.ec != std::errc()) throw ConfigError(line_no, 1, "bad sample value in '" + path + "'");
    v.push_back(d);
  }
  return v;
}

struct SampleOutcome {
  EmpiricalDistribution samples;
  double ks = 0.0;
  double tv = 0.0;
  std::vector<double> modes;
};

// Sampling stage shared by `sample` and `reproduce`.
SampleOutcome run_sampling(const RunConfig& cfg, const fs::path& dir, const DriftField& field,
                           const TargetCdf& cdf, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto draws = stationary_draws(field, field.measure(), cfg.sim, cfg.samples);
  const auto t1 = std::chrono::steady_clock::now();
  SampleOutcome s{EmpiricalDistribution(draws), 0.0, 0.0, {}};
  s.ks = ks_distance(s.samples, cdf);
  s.tv = histogram_tv(s.samples, cdf, cfg.bins);
  s.modes = find_modes(s.samples);

  std::ostringstream csv;
  write_samples_csv(csv, draws);
  write_file(dir / "samples.csv", csv.str());
  std::ostringstream hist;
  write_histogram_csv(hist, s.samples, 0.0, std::max(cdf.cutoff(), s.samples.max()), cfg.bins);
  write_file(dir / "histogram.csv", hist.str());
  write_file(dir / "run_config.ini", to_config_text(cfg));

  out << "sampled " << cfg.samples << " skeleton states in "
      << std::chrono::duration<double>(t1 - t0).count() << " s\n";
  out << "KS distance " << format_number(s.ks) << ", binned TV " << format_number(s.tv) << '\n';
  out << "histogram modes:";
  for (double m : s.modes) out << ' ' << format_number(m);
  out << '\n';
  return s;
}

DriftField build_table(const RunConfig& cfg, const TargetDensity& pi, const LevyMeasure& mu,
                       std::ostream& out) {
  auto field = build_drift_table(pi, mu, cfg.table_points, table_options(cfg));
  out << "drift table: " << field.grid().size() << " nodes on [" << format_number(field.grid_min())
      << ", " << format_number(field.grid_max()) << "], max interpolation error "
      << format_number(field.validation_error()) << " after " << field.refinements()
      << " refinement(s)\n";
  if (field.accuracy_warning()) out << "warning: drift table tolerance not reached\n";
  return field;
}

json sim_json(const RunConfig& cfg) {
  return {{"seed", cfg.sim.seed},
          {"samples", cfg.samples},
          {"x0", cfg.sim.x0},
          {"dt_max", cfg.sim.dt_max},
          {"burn_in", cfg.sim.burn_in},
          {"skeleton_delta", cfg.sim.skeleton_delta},
          {"chains", cfg.sim.chains}};
}

}  // namespace

std::string output_directory(const RunConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "llmc_out";
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const auto checked = check_problem(cfg, out);
  const auto dir = prepare_dir(cfg);
  write_file(dir / "validation.json", checked.report.dump(2) + "\n");
  return checked.verdict == Verdict::Fail ? kValidationFailed : kOk;
}

int cmd_drift(const RunConfig& cfg, std::ostream& out) {
  const auto checked = check_problem(cfg, out);
  if (checked.verdict == Verdict::Fail) return kValidationFailed;
  const auto dir = prepare_dir(cfg);
  const auto field = build_table(cfg, *checked.pi, *checked.mu, out);
  std::ostringstream csv;
  field.write_csv(csv, cfg.table_points);
  write_file(dir / "drift.csv", csv.str());

  const auto values = field.values();
  out << "phi range [" << format_number(*std::min_element(values.begin(), values.end())) << ", "
      << format_number(*std::max_element(values.begin(), values.end())) << "]\n";
  const TargetCdf cdf(*checked.pi);
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double x = cdf.quantile(p);
    out << "  phi(" << format_number(x) << ") = " << format_number(field(x)) << "   ("
        << static_cast<int>(p * 100) << "% quantile)\n";
  }
  return kOk;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out) {
  const auto checked = check_problem(cfg, out);
  if (checked.verdict == Verdict::Fail) return kValidationFailed;
  const auto dir = prepare_dir(cfg);
  const auto& pi = *checked.pi;
  const auto& mu = *checked.mu;
  mu.require_valid();
  const auto field = build_table(cfg, pi, mu, out);
  const TargetCdf cdf(pi);
  const auto s = run_sampling(cfg, dir, field, cdf, out);

  out << "invariance residuals:\n";
  json diag;
  diag["ks"] = s.ks;
  diag["tv"] = s.tv;
  diag["residuals"] = residuals_json(pi, mu, default_bumps(cdf), 1.0, &out);
  diag["truncation"] = json::array();
  write_file(dir / "diagnostics.json", diag.dump(2) + "\n");

  json summary;
  summary["command"] = "sample";
  summary["validation"] = checked.report["verdict"];
  summary["sim"] = sim_json(cfg);
  summary["drift_table"] = {{"nodes", field.grid().size()},
                            {"validation_error", field.validation_error()}};
  summary["ks"] = s.ks;
  summary["tv"] = s.tv;
  summary["modes"] = s.modes;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return kOk;
}

int cmd_diagnose(const RunConfig& cfg, const std::optional<std::string>& samples_csv,
                 std::ostream& out) {
  const auto checked = check_problem(cfg, out);
  if (checked.verdict == Verdict::Fail) return kValidationFailed;
  const auto dir = prepare_dir(cfg);
  const auto& pi = *checked.pi;
  const auto& mu = *checked.mu;
  mu.require_valid();
  const TargetCdf cdf(pi);

  json diag;
  diag["ks"] = nullptr;
  diag["tv"] = nullptr;
  if (samples_csv) {
    const EmpiricalDistribution s(read_samples_csv(*samples_csv));
    diag["ks"] = ks_distance(s, cdf);
    diag["tv"] = histogram_tv(s, cdf, cfg.bins);
    out << "KS distance " << format_number(diag["ks"].get<double>()) << ", binned TV "
        << format_number(diag["tv"].get<double>()) << '\n';
  }
  const auto bumps = default_bumps(cdf);
  out << "invariance residuals:\n";
  diag["residuals"] = residuals_json(pi, mu, bumps, 1.0, &out);
  out << "negative control (drift scaled by 2):\n";
  diag["negative_control"] = residuals_json(pi, mu, bumps, 2.0, &out);
  out << "truncation:\n";
  diag["truncation"] = truncation_json(cfg, pi, mu, out);
  write_file(dir / "diagnostics.json", diag.dump(2) + "\n");
  return kOk;
}

RunConfig reproduce_config(const ReproduceOptions& opts) {
  if (opts.example_id != "double-well" && opts.example_id != "non-smooth") {
    throw PreconditionError("unknown example id '" + opts.example_id +
                            "' (expected double-well or non-smooth)");
  }
  RunConfig cfg;
  cfg.problem = example(opts.example_id, opts.raw_sign);
  cfg.sim.x0 = 1.0;
  cfg.sim.dt_max = 1e-3;
  cfg.sim.burn_in = 50.0;
  cfg.sim.skeleton_delta = 1.0;
  cfg.sim.record = RecordMode::Skeleton;
  cfg.sim.seed = opts.seed.value_or(42);
  cfg.sim.threads = opts.threads.value_or(1);
  cfg.samples = opts.samples.value_or(50000);
  if (cfg.samples == 0) throw ConfigError(0, 0, "samples must be at least 1");
  cfg.output_dir = opts.out_dir.value_or("");
  if (cfg.output_dir.empty()) {
    if (const char* env = std::getenv(kOutDirEnv); env && *env) {
      cfg.output_dir = (fs::path(env) / opts.example_id).string();
    } else {
      cfg.output_dir = "llmc_out/" + opts.example_id;
    }
  }
  return cfg;
}

int cmd_reproduce(const ReproduceOptions& opts, std::ostream& out) {
  const auto cfg = reproduce_config(opts);
  out << "== " << opts.example_id << (opts.raw_sign ? " (sign as printed)" : "") << " ==\n";
  out << "target: " << cfg.problem.target.density << '\n';
  const auto checked = check_problem(cfg, out);
  if (checked.verdict == Verdict::Fail) return kValidationFailed;
  const auto dir = prepare_dir(cfg);
  const auto& pi = *checked.pi;
  const auto& mu = *checked.mu;

  const auto field = build_table(cfg, pi, mu, out);
  std::ostringstream csv;
  field.write_csv(csv, cfg.table_points);
  write_file(dir / "drift.csv", csv.str());

  const TargetCdf cdf(pi);
  const auto s = run_sampling(cfg, dir, field, cdf, out);

  // One fully recorded path on a stream no sampling chain uses.
  SimConfig path_cfg = cfg.sim;
  path_cfg.record = RecordMode::Full;
  path_cfg.burn_in = 0.0;
  path_cfg.t_end = kPathHorizon;
  std::ostringstream path_csv;
  write_trajectory_csv(path_csv, simulate_path(field, mu, path_cfg, kPathStream));
  write_file(dir / "path.csv", path_csv.str());

  json diag;
  diag["ks"] = s.ks;
  diag["tv"] = s.tv;
  out << "invariance residuals:\n";
  diag["residuals"] = residuals_json(pi, mu, default_bumps(cdf), 1.0, &out);
  out << "truncation:\n";
  diag["truncation"] = truncation_json(cfg, pi, mu, out);
  write_file(dir / "diagnostics.json", diag.dump(2) + "\n");

  json summary;
  summary["example"] = opts.example_id;
  summary["validation"] = checked.report["verdict"];
  summary["sim"] = sim_json(cfg);
  summary["ks"] = s.ks;
  summary["ks_within_0.03"] = s.ks < 0.03;
  bool ok = s.ks < 0.03;
  if (opts.example_id == "double-well") {
    json modes = json::array();
    for (std::size_t i = 0; i < 2; ++i) {
      const double expected = kDoubleWellModes[i];
      const double found = i < s.modes.size() ? s.modes[i] : std::nan("");
      const bool close = std::abs(found - expected) <= 0.15;
      ok = ok && close;
      modes.push_back({{"expected", expected}, {"found", found}, {"within_0.15", close}});
      out << "mode near " << expected << ": " << format_number(found) << (close ? "  ok" : "  off")
          << '\n';
    }
    summary["modes"] = modes;
  } else {
    const double expected = non_smooth_plateau_mass();
    const double found = s.samples.mass_between(2.0, 4.0);
    const bool close = std::abs(found - expected) <= 0.01;
    ok = ok && close;
    summary["plateau_mass"] = {{"expected", expected}, {"found", found}, {"within_0.01", close}};
    out << "mass of (2, 4): " << format_number(found) << " (target " << format_number(expected)
        << ")" << (close ? "  ok" : "  off") << '\n';
  }
  summary["reproduced"] = ok;
  out << "reproduction " << (ok ? "matches" : "does NOT match") << " the reference values\n";
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Levy-driven Langevin Monte Carlo sampler"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> samples_csv;
  ReproduceOptions rep;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--seed", seed, "random seed (overrides [sim] seed)");
    sub->add_option("--out", out_dir, "output directory (overrides [output] directory)");
  };
  auto* validate = app.add_subcommand("validate", "check the standing assumptions");
  add_common(validate);
  auto* drift = app.add_subcommand("drift", "tabulate the drift as CSV");
  add_common(drift);
  auto* sample = app.add_subcommand("sample", "draw stationary samples with diagnostics");
  add_common(sample);
  auto* diagnose = app.add_subcommand("diagnose", "invariance residuals and truncation report");
  add_common(diagnose);
  diagnose->add_option("--samples", samples_csv, "sample CSV to compare against the target");
  auto* reproduce = app.add_subcommand("reproduce", "run a built-in example end to end");
  reproduce->add_option("example", rep.example_id, "double-well or non-smooth")->required();
  reproduce->add_flag("--raw-sign", rep.raw_sign, "double well with the exponent sign as printed");
  reproduce->add_option("--samples", rep.samples, "number of skeleton samples (default 50000)");
  reproduce->add_option("--seed", rep.seed, "random seed (default 42)");
  reproduce->add_option("--out", rep.out_dir, "output directory");
  reproduce->add_option("--threads", rep.threads, "worker threads for the drift table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (reproduce->parsed()) return cmd_reproduce(rep, out);
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.sim.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    if (validate->parsed()) return cmd_validate(cfg, out);
    if (drift->parsed()) return cmd_drift(cfg, out);
    if (sample->parsed()) return cmd_sample(cfg, out);
    return cmd_diagnose(cfg, samples_csv, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const dsl::SyntaxError& e) {
    err << "expression error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << '\n';
    return kConfigError;
  } catch (const MalformedDensity& e) {
    err << "validation failure: " << e.what() << '\n';
    return kValidationFailed;
  } catch (const InvalidMeasure& e) {
    err << "validation failure: " << e.what() << '\n';
    return kValidationFailed;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace llmc::cli
