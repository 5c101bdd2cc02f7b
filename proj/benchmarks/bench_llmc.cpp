#include <benchmark/benchmark.h>

#include <vector>

#include "llmc/catalog.hpp"
#include "llmc/diagnostics.hpp"
#include "llmc/drift.hpp"
#include "llmc/drift_field.hpp"
#include "llmc/sampler.hpp"

namespace {

using namespace llmc;

const Problem& problem(int which) {
  static const Problem dw = build_problem(example("double-well"));
  static const Problem ns = build_problem(example("non-smooth"));
  return which == 0 ? dw : ns;
}

const char* label(int which) { return which == 0 ? "double-well" : "non-smooth"; }

void BM_DriftCp(benchmark::State& state) {
  const auto& p = problem(static_cast<int>(state.range(0)));
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(drift_cp(p.pi, p.mu, x));
    x = x > 9.0 ? 0.5 : x + 0.37;
  }
  state.SetLabel(label(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DriftCp)->Arg(0)->Arg(1);

void BM_DriftAlt(benchmark::State& state) {
  const auto& p = problem(static_cast<int>(state.range(0)));
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(drift_alt(p.pi, p.mu, x));
    x = x > 9.0 ? 0.5 : x + 0.37;
  }
  state.SetLabel(label(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DriftAlt)->Arg(0)->Arg(1);

void BM_BuildTable(benchmark::State& state) {
  const auto& p = problem(static_cast<int>(state.range(0)));
  DriftTableOptions opts;
  opts.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_drift_table(p.pi, p.mu, 512, opts));
  }
  state.SetLabel(label(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BuildTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TableLookup(benchmark::State& state) {
  const auto& p = problem(1);
  static const DriftField field = build_drift_table(p.pi, p.mu);
  double x = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(field(x));
    x = x > 60.0 ? 1e-3 : x * 1.013 + 1e-4;
  }
}
BENCHMARK(BM_TableLookup);

void BM_SimulatePath(benchmark::State& state) {
  const auto& p = problem(static_cast<int>(state.range(0)));
  static const DriftField dw = build_drift_table(problem(0).pi, problem(0).mu);
  static const DriftField ns = build_drift_table(problem(1).pi, problem(1).mu);
  const DriftField& field = state.range(0) == 0 ? dw : ns;
  SimConfig cfg;
  cfg.t_end = 100.0;
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_path(field, p.mu, cfg, stream++));
  }
  state.SetLabel(label(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SimulatePath)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KsDistance(benchmark::State& state) {
  const auto& p = problem(1);
  const TargetCdf cdf(p.pi);
  std::vector<double> v;
  for (int i = 0; i < 50000; ++i) v.push_back(cdf.quantile((i + 0.5) / 50000.0));
  const EmpiricalDistribution e(v);
  for (auto _ : state) benchmark::DoNotOptimize(ks_distance(e, cdf));
}
BENCHMARK(BM_KsDistance)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
