#include "llmc/sampler.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "llmc/random.hpp"
#include "parallel.hpp"

namespace llmc {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

void check_common(const SimConfig& cfg) {
  if (!(cfg.x0 > 0.0) || !std::isfinite(cfg.x0)) throw PreconditionError("x0 must be positive");
  if (!(cfg.dt_max > 0.0)) throw PreconditionError("dt_max must be positive");
  if (!(cfg.skeleton_delta > 0.0)) throw PreconditionError("skeleton_delta must be positive");
  if (cfg.dt_max > cfg.skeleton_delta) {
    throw PreconditionError("dt_max must not exceed skeleton_delta");
  }
  if (!(cfg.burn_in >= 0.0)) throw PreconditionError("burn_in must be non-negative");
}

Trajectory run_path(const DriftField& field, const LevyMeasure& mu, const SimConfig& cfg,
                    std::uint64_t stream) {
  const double rate = mu.total_mass();
  RandomStream rng(cfg.seed, stream);
  Trajectory tr;
  const bool full = cfg.record == RecordMode::Full;
  const bool skeleton = cfg.record == RecordMode::Skeleton;
  auto record = [&tr](double time, double state, char flag) {
    tr.times.push_back(time);
    tr.states.push_back(state);
    tr.jump_flags.push_back(flag);
  };

  double t = 0.0;
  double x = cfg.x0;
  if (full) record(t, x, 0);

  std::uint64_t k = 0;
  auto skeleton_time = [&cfg](std::uint64_t i) {
    const double s = cfg.burn_in + static_cast<double>(i) * cfg.skeleton_delta;
    return s <= cfg.t_end ? s : kNever;
  };
  double next_skeleton = skeleton ? skeleton_time(0) : kNever;
  double next_jump = rng.exponential(rate);

  for (;;) {
    const double target = std::min({next_jump, next_skeleton, cfg.t_end});
    while (t < target) {
      const double h = std::min(cfg.dt_max, target - t);
      x = flow_step(field, x, h);
      t = target - t <= cfg.dt_max ? target : t + h;
      if (full) record(t, x, 0);
    }
    if (target == next_skeleton) {
      record(t, x, 0);
      next_skeleton = skeleton_time(++k);
    }
    if (target == next_jump) {
      const double xi = mu.sample(rng);
      const double after = x + xi;
      tr.jumps.push_back({t, xi, x, after});
      x = after;
      if (full) record(t, x, 1);
      next_jump = t + rng.exponential(rate);
    }
    if (target >= cfg.t_end) break;
  }
  if (cfg.record == RecordMode::Endpoint) record(t, x, 0);
  tr.final_time = t;
  tr.final_state = x;
  return tr;
}

}  // namespace

void check_config(const SimConfig& cfg) {
  check_common(cfg);
  if (!(cfg.t_end > cfg.burn_in)) throw PreconditionError("burn_in must be below t_end");
}

Trajectory simulate_path(const DriftField& field, const LevyMeasure& mu, const SimConfig& cfg,
                         std::uint64_t stream) {
  check_config(cfg);
  return run_path(field, mu, cfg, stream);
}

std::vector<double> stationary_draws(const DriftField& field, const LevyMeasure& mu,
                                     const SimConfig& cfg, std::size_t n) {
  check_common(cfg);
  if (n == 0) throw PreconditionError("sample count must be at least 1");
  if (cfg.chains == 0) throw PreconditionError("chains must be at least 1");
  const std::size_t chains = std::min<std::size_t>(cfg.chains, n);
  std::vector<std::vector<double>> per_chain(chains);
  detail::parallel_for(chains, cfg.threads, [&](std::size_t c) {
    const std::size_t share = n / chains + (c < n % chains ? 1 : 0);
    SimConfig local = cfg;
    local.record = RecordMode::Skeleton;
    local.t_end = cfg.burn_in + static_cast<double>(share - 1) * cfg.skeleton_delta;
    per_chain[c] = run_path(field, mu, local, c).states;
  });
  std::vector<double> out;
  out.reserve(n);
  for (const auto& v : per_chain) out.insert(out.end(), v.begin(), v.end());
  if (out.size() != n) {
    throw NumericalError("skeleton produced " + std::to_string(out.size()) + " draws, expected " +
                         std::to_string(n));
  }
  return out;
}

EmpiricalDistribution sample_stationary(const DriftField& field, const LevyMeasure& mu,
                                        const SimConfig& cfg, std::size_t n) {
  return EmpiricalDistribution(stationary_draws(field, mu, cfg, n));
}

}  // namespace llmc
