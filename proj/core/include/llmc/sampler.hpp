#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "llmc/drift_field.hpp"
#include "llmc/empirical.hpp"
#include "llmc/error.hpp"
#include "llmc/measure.hpp"

namespace llmc {

enum class RecordMode { Full, Skeleton, Endpoint };

struct SimConfig {
  double x0 = 1.0;
  double t_end = 100.0;
  double dt_max = 1e-3;
  std::uint64_t seed = 1;
  RecordMode record = RecordMode::Skeleton;
  double burn_in = 50.0;
  double skeleton_delta = 1.0;
  /// Independent chains for sample_stationary; chain c uses stream c.
  unsigned chains = 1;
  /// Worker threads for the chains; 0 picks the hardware count. Output does
  /// not depend on this value.
  unsigned threads = 1;
};

/// Throws PreconditionError unless x0 > 0, 0 < dt_max <= skeleton_delta and
/// burn_in < t_end.
void check_config(const SimConfig& cfg);

struct JumpEvent {
  double time = 0.0;
  double size = 0.0;
  double state_before = 0.0;
  double state_after = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;
  /// 1 for the post-jump entry recorded at a jump time.
  std::vector<char> jump_flags;
  std::vector<JumpEvent> jumps;
  double final_time = 0.0;
  double final_state = 0.0;
};

/// Maximum bisection depth of flow_step.
inline constexpr int kMaxFlowDepth = 60;

namespace detail {

template <class Drift>
double flow_step(const Drift& phi, double x, double dt, int depth) {
  if (depth > kMaxFlowDepth) throw StiffnessError(x, phi(x), dt);
  const double v = phi(x);
  if (!(v < 0.0)) throw FormulaInconsistency("drift is not negative");
  const double candidate = x + v * dt;
  const double change = -v * dt;
  if (candidate >= x) return x;  // step below the resolution of x
  bool accept = candidate > 0.5 * x;
  if (accept && change > 1e-8 * std::max(x, 1.0)) {
    // The drift at the landing point must stay within a factor of two of
    // the drift used for the step, or the Euler step jumped over a region
    // where the flow changes speed.
    const double w = std::abs(phi(candidate));
    accept = w >= 0.5 * std::abs(v) && w <= 2.0 * std::abs(v);
  }
  if (accept) return candidate;
  const double mid = flow_step(phi, x, 0.5 * dt, depth + 1);
  return flow_step(phi, mid, 0.5 * dt, depth + 1);
}

}  // namespace detail

/// One Euler step of q' = phi(q), bisected until every sub-step keeps the
/// state above half its value and the drift within a factor two.
template <class Drift>
double flow_step(const Drift& phi, double x, double dt) {
  if (!(x > 0.0) || !(dt > 0.0)) throw PreconditionError("flow_step needs x > 0 and dt > 0");
  return detail::flow_step(phi, x, dt, 0);
}

/// Event-driven simulation of dX = phi(X) dt + dL on one random stream.
Trajectory simulate_path(const DriftField& field, const LevyMeasure& mu, const SimConfig& cfg,
                         std::uint64_t stream = 0);

/// Skeleton draws X_{burn_in + k delta} from cfg.chains chains, concatenated
/// in chain order. t_end is set per chain to fit its share of n draws.
std::vector<double> stationary_draws(const DriftField& field, const LevyMeasure& mu,
                                     const SimConfig& cfg, std::size_t n);

EmpiricalDistribution sample_stationary(const DriftField& field, const LevyMeasure& mu,
                                        const SimConfig& cfg, std::size_t n);

}  // namespace llmc
