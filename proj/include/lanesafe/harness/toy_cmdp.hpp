#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lanesafe/harness/toy_envs.hpp"
#include "lanesafe/safelag/pid_lagrangian.hpp"

namespace lanesafe::harness {

struct ToyCmdpOptions {
  std::size_t episodes = 2000;
  std::uint64_t seed = 7;
  ChaseParams chase{};
  safelag::PidGains gains{0.002, 1e-5, 0.3};
  double cost_limit = 2.0;
  double lambda_init = 0.0;
  std::vector<std::size_t> hidden{32, 32};
  std::size_t batch_size = 64;
  std::uint64_t warmup_steps = 1000;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  double gamma = 0.95;
  double alpha = 0.05;
  double tau = 0.01;
  std::size_t cost_window = 10;
  /// Window of the running mean that settling and overshoot are judged on.
  std::size_t smoothing_window = 50;
};

/// Per-episode series of one constrained run.
struct ToyCmdpTrace {
  std::vector<double> episode_cost;
  std::vector<double> cost_estimate;  // running mean episode cost after each episode
  std::vector<double> lambda;
  double peak = 0.0;     // max running-mean cost
  double final = 0.0;    // running-mean cost at the last episode
  double min_lambda = 0.0;
  std::size_t settled_at = 0;  // first episode after which the estimate stays under the settle bound
  bool settled = false;
};

struct ToyCmdpReport {
  ToyCmdpTrace pid;
  ToyCmdpTrace integral;
  double settle_bound = 0.0;  // d + 0.1 * peak of the PID run
};

/// Trains the PID and integral-only variants with matched settings (integral
/// step = kp, same seed) and summarizes their cost trajectories.
ToyCmdpReport run_toy_cmdp(const ToyCmdpOptions& options);

/// Fills peak/final/settling fields of a trace from its series.
void summarize_trace(ToyCmdpTrace& trace, double cost_limit);

}  // namespace lanesafe::harness
