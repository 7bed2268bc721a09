#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lanesafe/envsim/road_config.hpp"
#include "lanesafe/envsim/trajectory.hpp"
#include "lanesafe/harness/environment.hpp"
#include "lanesafe/pasac/agent.hpp"

namespace lanesafe::harness {

/// Per-episode sums from which every reported metric is derived.
struct EpisodeSummary {
  std::size_t steps = 0;
  double reward_sum = 0.0;
  double accel_sum = 0.0;
  double speed_sum = 0.0;
  double jerk_sum = 0.0;          // sum |a_t - a_{t-1}| / dt, m/s^3
  double jerk_penalty_sum = 0.0;  // sum of the undivided jerk reward term
  double cost_sum = 0.0;
  std::size_t lane_changes = 0;
  bool collided = false;
  std::string termination = "running";
};

struct EvalMetrics {
  std::size_t episodes = 0;
  std::size_t total_steps = 0;
  double average_reward = 0.0;        // per step
  double collision_rate = 0.0;        // colliding episodes / episodes
  double average_acceleration = 0.0;  // m/s^2
  double average_speed = 0.0;         // m/s
  double average_jerk = 0.0;          // m/s^3
  double average_jerk_penalty = 0.0;  // per step
  std::size_t lane_changes = 0;
  double mean_episode_cost = 0.0;
};

/// Order-independent aggregation (sums and counts).
EvalMetrics aggregate(std::span<const EpisodeSummary> episodes);

struct EvalResult {
  EvalMetrics metrics;
  std::vector<EpisodeSummary> episodes;
  std::vector<std::vector<envsim::TrajectoryRow>> trajectories;  // when requested
};

/// Runs the deterministic policy for `episodes` episodes on independently
/// seeded worlds; episodes are spread across OpenMP threads.
EvalResult evaluate(const pasac::Agent& agent, const envsim::RoadConfig& road,
                    std::size_t episodes, std::uint64_t seed, bool keep_trajectories = false);

/// Recomputes one episode's summary from its exported trajectory.
EpisodeSummary summarize_trajectory(std::span<const envsim::TrajectoryRow> rows,
                                    const envsim::RoadConfig& road);

/// Mean undiscounted return of the deterministic policy on `env`.
double mean_return(const pasac::Agent& agent, Environment& env, std::size_t episodes,
                   std::uint64_t seed);

}  // namespace lanesafe::harness
