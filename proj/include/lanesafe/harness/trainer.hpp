#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lanesafe/envsim/road_config.hpp"
#include "lanesafe/harness/config.hpp"
#include "lanesafe/harness/environment.hpp"
#include "lanesafe/pasac/agent.hpp"
#include "lanesafe/rng.hpp"
#include "lanesafe/safelag/pid_lagrangian.hpp"

namespace lanesafe::harness {

struct StepRecord {
  std::uint64_t step = 0;
  std::uint64_t episode = 0;
  double reward = 0.0;
  double cost = 0.0;
  double lambda = 0.0;
  double cost_estimate = 0.0;  // J_C estimate after the latest completed episode
  double pid_error = 0.0;
  double pid_integral = 0.0;
  double pid_delta = 0.0;
  double q1_loss = 0.0;
  double q2_loss = 0.0;
  double cost_loss = 0.0;
  double actor_loss = 0.0;
  double discrete_entropy = 0.0;
  bool updated = false;  // a gradient phase ran at this step
};

struct EpisodeRecord {
  std::uint64_t episode = 0;
  std::uint64_t end_step = 0;  // global step index of the last transition
  double episode_return = 0.0;
  double cost_total = 0.0;
  std::uint64_t length = 0;
  std::string termination;
  double lambda = 0.0;  // multiplier after this episode's update
  double cost_estimate = 0.0;
};

struct RunLog {
  std::vector<StepRecord> steps;
  std::vector<EpisodeRecord> episodes;
  bool constrained = false;  // a lambda series exists
  SeedSet seeds;
};

struct TrainHooks {
  std::function<void(const EpisodeRecord&)> on_episode;
};

struct TrainResult {
  pasac::Agent agent;
  RunLog log;
  safelag::PidDualState dual;
};

/// Raised when losses stay non-finite for more than 100 consecutive updates.
class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Agent hyperparameters for `env` from a training configuration.
pasac::AgentConfig agent_config_for(const TrainConfig& config, const Environment& env);

/// Road scenario used by train(config): the configured density and, for the
/// constrained algorithms, the reward total without the collision penalty.
envsim::RoadConfig road_config_for(const TrainConfig& config);

/// Interaction and update loop. Deterministic given config.seed.
TrainResult train(const TrainConfig& config, Environment& env, const TrainHooks& hooks = {});

/// Trains on the lane-change world built by road_config_for(config).
TrainResult train(const TrainConfig& config, const TrainHooks& hooks = {});

}  // namespace lanesafe::harness
