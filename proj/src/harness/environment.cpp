#include "lanesafe/harness/environment.hpp"

#include "lanesafe/error.hpp"

namespace lanesafe::harness {

LaneChangeEnv::LaneChangeEnv(envsim::RoadConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::vector<double> LaneChangeEnv::reset(std::uint64_t seed) {
  if (world_)
    world_->reset(seed);
  else
    world_.emplace(config_, seed);
  last_ = {};
  const auto obs = world_->observe();
  return {obs.begin(), obs.end()};
}

EnvStep LaneChangeEnv::step(const pasac::HybridAction& action) {
  if (!world_) throw ContractError("step called before reset");
  last_ = world_->step(action);
  EnvStep s;
  s.observation.assign(last_.observation.begin(), last_.observation.end());
  s.reward = last_.total_reward;
  s.cost = last_.cost;
  s.done = last_.done;
  s.terminal = last_.terminal();
  s.reason = envsim::to_string(last_.reason);
  s.lane_changed = last_.lane_changed;
  return s;
}

const envsim::World& LaneChangeEnv::world() const {
  if (!world_) throw ContractError("world accessed before reset");
  return *world_;
}

}  // namespace lanesafe::harness
