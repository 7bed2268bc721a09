#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "lanesafe/envsim/road_config.hpp"
#include "lanesafe/envsim/world.hpp"
#include "lanesafe/nnet/heads.hpp"
#include "lanesafe/pasac/types.hpp"

namespace lanesafe::harness {

struct EnvStep {
  std::vector<double> observation;
  double reward = 0.0;
  double cost = 0.0;
  bool done = false;      // episode over for any reason
  bool terminal = false;  // true terminal (no bootstrap)
  std::string_view reason = "running";
  bool lane_changed = false;
};

/// Episodic environment driven by the training loop.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t num_discrete() const = 0;
  virtual nnet::ActionBounds action_bounds() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual EnvStep step(const pasac::HybridAction& action) = 0;
};

/// The highway lane-change world behind the Environment interface.
class LaneChangeEnv final : public Environment {
 public:
  explicit LaneChangeEnv(envsim::RoadConfig config);

  std::size_t state_dim() const override { return envsim::kObservationSize; }
  std::size_t num_discrete() const override { return 2; }
  nnet::ActionBounds action_bounds() const override { return pasac::kAccelerationBounds; }
  std::vector<double> reset(std::uint64_t seed) override;
  EnvStep step(const pasac::HybridAction& action) override;

  const envsim::World& world() const;
  const envsim::StepOutcome& last_outcome() const noexcept { return last_; }

 private:
  envsim::RoadConfig config_;
  std::optional<envsim::World> world_;
  envsim::StepOutcome last_;
};

}  // namespace lanesafe::harness
