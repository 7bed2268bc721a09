#pragma once

#include "lanesafe/harness/environment.hpp"
#include "lanesafe/rng.hpp"

namespace lanesafe::harness {

/// Small constrained chase used to check multiplier convergence quickly.
/// The agent closes on a target moving at constant speed (a 1-D double
/// integrator in gap and closing speed). Reward grows as the gap shrinks;
/// each step with the gap under `cost_gap` costs 1.
struct ChaseParams {
  double dt = 0.5;
  double accel_limit = 1.0;
  double initial_gap = 10.0;
  double cost_gap = 3.0;
  double reward_scale = 0.1;
  int horizon = 20;
};

class ToyChaseEnv final : public Environment {
 public:
  explicit ToyChaseEnv(ChaseParams params = {});

  std::size_t state_dim() const override { return 2; }
  std::size_t num_discrete() const override { return 1; }
  nnet::ActionBounds action_bounds() const override { return {-p_.accel_limit, p_.accel_limit}; }
  std::vector<double> reset(std::uint64_t seed) override;
  EnvStep step(const pasac::HybridAction& action) override;

  const ChaseParams& params() const noexcept { return p_; }
  double gap() const noexcept { return gap_; }

 private:
  std::vector<double> observation() const;

  ChaseParams p_;
  double gap_ = 0.0;
  double closing_ = 0.0;  // target speed minus agent speed
  int t_ = 0;
};

/// One-dimensional point that should be driven to the origin: x' = x + gain * a,
/// reward -|x|, x0 ~ U[-1, 1], fixed horizon. Single discrete action.
struct PointParams {
  double gain = 0.1;
  int horizon = 50;
};

class PointReachEnv final : public Environment {
 public:
  explicit PointReachEnv(PointParams params = {});

  std::size_t state_dim() const override { return 1; }
  std::size_t num_discrete() const override { return 1; }
  nnet::ActionBounds action_bounds() const override { return {-1.0, 1.0}; }
  std::vector<double> reset(std::uint64_t seed) override;
  EnvStep step(const pasac::HybridAction& action) override;

  double position() const noexcept { return x_; }
  const PointParams& params() const noexcept { return p_; }

 private:
  PointParams p_;
  double x_ = 0.0;
  int t_ = 0;
};

}  // namespace lanesafe::harness
