#include "lanesafe/harness/toy_envs.hpp"

#include <algorithm>
#include <cmath>

#include "lanesafe/error.hpp"

namespace lanesafe::harness {

ToyChaseEnv::ToyChaseEnv(ChaseParams params) : p_(params) {
  if (!(p_.dt > 0.0) || !(p_.accel_limit > 0.0) || !(p_.initial_gap > 0.0) || p_.horizon < 1)
    throw ConfigError("invalid chase parameters");
}

std::vector<double> ToyChaseEnv::observation() const {
  return {gap_ / p_.initial_gap, closing_ / (p_.accel_limit * p_.dt * p_.horizon)};
}

std::vector<double> ToyChaseEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  gap_ = p_.initial_gap * rng.uniform(0.9, 1.1);
  closing_ = 0.0;
  t_ = 0;
  return observation();
}

EnvStep ToyChaseEnv::step(const pasac::HybridAction& action) {
  if (t_ >= p_.horizon) throw ContractError("step: episode already finished");
  const double a = action.acceleration;
  if (!std::isfinite(a) || std::abs(a) > p_.accel_limit)
    throw ValidationError("step: acceleration outside the chase limits");
  // Positive acceleration speeds the chaser up, so the gap closes faster.
  closing_ -= a * p_.dt;
  gap_ += closing_ * p_.dt;
  if (gap_ < 0.0) {
    gap_ = 0.0;
    closing_ = std::max(closing_, 0.0);
  }
  ++t_;
  EnvStep s;
  s.observation = observation();
  s.reward = p_.reward_scale * (p_.initial_gap - gap_);
  s.cost = gap_ < p_.cost_gap ? 1.0 : 0.0;
  s.done = t_ >= p_.horizon;
  s.terminal = false;
  s.reason = s.done ? "time_limit" : "running";
  return s;
}

PointReachEnv::PointReachEnv(PointParams params) : p_(params) {
  if (!(p_.gain > 0.0) || p_.horizon < 1) throw ConfigError("invalid point parameters");
}

std::vector<double> PointReachEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  x_ = rng.uniform(-1.0, 1.0);
  t_ = 0;
  return {x_};
}

EnvStep PointReachEnv::step(const pasac::HybridAction& action) {
  if (t_ >= p_.horizon) throw ContractError("step: episode already finished");
  const double a = action.acceleration;
  if (!std::isfinite(a) || std::abs(a) > 1.0) throw ValidationError("step: action outside [-1, 1]");
  x_ += p_.gain * a;
  ++t_;
  EnvStep s;
  s.observation = {x_};
  s.reward = -std::abs(x_);
  s.done = t_ >= p_.horizon;
  s.reason = s.done ? "time_limit" : "running";
  return s;
}

}  // namespace lanesafe::harness
