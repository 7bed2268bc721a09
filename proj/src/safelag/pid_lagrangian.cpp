#include "lanesafe/safelag/pid_lagrangian.hpp"

#include <algorithm>
#include <cmath>

#include "lanesafe/error.hpp"

namespace lanesafe::safelag {

void PidGains::validate() const {
  if (!(kp >= 0.0) || !(ki >= 0.0) || !(kd >= 0.0))
    throw ConfigError("PID gains must be non-negative");
}

PidDualState pid_update(const PidDualState& state, const PidGains& gains, double episode_cost) {
  if (!std::isfinite(episode_cost)) throw ValidationError("pid_update: non-finite cost estimate");
  PidDualState next = state;
  const double e = episode_cost - state.cost_limit;
  next.integral = state.integral + e;
  const double delta = episode_cost - state.previous_cost;
  next.lambda = std::max(state.lambda + gains.kp * e + gains.ki * next.integral + gains.kd * delta, 0.0);
  next.previous_cost = episode_cost;
  next.last_error = e;
  next.last_delta = delta;
  return next;
}

PidDualState integral_update(const PidDualState& state, double step_size, double episode_cost) {
  if (!(step_size > 0.0)) throw ValidationError("integral_update: step size must be positive");
  if (!std::isfinite(episode_cost))
    throw ValidationError("integral_update: non-finite cost estimate");
  PidDualState next = state;
  const double e = episode_cost - state.cost_limit;
  next.lambda = std::max(state.lambda + step_size * e, 0.0);
  next.last_error = e;
  next.last_delta = episode_cost - state.previous_cost;
  next.previous_cost = episode_cost;
  return next;
}

}  // namespace lanesafe::safelag
