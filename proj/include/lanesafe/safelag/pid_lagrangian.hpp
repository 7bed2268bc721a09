#pragma once

namespace lanesafe::safelag {

/// Proportional, integral and derivative gains of the multiplier controller.
struct PidGains {
  double kp = 2e-6;
  double ki = 2e-7;
  double kd = 1e-7;

  void validate() const;
};

/// Multiplier and controller memory.
struct PidDualState {
  double lambda = 0.001;
  double integral = 0.0;       // running sum of all past errors
  double previous_cost = 0.0;  // J_c seen at the previous update
  double cost_limit = 0.0;     // d

  // Terms of the most recent update, kept for logging.
  double last_error = 0.0;
  double last_delta = 0.0;
};

/// e = J_c - d; I += e; de = J_c - J_prev; lambda = max(lambda + kp e + ki I + kd de, 0);
/// J_prev = J_c. Throws ValidationError for non-finite J_c.
PidDualState pid_update(const PidDualState& state, const PidGains& gains, double episode_cost);

/// Integral-only baseline: lambda = max(lambda + step_size (J_c - d), 0).
/// Leaves the PID memory untouched apart from the logged error.
PidDualState integral_update(const PidDualState& state, double step_size, double episode_cost);

}  // namespace lanesafe::safelag
