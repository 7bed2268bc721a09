#pragma once

#include <limits>

namespace lanesafe::envsim {

/// Intelligent driver model parameters (SUMO-style defaults).
struct IdmParams {
  double max_accel = 2.6;          // a, m/s^2
  double comfortable_decel = 4.5;  // b, m/s^2
  double exponent = 4.0;           // delta
  double min_gap = 2.0;            // s0, m
  double time_headway = 1.0;       // T, s
  double desired_speed = 16.67;    // v0, m/s
};

inline constexpr double kNoLeaderGap = std::numeric_limits<double>::infinity();

/// a = a_max (1 - (v/v0)^delta - (s*/gap)^2) with
/// s* = s0 + max(0, v T + v (v - v_lead) / (2 sqrt(a_max b))), clamped to
/// [-9.8, 5.0]. Pass kNoLeaderGap for a free road. `gap` must be positive.
double idm_accel(double v, double v_lead, double gap, const IdmParams& params = {});

}  // namespace lanesafe::envsim
