#pragma once

namespace lanesafe::envsim {

struct RewardParams {
  double safe_distance = 25.0;        // d_safe, m
  double speed_limit = 13.89;         // v_limit, m/s
  double speed_band_low = 13.89;      // m/s
  double speed_band_high = 16.67;     // m/s
  double lane_change_close = -4.0;    // front gap below d_safe
  double lane_change_open = -20.0;    // front gap at or above d_safe
  double speed_weight = 0.1;
  double distance_weight = 1.0;
  double jerk_weight = 0.005;
  double collision_penalty = -200.0;
  double ttc_threshold = 2.7;         // s
};

/// Penalty for a lane change given the current-lane front gap before the switch.
double reward_lane_change(double front_gap, bool changed, const RewardParams& p = {});

/// Speed keeping term; zero while the front gap is below d_safe.
double reward_speed(double ego_speed, double front_gap, const RewardParams& p = {});

/// Following-distance penalty over the same-lane front and rear gaps.
double reward_distance(double front_gap, double rear_gap, const RewardParams& p = {});

double reward_jerk(double accel, double previous_accel, const RewardParams& p = {});

/// Time to collision with a leader (ego faster) or follower (follower faster).
/// Returns false when the closing speed is not positive.
bool time_to_collision(double gap, double closing_speed, double& ttc);

/// 1 if the front or rear time to collision lies in (0, threshold), else 0.
int ttc_cost(double ego_speed, double front_speed, double front_gap, double rear_speed,
             double rear_gap, const RewardParams& p = {});

}  // namespace lanesafe::envsim
