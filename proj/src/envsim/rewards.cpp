#include "lanesafe/envsim/rewards.hpp"

#include <algorithm>
#include <cmath>

namespace lanesafe::envsim {

double reward_lane_change(double front_gap, bool changed, const RewardParams& p) {
  if (!changed) return 0.0;
  return front_gap < p.safe_distance ? p.lane_change_close : p.lane_change_open;
}

double reward_speed(double ego_speed, double front_gap, const RewardParams& p) {
  if (front_gap < p.safe_distance) return 0.0;
  const double deviation = std::abs(ego_speed - p.speed_limit);
  const bool in_band = ego_speed >= p.speed_band_low && ego_speed <= p.speed_band_high;
  return (in_band ? p.speed_weight : -p.speed_weight) * deviation;
}

double reward_distance(double front_gap, double rear_gap, const RewardParams& p) {
  if (front_gap <= p.safe_distance || rear_gap <= p.safe_distance)
    return -p.distance_weight * (p.safe_distance - std::min(front_gap, rear_gap));
  return 0.0;
}

double reward_jerk(double accel, double previous_accel, const RewardParams& p) {
  return -p.jerk_weight * std::abs(accel - previous_accel);
}

bool time_to_collision(double gap, double closing_speed, double& ttc) {
  if (!(closing_speed > 0.0)) return false;
  ttc = gap / closing_speed;
  return true;
}

int ttc_cost(double ego_speed, double front_speed, double front_gap, double rear_speed,
             double rear_gap, const RewardParams& p) {
  auto fires = [&](double gap, double closing) {
    double ttc = 0.0;
    return time_to_collision(gap, closing, ttc) && ttc > 0.0 && ttc < p.ttc_threshold;
  };
  return (fires(front_gap, ego_speed - front_speed) || fires(rear_gap, rear_speed - ego_speed)) ? 1
                                                                                                : 0;
}

}  // namespace lanesafe::envsim
