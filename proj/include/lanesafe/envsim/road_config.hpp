#pragma once

#include <cstddef>
#include <filesystem>

#include "lanesafe/envsim/idm.hpp"
#include "lanesafe/envsim/rewards.hpp"

namespace lanesafe::envsim {

/// Which reward total the environment reports. The constrained mode leaves the
/// collision penalty out of the total (collisions still end the episode).
enum class RewardMode { CollisionPenalty, CostConstrained };

struct RoadConfig {
  double length = 1000.0;                 // m
  int lane_count = 2;
  double perception_radius = 200.0;       // m
  double density = 15.0;                  // veh/km
  double traffic_initial_speed = 8.33;    // m/s
  double traffic_max_speed = 16.67;       // m/s
  double spawn_buffer = 50.0;             // m
  double vehicle_length = 5.0;            // m
  double min_spawn_gap = 15.0;            // bumper to bumper, m
  double ego_initial_speed = 8.33;        // m/s
  double dt = 0.1;                        // s
  int decision_interval = 10;             // physics steps per lane-change decision
  int max_steps = 1000;
  RewardMode reward_mode = RewardMode::CollisionPenalty;
  IdmParams idm;
  RewardParams rewards;

  /// floor(density * length / 1000).
  std::size_t traffic_count() const noexcept;
  /// Throws ConfigError for non-physical values.
  void validate() const;
};

/// Reads a JSON scenario file. Keys mirror the RoadConfig fields; missing keys
/// keep their defaults, unknown keys are rejected.
RoadConfig load_road_config(const std::filesystem::path& path);
void save_road_config(const std::filesystem::path& path, const RoadConfig& config);

}  // namespace lanesafe::envsim
