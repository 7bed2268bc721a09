#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "lanesafe/envsim/world.hpp"

namespace lanesafe::envsim {

/// One vehicle at one step; the CSV columns in order.
struct TrajectoryRow {
  int step = 0;
  int vehicle_id = 0;
  int lane = 0;
  double position_m = 0.0;
  double speed_mps = 0.0;
  double accel_mps2 = 0.0;
};

/// Appends every vehicle of `world` at its current step.
void record_snapshot(const World& world, std::vector<TrajectoryRow>& rows);

/// Header `step,vehicle_id,lane,position_m,speed_mps,accel_mps2`, values
/// printed with 17 significant digits so they parse back exactly.
void write_trajectory_csv(const std::filesystem::path& path, std::span<const TrajectoryRow> rows);
std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path);

/// Rebuilds the vehicle snapshot of each step from trajectory rows (rows must
/// be grouped by step, ascending). Vehicle 0 is taken to be the ego.
std::vector<std::vector<VehicleState>> snapshots_from_rows(std::span<const TrajectoryRow> rows,
                                                           const RoadConfig& config);

}  // namespace lanesafe::envsim
