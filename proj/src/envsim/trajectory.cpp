#include "lanesafe/envsim/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "lanesafe/error.hpp"

namespace lanesafe::envsim {

namespace {
constexpr const char* kHeader = "step,vehicle_id,lane,position_m,speed_mps,accel_mps2";
}

void record_snapshot(const World& world, std::vector<TrajectoryRow>& rows) {
  for (const auto& v : world.vehicles())
    rows.push_back({world.step_index(), v.id, v.lane, v.position, v.speed, v.acceleration});
}

void write_trajectory_csv(const std::filesystem::path& path, std::span<const TrajectoryRow> rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kHeader << '\n';
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g\n", r.step, r.vehicle_id, r.lane,
                  r.position_m, r.speed_mps, r.accel_mps2);
    out << buf;
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw StructuralError(path.string() + ": unexpected trajectory header");
  std::vector<TrajectoryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TrajectoryRow r;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lf,%lf,%lf", &r.step, &r.vehicle_id, &r.lane,
                    &r.position_m, &r.speed_mps, &r.accel_mps2) != 6)
      throw StructuralError(path.string() + ": malformed trajectory row '" + line + "'");
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::vector<VehicleState>> snapshots_from_rows(std::span<const TrajectoryRow> rows,
                                                           const RoadConfig& config) {
  std::vector<std::vector<VehicleState>> snaps;
  int current = -1;
  for (const auto& r : rows) {
    if (r.step != current) {
      if (r.step < current) throw StructuralError("trajectory rows are not grouped by step");
      current = r.step;
      snaps.emplace_back();
    }
    VehicleState v;
    v.id = r.vehicle_id;
    v.lane = r.lane;
    v.position = r.position_m;
    v.speed = r.speed_mps;
    v.acceleration = r.accel_mps2;
    v.length = config.vehicle_length;
    v.is_ego = r.vehicle_id == 0;
    snaps.back().push_back(v);
  }
  return snaps;
}

}  // namespace lanesafe::envsim
