#include "lanesafe/envsim/road_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "lanesafe/error.hpp"

namespace lanesafe::envsim {

std::size_t RoadConfig::traffic_count() const noexcept {
  return static_cast<std::size_t>(std::floor(density * length / 1000.0 + 1e-9));
}

void RoadConfig::validate() const {
  if (!(length > 0.0)) throw ConfigError("road length must be positive");
  if (lane_count != 2) throw ConfigError("only two-lane roads are supported");
  if (!(density > 0.0)) throw ConfigError("traffic density must be positive");
  if (!(spawn_buffer >= 0.0 && spawn_buffer < length))
    throw ConfigError("spawn buffer must lie in [0, road length)");
  if (!(traffic_initial_speed > 0.0) || !(traffic_max_speed > 0.0) || !(ego_initial_speed > 0.0))
    throw ConfigError("speeds must be positive");
  if (!(vehicle_length > 0.0) || !(min_spawn_gap >= 0.0))
    throw ConfigError("vehicle length must be positive and spawn gap non-negative");
  if (!(perception_radius > 0.0)) throw ConfigError("perception radius must be positive");
  if (!(dt > 0.0) || decision_interval < 1 || max_steps < 1)
    throw ConfigError("time step, decision interval and step limit must be positive");
}

namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {
    "length",           "lane_count",        "perception_radius", "density",
    "traffic_initial_speed", "traffic_max_speed", "spawn_buffer", "vehicle_length",
    "min_spawn_gap",    "ego_initial_speed", "dt",                "decision_interval",
    "max_steps",        "reward_mode",       "idm"};

}  // namespace

RoadConfig load_road_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RoadConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (!kKeys.contains(key)) throw ConfigError(path.string() + ": unknown key '" + key + "'");
    }
    c.length = j.value("length", c.length);
    c.lane_count = j.value("lane_count", c.lane_count);
    c.perception_radius = j.value("perception_radius", c.perception_radius);
    c.density = j.value("density", c.density);
    c.traffic_initial_speed = j.value("traffic_initial_speed", c.traffic_initial_speed);
    c.traffic_max_speed = j.value("traffic_max_speed", c.traffic_max_speed);
    c.spawn_buffer = j.value("spawn_buffer", c.spawn_buffer);
    c.vehicle_length = j.value("vehicle_length", c.vehicle_length);
    c.min_spawn_gap = j.value("min_spawn_gap", c.min_spawn_gap);
    c.ego_initial_speed = j.value("ego_initial_speed", c.ego_initial_speed);
    c.dt = j.value("dt", c.dt);
    c.decision_interval = j.value("decision_interval", c.decision_interval);
    c.max_steps = j.value("max_steps", c.max_steps);
    if (j.contains("reward_mode")) {
      const auto mode = j.at("reward_mode").get<std::string>();
      if (mode == "collision_penalty")
        c.reward_mode = RewardMode::CollisionPenalty;
      else if (mode == "cost_constrained")
        c.reward_mode = RewardMode::CostConstrained;
      else
        throw ConfigError(path.string() + ": reward_mode must be collision_penalty or cost_constrained");
    }
    if (j.contains("idm")) {
      const auto& k = j.at("idm");
      c.idm.max_accel = k.value("max_accel", c.idm.max_accel);
      c.idm.comfortable_decel = k.value("comfortable_decel", c.idm.comfortable_decel);
      c.idm.exponent = k.value("exponent", c.idm.exponent);
      c.idm.min_gap = k.value("min_gap", c.idm.min_gap);
      c.idm.time_headway = k.value("time_headway", c.idm.time_headway);
      c.idm.desired_speed = k.value("desired_speed", c.idm.desired_speed);
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  c.idm.desired_speed = std::min(c.idm.desired_speed, c.traffic_max_speed);
  c.validate();
  return c;
}

void save_road_config(const std::filesystem::path& path, const RoadConfig& c) {
  json j = {{"length", c.length},
            {"lane_count", c.lane_count},
            {"perception_radius", c.perception_radius},
            {"density", c.density},
            {"traffic_initial_speed", c.traffic_initial_speed},
            {"traffic_max_speed", c.traffic_max_speed},
            {"spawn_buffer", c.spawn_buffer},
            {"vehicle_length", c.vehicle_length},
            {"min_spawn_gap", c.min_spawn_gap},
            {"ego_initial_speed", c.ego_initial_speed},
            {"dt", c.dt},
            {"decision_interval", c.decision_interval},
            {"max_steps", c.max_steps},
            {"reward_mode", c.reward_mode == RewardMode::CollisionPenalty ? "collision_penalty"
                                                                          : "cost_constrained"},
            {"idm",
             {{"max_accel", c.idm.max_accel},
              {"comfortable_decel", c.idm.comfortable_decel},
              {"exponent", c.idm.exponent},
              {"min_gap", c.idm.min_gap},
              {"time_headway", c.idm.time_headway},
              {"desired_speed", c.idm.desired_speed}}}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace lanesafe::envsim
