#include "lanesafe/envsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lanesafe/error.hpp"
#include "lanesafe/rng.hpp"

namespace lanesafe::envsim {

double ring_offset(double from, double to, double length) noexcept {
  double d = std::fmod(to - from, length);
  if (d >= 0.5 * length) d -= length;
  if (d < -0.5 * length) d += length;
  return d;
}

Observation normalize(const RawObservation& raw, const RoadConfig& config) {
  const double r = config.perception_radius;
  const double vmax = config.traffic_max_speed;
  auto dist = [&](double d) { return std::clamp(d, 0.0, r) / r; };
  return {raw.v_f1 / vmax, dist(raw.d_f1), raw.v_r1 / vmax, dist(raw.d_r1),
          raw.v_f0 / vmax, dist(raw.d_f0), raw.v_r0 / vmax, dist(raw.d_r0),
          raw.v_ego / vmax, raw.a_ego / 9.8};
}

namespace {

const VehicleState* find_ego(std::span<const VehicleState> vehicles) {
  for (const auto& v : vehicles)
    if (v.is_ego) return &v;
  return nullptr;
}

struct LaneNeighbors {
  double front_gap, front_speed, rear_gap, rear_speed;
};

LaneNeighbors lane_neighbors(std::span<const VehicleState> vehicles, const VehicleState& ego,
                             int lane, const RoadConfig& config) {
  LaneNeighbors n{config.perception_radius, ego.speed, config.perception_radius, ego.speed};
  double best_front = std::numeric_limits<double>::infinity();
  double best_rear = std::numeric_limits<double>::infinity();
  for (const auto& v : vehicles) {
    if (v.is_ego || v.lane != lane) continue;
    const double s = ring_offset(ego.position, v.position, config.length);
    if (s >= 0.0) {
      const double gap = s - ego.length;
      if (gap <= config.perception_radius && s < best_front) {
        best_front = s;
        n.front_gap = gap;
        n.front_speed = v.speed;
      }
    } else {
      const double gap = -s - v.length;
      if (gap <= config.perception_radius && -s < best_rear) {
        best_rear = -s;
        n.rear_gap = gap;
        n.rear_speed = v.speed;
      }
    }
  }
  return n;
}

}  // namespace

RawObservation sense(std::span<const VehicleState> vehicles, const RoadConfig& config) {
  const VehicleState* ego = find_ego(vehicles);
  if (!ego) throw ContractError("sense: world has no ego vehicle");
  const auto own = lane_neighbors(vehicles, *ego, ego->lane, config);
  const auto other = lane_neighbors(vehicles, *ego, 1 - ego->lane, config);
  RawObservation r;
  r.v_f1 = other.front_speed;
  r.d_f1 = other.front_gap;
  r.v_r1 = other.rear_speed;
  r.d_r1 = other.rear_gap;
  r.v_f0 = own.front_speed;
  r.d_f0 = own.front_gap;
  r.v_r0 = own.rear_speed;
  r.d_r0 = own.rear_gap;
  r.v_ego = ego->speed;
  r.a_ego = ego->acceleration;
  return r;
}

bool detect_collision(std::span<const VehicleState> vehicles, const RoadConfig& config) {
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    for (std::size_t j = i + 1; j < vehicles.size(); ++j) {
      const auto& a = vehicles[i];
      const auto& b = vehicles[j];
      if (a.lane != b.lane) continue;
      const double s = ring_offset(a.position, b.position, config.length);
      if (s > -b.length && s < a.length) return true;
    }
  }
  return false;
}

int ttc_cost(const RawObservation& raw, const RoadConfig& config) {
  return envsim::ttc_cost(raw.v_ego, raw.v_f0, raw.d_f0, raw.v_r0, raw.d_r0, config.rewards);
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Running: return "running";
    case Termination::Collision: return "collision";
    case Termination::RoadEnd: return "road_end";
    case Termination::TimeLimit: return "time_limit";
  }
  return "unknown";
}

double total_reward(const RewardComponents& r, RewardMode mode) noexcept {
  double total = r.lane_change + r.speed + r.distance + r.jerk;
  if (mode == RewardMode::CollisionPenalty) total += r.collision;
  return total;
}

std::vector<double> traffic_accelerations(std::span<const VehicleState> vehicles,
                                          const RoadConfig& config) {
  std::vector<double> acc(vehicles.size(), 0.0);
  const double L = config.length;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const auto& me = vehicles[i];
    if (me.is_ego) continue;
    double best = std::numeric_limits<double>::infinity();
    double lead_speed = me.speed;
    for (std::size_t j = 0; j < vehicles.size(); ++j) {
      if (j == i || vehicles[j].lane != me.lane) continue;
      double fwd = std::fmod(vehicles[j].position - me.position, L);
      if (fwd < 0.0) fwd += L;
      if (fwd < best) {
        best = fwd;
        lead_speed = vehicles[j].speed;
      }
    }
    double gap = kNoLeaderGap;
    if (std::isfinite(best)) gap = std::max(best - me.length, 1e-6);
    acc[i] = idm_accel(me.speed, lead_speed, gap, config.idm);
  }
  return acc;
}

World::World(RoadConfig config, std::uint64_t seed, bool with_ego)
    : config_(std::move(config)), with_ego_(with_ego) {
  config_.validate();
  reset(seed);
}

Observation World::reset(std::uint64_t seed) {
  const std::size_t n = config_.traffic_count();
  const double L = config_.length;
  const double len = config_.vehicle_length;
  const double spacing = len + config_.min_spawn_gap;
  const auto per_lane = static_cast<std::size_t>(std::floor((L - config_.spawn_buffer) / spacing));
  if (n > 2 * per_lane)
    throw ConfigError("density " + std::to_string(config_.density) +
                      " veh/km cannot be placed with a " + std::to_string(config_.min_spawn_gap) +
                      " m minimum gap");

  vehicles_.clear();
  if (with_ego_) {
    VehicleState ego;
    ego.id = 0;
    ego.position = 0.0;
    ego.lane = 0;
    ego.speed = config_.ego_initial_speed;
    ego.length = len;
    ego.is_ego = true;
    vehicles_.push_back(ego);
  }

  Rng rng(seed);
  const std::size_t max_attempts = 100000;
  std::size_t attempts = 0;
  int next_id = 1;
  while (static_cast<std::size_t>(next_id) <= n) {
    if (++attempts > max_attempts)
      throw ConfigError("could not place " + std::to_string(n) + " vehicles at density " +
                        std::to_string(config_.density) + " veh/km");
    VehicleState v;
    v.id = next_id;
    v.lane = static_cast<int>(rng.index(2));
    v.position = rng.uniform(config_.spawn_buffer, L);
    v.speed = config_.traffic_initial_speed;
    v.length = len;
    const bool clear = std::none_of(vehicles_.begin(), vehicles_.end(), [&](const VehicleState& o) {
      return o.lane == v.lane && std::abs(ring_offset(o.position, v.position, L)) < spacing;
    });
    if (!clear) continue;
    vehicles_.push_back(v);
    ++next_id;
  }
  step_ = 0;
  done_ = false;
  return with_ego_ ? observe() : Observation{};
}

const VehicleState& World::ego() const {
  const VehicleState* e = find_ego(vehicles_);
  if (!e) throw ContractError("world has no ego vehicle");
  return *e;
}

RawObservation World::observe_raw() const { return sense(vehicles_, config_); }

Observation World::observe() const { return normalize(observe_raw(), config_); }

void World::advance(double ego_accel) {
  const auto acc = traffic_accelerations(vehicles_, config_);
  const double dt = config_.dt;
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    auto& v = vehicles_[i];
    if (v.is_ego) {
      v.acceleration = ego_accel;
      v.speed = std::max(v.speed + ego_accel * dt, 0.0);
      v.position += v.speed * dt;
    } else {
      v.acceleration = acc[i];
      v.speed = std::clamp(v.speed + acc[i] * dt, 0.0, config_.traffic_max_speed);
      v.position = std::fmod(v.position + v.speed * dt, config_.length);
    }
  }
}

StepOutcome World::step(const pasac::HybridAction& action) {
  if (!with_ego_) throw ContractError("step: world has no ego vehicle");
  if (done_) throw ContractError("step: episode already finished");
  if (!std::isfinite(action.acceleration) || action.acceleration < pasac::kAccelerationBounds.low ||
      action.acceleration > pasac::kAccelerationBounds.high)
    throw ValidationError("step: acceleration outside [-9.8, 5.0]");

  StepOutcome out;
  auto ego_it = std::find_if(vehicles_.begin(), vehicles_.end(),
                             [](const VehicleState& v) { return v.is_ego; });
  const double previous_accel = ego_it->acceleration;

  out.decision_step = is_decision_step();
  if (out.decision_step && action.lane_change == 1) {
    const double front_gap = observe_raw().d_f0;
    out.rewards.lane_change = reward_lane_change(front_gap, true, config_.rewards);
    ego_it->lane = 1 - ego_it->lane;
    out.lane_changed = true;
  }

  advance(action.acceleration);
  ++step_;

  ego_it = std::find_if(vehicles_.begin(), vehicles_.end(),
                        [](const VehicleState& v) { return v.is_ego; });
  const bool at_end = ego_it->position >= config_.length;
  if (at_end) ego_it->position = config_.length;
  const bool collided = detect_collision(vehicles_, config_);

  out.raw = observe_raw();
  out.observation = normalize(out.raw, config_);
  const auto& rp = config_.rewards;
  out.rewards.speed = reward_speed(out.raw.v_ego, out.raw.d_f0, rp);
  out.rewards.distance = reward_distance(out.raw.d_f0, out.raw.d_r0, rp);
  out.rewards.jerk = reward_jerk(action.acceleration, previous_accel, rp);
  out.rewards.collision = collided ? rp.collision_penalty : 0.0;
  out.total_reward = total_reward(out.rewards, config_.reward_mode);
  out.cost = ttc_cost(out.raw, config_);

  if (collided)
    out.reason = Termination::Collision;
  else if (at_end)
    out.reason = Termination::RoadEnd;
  else if (step_ >= config_.max_steps)
    out.reason = Termination::TimeLimit;
  out.done = out.reason != Termination::Running;
  done_ = out.done;
  return out;
}

bool World::step_traffic() {
  advance(0.0);
  ++step_;
  return detect_collision(vehicles_, config_);
}

}  // namespace lanesafe::envsim
