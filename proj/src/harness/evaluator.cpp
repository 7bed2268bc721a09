#include "lanesafe/harness/evaluator.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "lanesafe/envsim/rewards.hpp"
#include "lanesafe/envsim/world.hpp"
#include "lanesafe/error.hpp"
#include "lanesafe/rng.hpp"

namespace lanesafe::harness {

EvalMetrics aggregate(std::span<const EpisodeSummary> episodes) {
  EvalMetrics m;
  m.episodes = episodes.size();
  if (episodes.empty()) return m;
  double reward = 0.0, accel = 0.0, speed = 0.0, jerk = 0.0, jerk_pen = 0.0, cost = 0.0;
  std::size_t collisions = 0;
  for (const auto& e : episodes) {
    m.total_steps += e.steps;
    reward += e.reward_sum;
    accel += e.accel_sum;
    speed += e.speed_sum;
    jerk += e.jerk_sum;
    jerk_pen += e.jerk_penalty_sum;
    cost += e.cost_sum;
    m.lane_changes += e.lane_changes;
    if (e.collided) ++collisions;
  }
  const double n = static_cast<double>(m.episodes);
  m.collision_rate = static_cast<double>(collisions) / n;
  m.mean_episode_cost = cost / n;
  if (m.total_steps > 0) {
    const double steps = static_cast<double>(m.total_steps);
    m.average_reward = reward / steps;
    m.average_acceleration = accel / steps;
    m.average_speed = speed / steps;
    m.average_jerk = jerk / steps;
    m.average_jerk_penalty = jerk_pen / steps;
  }
  return m;
}

namespace {

/// Accumulates one step into `s`, using the same arithmetic for live runs and
/// for trajectories read back from disk.
void accumulate(EpisodeSummary& s, const envsim::RoadConfig& road, double reward, double accel,
                double previous_accel, double speed, double cost, bool lane_changed) {
  ++s.steps;
  s.reward_sum += reward;
  s.accel_sum += accel;
  s.speed_sum += speed;
  s.jerk_sum += std::abs(accel - previous_accel) / road.dt;
  s.jerk_penalty_sum += envsim::reward_jerk(accel, previous_accel, road.rewards);
  s.cost_sum += cost;
  if (lane_changed) ++s.lane_changes;
}

EpisodeSummary run_episode(const pasac::Agent& agent, const envsim::RoadConfig& road,
                           std::uint64_t seed, std::vector<envsim::TrajectoryRow>* rows) {
  envsim::World world(road, seed);
  if (rows) envsim::record_snapshot(world, *rows);
  EpisodeSummary s;
  auto obs = world.observe();
  while (!world.done()) {
    const double previous_accel = world.ego().acceleration;
    const auto action = agent.select_action(obs, pasac::ActionMode::Deterministic, 0.0, 0.5);
    const auto out = world.step(action);
    if (rows) envsim::record_snapshot(world, *rows);
    accumulate(s, road, out.total_reward, world.ego().acceleration, previous_accel,
               out.raw.v_ego, out.cost, out.lane_changed);
    if (out.reason == envsim::Termination::Collision) s.collided = true;
    s.termination = std::string(envsim::to_string(out.reason));
    obs = out.observation;
  }
  return s;
}

}  // namespace

EvalResult evaluate(const pasac::Agent& agent, const envsim::RoadConfig& road,
                    std::size_t episodes, std::uint64_t seed, bool keep_trajectories) {
  if (episodes == 0) throw ValidationError("evaluate: episode count must be at least 1");
  road.validate();
  if (agent.config().state_dim != envsim::kObservationSize || agent.config().num_discrete != 2)
    throw StructuralError("evaluate: checkpoint does not match the lane-change observation/action layout");
  // Surface infeasible densities before fanning out.
  { envsim::World probe(road, derive_seed(seed, 0)); }

  EvalResult result;
  result.episodes.resize(episodes);
  if (keep_trajectories) result.trajectories.resize(episodes);
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(episodes);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto idx = static_cast<std::size_t>(i);
      result.episodes[idx] = run_episode(agent, road, derive_seed(seed, idx),
                                         keep_trajectories ? &result.trajectories[idx] : nullptr);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  result.metrics = aggregate(result.episodes);
  return result;
}

EpisodeSummary summarize_trajectory(std::span<const envsim::TrajectoryRow> rows,
                                    const envsim::RoadConfig& road) {
  const auto snaps = envsim::snapshots_from_rows(rows, road);
  if (snaps.empty()) throw ValidationError("summarize_trajectory: empty trajectory");
  auto ego_of = [](const std::vector<envsim::VehicleState>& snap) -> const envsim::VehicleState& {
    for (const auto& v : snap)
      if (v.is_ego) return v;
    throw StructuralError("summarize_trajectory: snapshot without the ego vehicle");
  };
  EpisodeSummary s;
  const auto& rp = road.rewards;
  for (std::size_t t = 1; t < snaps.size(); ++t) {
    const auto& prev = ego_of(snaps[t - 1]);
    const auto& cur = ego_of(snaps[t]);
    envsim::RewardComponents r;
    const bool changed = cur.lane != prev.lane;
    if (changed) r.lane_change = envsim::reward_lane_change(envsim::sense(snaps[t - 1], road).d_f0, true, rp);
    const auto raw = envsim::sense(snaps[t], road);
    r.speed = envsim::reward_speed(raw.v_ego, raw.d_f0, rp);
    r.distance = envsim::reward_distance(raw.d_f0, raw.d_r0, rp);
    r.jerk = envsim::reward_jerk(cur.acceleration, prev.acceleration, rp);
    const bool collided = envsim::detect_collision(snaps[t], road);
    r.collision = collided ? rp.collision_penalty : 0.0;
    accumulate(s, road, envsim::total_reward(r, road.reward_mode), cur.acceleration,
               prev.acceleration, raw.v_ego, envsim::ttc_cost(raw, road), changed);
    if (collided) {
      s.collided = true;
      s.termination = "collision";
    } else if (cur.position >= road.length) {
      s.termination = "road_end";
    } else if (static_cast<int>(t) >= road.max_steps) {
      s.termination = "time_limit";
    } else {
      s.termination = "running";
    }
  }
  return s;
}

double mean_return(const pasac::Agent& agent, Environment& env, std::size_t episodes,
                   std::uint64_t seed) {
  if (episodes == 0) throw ValidationError("mean_return: episode count must be at least 1");
  double total = 0.0;
  for (std::size_t i = 0; i < episodes; ++i) {
    auto obs = env.reset(derive_seed(seed, i));
    while (true) {
      const auto action = agent.select_action(obs, pasac::ActionMode::Deterministic, 0.0, 0.5);
      const auto s = env.step(action);
      total += s.reward;
      if (s.done) break;
      obs = s.observation;
    }
  }
  return total / static_cast<double>(episodes);
}

}  // namespace lanesafe::harness
