#include <cmath>
#include <fstream>
#include <vector>

#include <gtest/gtest.h>

#include "lanesafe/envsim/idm.hpp"
#include "lanesafe/envsim/rewards.hpp"
#include "lanesafe/envsim/road_config.hpp"
#include "lanesafe/envsim/trajectory.hpp"
#include "lanesafe/envsim/world.hpp"
#include "lanesafe/error.hpp"
#include "lanesafe/rng.hpp"
#include "test_util.hpp"

using namespace lanesafe;
using namespace lanesafe::envsim;

namespace {

VehicleState car(int id, double pos, int lane, double speed, bool ego = false) {
  VehicleState v;
  v.id = id;
  v.position = pos;
  v.lane = lane;
  v.speed = speed;
  v.is_ego = ego;
  return v;
}

pasac::HybridAction act(double a, int lc = 0) {
  pasac::HybridAction h;
  h.acceleration = a;
  h.lane_change = lc;
  return h;
}

/// A road with no traffic (density rounds down to zero vehicles).
RoadConfig empty_road() {
  RoadConfig c;
  c.density = 0.5;
  return c;
}

}  // namespace

TEST(Idm, FreeRoadLimit) {
  EXPECT_NEAR(idm_accel(0.0, 0.0, 10000.0), 2.6, 1e-6);
  EXPECT_EQ(idm_accel(0.0, 0.0, kNoLeaderGap), 2.6);
}

TEST(Idm, EquilibriumAtDesiredSpeed) {
  EXPECT_NEAR(idm_accel(16.67, 16.67, 1e7), 0.0, 1e-6);
}

TEST(Idm, HandEvaluation) {
  const double expected = 2.6 * (1.0 - std::pow(10.0 / 16.67, 4) - std::pow(12.0 / 30.0, 2));
  EXPECT_NEAR(idm_accel(10.0, 10.0, 30.0), expected, 1e-9);
  EXPECT_NEAR(idm_accel(10.0, 10.0, 30.0), 1.847, 5e-4);
}

TEST(Idm, OutputIsClampedToActuatorLimits) {
  EXPECT_EQ(idm_accel(16.0, 0.0, 0.5), -9.8);
}

TEST(Rewards, LaneChange) {
  EXPECT_EQ(reward_lane_change(20.0, true), -4.0);
  EXPECT_EQ(reward_lane_change(30.0, true), -20.0);
  EXPECT_EQ(reward_lane_change(25.0, true), -20.0);
  EXPECT_EQ(reward_lane_change(30.0, false), 0.0);
}

TEST(Rewards, Speed) {
  EXPECT_NEAR(reward_speed(13.89, 30.0), 0.0, 1e-12);
  EXPECT_NEAR(reward_speed(16.67, 30.0), 0.1 * (16.67 - 13.89), 1e-12);
  EXPECT_NEAR(reward_speed(16.67, 30.0), 0.278, 1e-9);
  EXPECT_NEAR(reward_speed(10.0, 30.0), -0.389, 1e-9);
  EXPECT_EQ(reward_speed(16.0, 24.9), 0.0);
}

TEST(Rewards, Distance) {
  EXPECT_NEAR(reward_distance(20.0, 40.0), -5.0, 1e-12);
  EXPECT_EQ(reward_distance(200.0, 200.0), 0.0);
  EXPECT_EQ(reward_distance(25.0, 200.0), 0.0);
  EXPECT_NEAR(reward_distance(200.0, 10.0), -15.0, 1e-12);
}

TEST(Rewards, Jerk) {
  EXPECT_EQ(reward_jerk(1.3, 1.3), 0.0);
  EXPECT_NEAR(reward_jerk(1.0, 0.5), -0.0025, 1e-12);
  EXPECT_NEAR(reward_jerk(5.0, -9.8), -0.074, 1e-12);
}

TEST(Ttc, FrontAndRear) {
  EXPECT_EQ(ttc_cost(15.0, 10.0, 20.0, 15.0, 200.0), 0);  // TTC 4 s
  EXPECT_EQ(ttc_cost(15.0, 10.0, 10.0, 15.0, 200.0), 1);  // TTC 2 s
  EXPECT_EQ(ttc_cost(10.0, 12.0, 5.0, 9.0, 3.0), 0);      // nothing closing
  EXPECT_EQ(ttc_cost(10.0, 10.0, 200.0, 14.0, 8.0), 1);   // follower closing, TTC 2 s
  double t = 0.0;
  EXPECT_TRUE(time_to_collision(20.0, 5.0, t));
  EXPECT_DOUBLE_EQ(t, 4.0);
  EXPECT_FALSE(time_to_collision(20.0, 0.0, t));
}

TEST(Collision, IntervalOverlap) {
  RoadConfig c;
  std::vector<VehicleState> v{car(1, 100.0, 0, 10.0), car(2, 103.0, 0, 10.0)};
  EXPECT_TRUE(detect_collision(v, c));
  v[1].lane = 1;
  v[1].position = 100.0;
  EXPECT_FALSE(detect_collision(v, c));
  v[1].lane = 0;
  v[1].position = 105.1;
  EXPECT_FALSE(detect_collision(v, c));
}

TEST(Collision, WrapsAroundTheRoad) {
  RoadConfig c;
  std::vector<VehicleState> v{car(1, 998.0, 1, 10.0), car(2, 1.0, 1, 10.0)};
  EXPECT_TRUE(detect_collision(v, c));
}

TEST(Sense, EmptyRoadUsesSentinels) {
  RoadConfig c;
  std::vector<VehicleState> v{car(0, 10.0, 0, 12.0, true)};
  const auto r = sense(v, c);
  for (double d : {r.d_f0, r.d_r0, r.d_f1, r.d_r1}) EXPECT_EQ(d, 200.0);
  for (double s : {r.v_f0, r.v_r0, r.v_f1, r.v_r1}) EXPECT_EQ(s, 12.0);
  const auto obs = normalize(r, c);
  EXPECT_EQ(obs[1], 1.0);
  EXPECT_NEAR(obs[8], 12.0 / 16.67, 1e-15);
}

TEST(Sense, BumperToBumperGap) {
  RoadConfig c;
  std::vector<VehicleState> v{car(0, 100.0, 0, 12.0, true), car(1, 130.0, 0, 9.0),
                              car(2, 350.0, 1, 9.0)};
  const auto r = sense(v, c);
  EXPECT_DOUBLE_EQ(r.d_f0, 25.0);
  EXPECT_EQ(r.v_f0, 9.0);
  EXPECT_EQ(r.d_f1, 200.0);  // 250 m ahead: beyond perception
}

TEST(Sense, RequiresEgo) {
  RoadConfig c;
  std::vector<VehicleState> v{car(1, 100.0, 0, 12.0)};
  EXPECT_THROW(sense(v, c), ContractError);
}

TEST(World, ResetPlacesDensityVehicles) {
  RoadConfig c;
  c.density = 15.0;
  World w(c, 1);
  EXPECT_EQ(w.vehicles().size(), 16u);
  c.density = 10.0;
  World w10(c, 1);
  EXPECT_EQ(w10.vehicles().size(), 11u);
  const auto& ego = w.ego();
  EXPECT_EQ(ego.position, 0.0);
  EXPECT_EQ(ego.lane, 0);
  EXPECT_EQ(ego.speed, 8.33);
  for (const auto& v : w.vehicles()) {
    if (v.is_ego) continue;
    EXPECT_GE(v.position, 50.0);
    EXPECT_LT(v.position, 1000.0);
    EXPECT_EQ(v.speed, 8.33);
  }
}

TEST(World, ResetRespectsMinimumGap) {
  RoadConfig c;
  c.density = 40.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    World w(c, seed);
    const auto& vs = w.vehicles();
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j)
        if (vs[i].lane == vs[j].lane)
          EXPECT_GE(std::abs(ring_offset(vs[i].position, vs[j].position, c.length)), 20.0 - 1e-9);
  }
}

TEST(World, SameSeedSameWorld) {
  RoadConfig c;
  World a(c, 99), b(c, 99), d(c, 100);
  ASSERT_EQ(a.vehicles().size(), b.vehicles().size());
  for (std::size_t i = 0; i < a.vehicles().size(); ++i) {
    EXPECT_EQ(a.vehicles()[i].position, b.vehicles()[i].position);
    EXPECT_EQ(a.vehicles()[i].lane, b.vehicles()[i].lane);
  }
  bool differs = false;
  for (std::size_t i = 0; i < a.vehicles().size(); ++i)
    differs = differs || a.vehicles()[i].position != d.vehicles()[i].position;
  EXPECT_TRUE(differs);
}

TEST(World, InfeasibleDensityIsAConfigError) {
  RoadConfig c;
  c.density = 200.0;
  EXPECT_THROW(World(c, 1), ConfigError);
}

TEST(World, KinematicsAtConstantSpeed) {
  auto c = empty_road();
  c.ego_initial_speed = 10.0;
  World w(c, 1);
  w.step(act(0.0));
  EXPECT_NEAR(w.ego().position, 1.0, 1e-12);
  EXPECT_EQ(w.ego().speed, 10.0);
}

TEST(World, LaneChangeOnlyAtDecisionSteps) {
  World w(empty_road(), 1);
  auto out = w.step(act(0.0, 1));  // step 0 is a decision step
  EXPECT_TRUE(out.lane_changed);
  EXPECT_EQ(w.ego().lane, 1);
  EXPECT_EQ(out.rewards.lane_change, -20.0);
  out = w.step(act(0.0, 1));  // step 1 is not
  EXPECT_FALSE(out.lane_changed);
  EXPECT_EQ(w.ego().lane, 1);
  EXPECT_EQ(out.rewards.lane_change, 0.0);
}

TEST(World, RamingALeaderEndsInCollision) {
  RoadConfig c;
  bool saw_collision = false;
  for (std::uint64_t seed = 1; seed <= 10 && !saw_collision; ++seed) {
    World w(c, seed);
    StepOutcome out;
    while (!w.done()) out = w.step(act(5.0));
    if (out.reason == Termination::Collision) {
      saw_collision = true;
      EXPECT_TRUE(out.done);
      EXPECT_EQ(out.rewards.collision, -200.0);
      EXPECT_TRUE(out.terminal());
      EXPECT_THROW(w.step(act(0.0)), ContractError);
    }
  }
  EXPECT_TRUE(saw_collision);
}

TEST(World, ConstrainedModeExcludesCollisionPenalty) {
  RoadConfig c;
  c.reward_mode = RewardMode::CostConstrained;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    World w(c, seed);
    StepOutcome out;
    while (!w.done()) out = w.step(act(5.0));
    if (out.reason != Termination::Collision) continue;
    const auto& r = out.rewards;
    EXPECT_EQ(out.total_reward, r.lane_change + r.speed + r.distance + r.jerk);
    return;
  }
  FAIL() << "no collision in ten seeds";
}

TEST(World, RoadEndTerminates) {
  auto c = empty_road();
  World w(c, 1);
  StepOutcome out;
  while (!w.done()) out = w.step(act(1.0));
  EXPECT_EQ(out.reason, Termination::RoadEnd);
  EXPECT_EQ(w.ego().position, 1000.0);
}

TEST(World, TimeLimitTruncates) {
  auto c = empty_road();
  c.max_steps = 30;
  World w(c, 1);
  StepOutcome out;
  while (!w.done()) out = w.step(act(0.0));
  EXPECT_EQ(out.reason, Termination::TimeLimit);
  EXPECT_FALSE(out.terminal());
  EXPECT_EQ(w.step_index(), 30);
}

TEST(World, OutOfBoundsAccelerationIsRejected) {
  World w(empty_road(), 1);
  EXPECT_THROW(w.step(act(5.1)), ValidationError);
  EXPECT_THROW(w.step(act(std::nan(""))), ValidationError);
}

TEST(World, FullBrakingNeverReversesAndInvariantsHold) {
  RoadConfig c;
  c.density = 18.0;
  World w(c, 5);
  Rng rng(2);
  int step = 0;
  while (!w.done()) {
    const double a = step < 40 ? -9.8 : rng.uniform(-9.8, 5.0);
    const int lc = rng.uniform() < 0.2 ? 1 : 0;
    const double prev_accel = w.ego().acceleration;
    const auto out = w.step(act(a, lc));
    ++step;
    for (const auto& v : w.vehicles()) {
      EXPECT_GE(v.speed, 0.0);
      if (!v.is_ego) EXPECT_LE(v.speed, 16.67);
      EXPECT_GE(v.position, 0.0);
      EXPECT_LE(v.position, c.length);
    }
    for (double d : {out.raw.d_f0, out.raw.d_r0, out.raw.d_f1, out.raw.d_r1}) EXPECT_LE(d, 200.0);
    for (double o : out.observation) EXPECT_TRUE(std::isfinite(o));
    const auto& r = out.rewards;
    EXPECT_EQ(out.total_reward, r.lane_change + r.speed + r.distance + r.jerk + r.collision);
    EXPECT_EQ(out.cost, ttc_cost(sense(w.vehicles(), c), c));
    EXPECT_EQ(r.jerk, reward_jerk(a, prev_accel));
  }
}

TEST(World, IdenticalSeedsAndActionsReproduceOutcomes) {
  RoadConfig c;
  auto run = [&] {
    World w(c, 77);
    Rng rng(8);
    std::vector<TrajectoryRow> rows;
    std::vector<double> rewards;
    while (!w.done()) {
      const auto out = w.step(act(rng.uniform(-3.0, 3.0), rng.uniform() < 0.3 ? 1 : 0));
      rewards.push_back(out.total_reward);
      record_snapshot(w, rows);
    }
    return std::make_pair(rows, rewards);
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.first.size(), b.first.size());
  for (std::size_t i = 0; i < a.first.size(); ++i) {
    EXPECT_EQ(a.first[i].position_m, b.first[i].position_m);
    EXPECT_EQ(a.first[i].speed_mps, b.first[i].speed_mps);
    EXPECT_EQ(a.first[i].lane, b.first[i].lane);
  }
  EXPECT_EQ(a.second, b.second);
}

TEST(World, TrafficOnlyIsCollisionFree) {
  RoadConfig c;
  c.density = 18.0;
  World w(c, 3, false);
  int collisions = 0;
  for (int i = 0; i < 10000; ++i) collisions += w.step_traffic() ? 1 : 0;
  EXPECT_EQ(collisions, 0);
}

TEST(RoadConfigFile, RoundTripAndUnknownKeys) {
  const auto dir = lanesafe::testing::scratch_dir();
  RoadConfig c;
  c.density = 18.0;
  c.reward_mode = RewardMode::CostConstrained;
  c.idm.time_headway = 1.4;
  save_road_config(dir / "road.json", c);
  const auto back = load_road_config(dir / "road.json");
  EXPECT_EQ(back.density, 18.0);
  EXPECT_EQ(back.reward_mode, RewardMode::CostConstrained);
  EXPECT_EQ(back.idm.time_headway, 1.4);
  std::ofstream(dir / "bad.json") << R"({"density": 10, "lanes": 3})";
  EXPECT_THROW(load_road_config(dir / "bad.json"), ConfigError);
  std::ofstream(dir / "neg.json") << R"({"density": -1})";
  EXPECT_THROW(load_road_config(dir / "neg.json"), ConfigError);
  EXPECT_THROW(load_road_config(dir / "missing.json"), IoError);
}

TEST(TrajectoryCsv, RoundTripIsExact) {
  RoadConfig c;
  World w(c, 4);
  std::vector<TrajectoryRow> rows;
  record_snapshot(w, rows);
  for (int i = 0; i < 25; ++i) {
    w.step(act(0.37 * (i % 5) - 0.5, i % 10 == 0 ? 1 : 0));
    record_snapshot(w, rows);
  }
  const auto path = lanesafe::testing::scratch_dir() / "traj.csv";
  write_trajectory_csv(path, rows);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "step,vehicle_id,lane,position_m,speed_mps,accel_mps2");
  const auto back = read_trajectory_csv(path);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].step, rows[i].step);
    EXPECT_EQ(back[i].position_m, rows[i].position_m);
    EXPECT_EQ(back[i].speed_mps, rows[i].speed_mps);
    EXPECT_EQ(back[i].accel_mps2, rows[i].accel_mps2);
  }
  const auto snaps = snapshots_from_rows(back, c);
  EXPECT_EQ(snaps.size(), 26u);
}
