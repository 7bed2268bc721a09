#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lanesafe/envsim/trajectory.hpp"
#include "lanesafe/error.hpp"
#include "lanesafe/harness/cli.hpp"
#include "lanesafe/harness/config.hpp"
#include "lanesafe/harness/csv.hpp"
#include "lanesafe/harness/environment.hpp"
#include "lanesafe/harness/evaluator.hpp"
#include "lanesafe/harness/plot.hpp"
#include "lanesafe/harness/toy_cmdp.hpp"
#include "lanesafe/harness/toy_envs.hpp"
#include "lanesafe/harness/trainer.hpp"
#include "test_util.hpp"

using namespace lanesafe;
using namespace lanesafe::harness;

namespace {

TrainConfig tiny_config(Algorithm algorithm, std::uint64_t seed = 3) {
  TrainConfig c;
  c.algorithm = algorithm;
  c.total_timesteps = 600;
  c.warmup_steps = 200;
  c.batch_size = 32;
  c.hidden_units = {16, 16};
  c.seed = seed;
  c.eval_episodes = 2;
  c.pid = {0.05, 0.01, 0.01};
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

/// Agent whose deterministic action is a fixed acceleration and no lane change.
pasac::Agent constant_agent(double acceleration) {
  pasac::AgentConfig c;
  c.hidden = {8};
  pasac::Agent agent(c, 1);
  auto& actor = agent.nets().actor;
  for (auto& l : actor.layers) {
    std::fill(l.weight.begin(), l.weight.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  const auto b = c.bounds;
  const double half = 0.5 * (b.high - b.low);
  actor.layers.back().bias = {std::atanh((acceleration - b.midpoint()) / half), 0.0, 1.0, -1.0};
  return agent;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lanesafe");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST(Config, DefaultsAndAlgorithmNames) {
  TrainConfig c;
  EXPECT_EQ(c.total_timesteps, 400000u);
  EXPECT_EQ(c.warmup_steps, 10000u);
  EXPECT_EQ(c.batch_size, 256u);
  EXPECT_EQ(c.gamma, 0.99);
  EXPECT_EQ(c.alpha, 0.2);
  EXPECT_EQ(c.actor_lr, 1e-4);
  EXPECT_EQ(c.critic_lr, 3e-4);
  EXPECT_EQ(c.buffer_size, 1000000u);
  EXPECT_EQ(c.tau, 0.005);
  EXPECT_EQ(c.pid.kp, 2e-6);
  EXPECT_EQ(c.pid.ki, 2e-7);
  EXPECT_EQ(c.pid.kd, 1e-7);
  EXPECT_EQ(c.cost_limit, 0.0);
  EXPECT_EQ(c.lambda_init, 0.001);
  EXPECT_EQ(c.effective_lambda_lr(), 2e-6);
  EXPECT_NO_THROW(c.validate());
  for (auto a : {Algorithm::Pasac, Algorithm::PasacPidLag, Algorithm::PasacLag})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_THROW(parse_algorithm("ppo"), ConfigError);
}

TEST(Config, ValidationAndJsonRoundTrip) {
  auto c = tiny_config(Algorithm::PasacLag);
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny_config(Algorithm::PasacLag);
  c.gamma = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny_config(Algorithm::PasacLag);
  c.density = 17.5;
  c.lambda_lr = 0.25;
  const auto dir = lanesafe::testing::scratch_dir();
  save_train_config(dir / "c.json", c);
  const auto back = load_train_config(dir / "c.json");
  EXPECT_EQ(back.algorithm, Algorithm::PasacLag);
  EXPECT_EQ(back.density, 17.5);
  EXPECT_EQ(back.lambda_lr, 0.25);
  EXPECT_EQ(back.hidden_units, c.hidden_units);
  EXPECT_EQ(back.pid.kp, c.pid.kp);
  std::ofstream(dir / "bad.json") << R"({"learning_rate": 0.1})";
  EXPECT_THROW(load_train_config(dir / "bad.json"), ConfigError);
  std::ofstream(dir / "broken.json") << "{";
  EXPECT_THROW(load_train_config(dir / "broken.json"), ConfigError);
}

TEST(Config, RoadScenarioFollowsAlgorithm) {
  auto c = tiny_config(Algorithm::Pasac);
  c.density = 18.0;
  EXPECT_EQ(road_config_for(c).reward_mode, envsim::RewardMode::CollisionPenalty);
  EXPECT_EQ(road_config_for(c).density, 18.0);
  c.algorithm = Algorithm::PasacPidLag;
  EXPECT_EQ(road_config_for(c).reward_mode, envsim::RewardMode::CostConstrained);
}

TEST(Csv, EmptyLogHasHeaderOnly) {
  const auto dir = lanesafe::testing::scratch_dir();
  RunLog log;
  write_run_csv(dir / "run.csv", log);
  write_episodes_csv(dir / "episodes.csv", log);
  EXPECT_EQ(line_count(dir / "run.csv"), 1u);
  EXPECT_EQ(line_count(dir / "episodes.csv"), 1u);
  const auto t = read_csv(dir / "run.csv");
  EXPECT_EQ(t.header, kRunColumns);
  EXPECT_TRUE(t.rows.empty());
  EXPECT_THROW(t.column("nope"), StructuralError);
}

TEST(Csv, RunLogRoundTripIsLossless) {
  RunLog log;
  log.constrained = true;
  for (std::uint64_t i = 0; i < 7; ++i) {
    StepRecord s;
    s.step = i;
    s.episode = i / 3;
    s.reward = 1.0 / 3.0 + static_cast<double>(i) * 1e-13;
    s.cost = static_cast<double>(i % 2);
    s.lambda = 0.1234567890123456789 * static_cast<double>(i);
    s.actor_loss = -std::exp(static_cast<double>(i));
    s.updated = i > 2;
    log.steps.push_back(s);
  }
  EpisodeRecord e;
  e.episode = 0;
  e.end_step = 2;
  e.episode_return = std::acos(-1.0);
  e.length = 3;
  e.termination = "road_end";
  e.lambda = 2.0 / 7.0;
  log.episodes.push_back(e);
  const auto dir = lanesafe::testing::scratch_dir();
  write_run_csv(dir / "run.csv", log);
  write_episodes_csv(dir / "episodes.csv", log);
  EXPECT_EQ(line_count(dir / "run.csv"), 8u);
  const auto back = read_run_log(dir / "run.csv", dir / "episodes.csv", true);
  ASSERT_EQ(back.steps.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(back.steps[i].reward, log.steps[i].reward);
    EXPECT_EQ(back.steps[i].lambda, log.steps[i].lambda);
    EXPECT_EQ(back.steps[i].actor_loss, log.steps[i].actor_loss);
    EXPECT_EQ(back.steps[i].updated, log.steps[i].updated);
  }
  ASSERT_EQ(back.episodes.size(), 1u);
  EXPECT_EQ(back.episodes[0].episode_return, e.episode_return);
  EXPECT_EQ(back.episodes[0].termination, "road_end");
  EXPECT_EQ(back.episodes[0].lambda, e.lambda);
}

TEST(Csv, MetricsSchema) {
  MetricsRow r;
  r.algorithm = "pasac-pidlag";
  r.density = 18.0;
  r.seed = 4;
  r.metrics.episodes = 3;
  r.metrics.collision_rate = 1.0 / 3.0;
  const auto path = lanesafe::testing::scratch_dir() / "metrics.csv";
  std::vector<MetricsRow> rows{r, r};
  write_metrics_csv(path, rows);
  const auto t = read_csv(path);
  EXPECT_EQ(t.header, kMetricsColumns);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][t.column("algorithm")], "pasac-pidlag");
  EXPECT_EQ(t.number(1, "collision_rate"), 1.0 / 3.0);
  EXPECT_EQ(t.number(0, "density"), 18.0);
}

TEST(Plot, CurvesAreWellFormedSvg) {
  RunLog log;
  log.constrained = true;
  for (std::uint64_t i = 0; i < 250; ++i) {
    EpisodeRecord e;
    e.episode = i;
    e.episode_return = std::sin(0.1 * static_cast<double>(i));
    e.cost_total = static_cast<double>(i % 5);
    log.episodes.push_back(e);
    StepRecord s;
    s.step = i;
    s.lambda = 0.01 * static_cast<double>(i);
    log.steps.push_back(s);
  }
  const auto dir = lanesafe::testing::scratch_dir();
  for (auto kind : {PlotKind::RewardCurve, PlotKind::CostCurve, PlotKind::LambdaCurve}) {
    const auto path = dir / (std::string(to_string(kind)) + ".svg");
    emit_plot(log, kind, path);
    const auto svg = slurp(path);
    EXPECT_NE(svg.find("<svg"), std::string::npos) << to_string(kind);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_EQ(parse_plot_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(emit_plot(log, PlotKind::Trajectory, dir / "x.svg"), ValidationError);
  log.constrained = false;
  EXPECT_THROW(emit_plot(log, PlotKind::LambdaCurve, dir / "x.svg"), ValidationError);
  EXPECT_THROW(emit_plot(RunLog{}, PlotKind::RewardCurve, dir / "x.svg"), ValidationError);
  EXPECT_THROW(parse_plot_kind("histogram"), ConfigError);
}

TEST(Plot, TrajectoryMarksLaneChanges) {
  envsim::RoadConfig road;
  road.density = 0.5;
  envsim::World w(road, 1);
  std::vector<envsim::TrajectoryRow> rows;
  envsim::record_snapshot(w, rows);
  for (int i = 0; i < 40; ++i) {
    pasac::HybridAction a;
    a.acceleration = 0.5;
    a.lane_change = (i == 10 || i == 30) ? 1 : 0;
    w.step(a);
    envsim::record_snapshot(w, rows);
  }
  const auto path = lanesafe::testing::scratch_dir() / "traj.svg";
  emit_trajectory_plot(rows, road, path);
  const auto svg = slurp(path);
  std::size_t markers = 0;
  for (auto pos = svg.find("class=\"marker\""); pos != std::string::npos;
       pos = svg.find("class=\"marker\"", pos + 1))
    ++markers;
  EXPECT_EQ(markers % 2, 0u);
  EXPECT_GE(markers, 2u);
}

TEST(Trainer, DeterministicGivenSeed) {
  const auto c = tiny_config(Algorithm::PasacPidLag);
  const auto a = train(c);
  const auto b = train(c);
  ASSERT_EQ(a.log.steps.size(), 600u);
  ASSERT_EQ(a.log.steps.size(), b.log.steps.size());
  for (std::size_t i = 0; i < a.log.steps.size(); ++i) {
    EXPECT_EQ(a.log.steps[i].reward, b.log.steps[i].reward);
    EXPECT_EQ(a.log.steps[i].lambda, b.log.steps[i].lambda);
    EXPECT_EQ(a.log.steps[i].actor_loss, b.log.steps[i].actor_loss);
  }
  EXPECT_EQ(a.agent.nets().actor, b.agent.nets().actor);
  const auto other = train(tiny_config(Algorithm::PasacPidLag, 4));
  EXPECT_NE(other.agent.nets().actor, a.agent.nets().actor);
}

TEST(Trainer, UpdatesStartAfterWarmup) {
  const auto r = train(tiny_config(Algorithm::PasacLag));
  for (const auto& s : r.log.steps) EXPECT_EQ(s.updated, s.step >= 200) << s.step;
  EXPECT_TRUE(r.log.constrained);
}

TEST(Trainer, UnconstrainedKeepsLambdaAtZero) {
  const auto r = train(tiny_config(Algorithm::Pasac));
  EXPECT_FALSE(r.log.constrained);
  for (const auto& s : r.log.steps) {
    EXPECT_EQ(s.lambda, 0.0);
    EXPECT_EQ(s.cost_loss, 0.0);
  }
}

TEST(Trainer, MultiplierMovesOnlyAtEpisodeEnds) {
  auto c = tiny_config(Algorithm::PasacPidLag);
  c.total_timesteps = 3000;
  c.warmup_steps = 100;
  c.pid = {0.5, 0.1, 0.1};
  std::vector<double> seen;
  TrainHooks hooks;
  hooks.on_episode = [&](const EpisodeRecord& e) { seen.push_back(e.lambda); };
  const auto r = train(c, hooks);
  EXPECT_EQ(seen.size(), r.log.episodes.size());
  std::set<std::uint64_t> ends;
  for (const auto& e : r.log.episodes) ends.insert(e.end_step);
  std::size_t changes = 0;
  for (std::size_t i = 1; i < r.log.steps.size(); ++i) {
    if (r.log.steps[i].lambda == r.log.steps[i - 1].lambda) continue;
    ++changes;
    EXPECT_TRUE(ends.count(r.log.steps[i].step)) << i;
  }
  EXPECT_GT(changes, 0u);
  for (const auto& e : r.log.episodes) EXPECT_GE(e.lambda, 0.0);
}

TEST(Trainer, SmokeRunStaysFinite) {
  TrainConfig c;
  c.algorithm = Algorithm::PasacPidLag;
  c.total_timesteps = 10000;
  c.warmup_steps = 1000;
  c.batch_size = 64;
  c.hidden_units = {32, 32};
  const auto r = train(c);
  bool any_update = false;
  for (const auto& s : r.log.steps) {
    if (!s.updated) continue;
    any_update = true;
    EXPECT_TRUE(std::isfinite(s.q1_loss) && std::isfinite(s.q2_loss));
    EXPECT_TRUE(std::isfinite(s.cost_loss) && std::isfinite(s.actor_loss));
    EXPECT_GT(s.discrete_entropy, 0.0);
  }
  EXPECT_TRUE(any_update);
  EXPECT_TRUE(r.agent.nets().actor.all_finite());
  EXPECT_FALSE(r.log.episodes.empty());
}

TEST(Evaluator, NullPolicyOnEmptyRoad) {
  const auto agent = constant_agent(0.0);
  envsim::RoadConfig road;
  road.density = 0.5;
  const auto r = evaluate(agent, road, 3, 11);
  const auto& m = r.metrics;
  EXPECT_EQ(m.episodes, 3u);
  EXPECT_EQ(m.total_steps, 3000u);
  EXPECT_EQ(m.collision_rate, 0.0);
  EXPECT_EQ(m.lane_changes, 0u);
  EXPECT_EQ(m.mean_episode_cost, 0.0);
  EXPECT_NEAR(m.average_acceleration, 0.0, 1e-12);
  EXPECT_NEAR(m.average_jerk, 0.0, 1e-9);
  EXPECT_NEAR(m.average_speed, 8.33, 1e-9);
  EXPECT_NEAR(m.average_reward, 0.1 * (8.33 - 13.89), 1e-9);
  for (const auto& e : r.episodes) EXPECT_EQ(e.termination, "time_limit");
}

TEST(Evaluator, ConstantAccelerationHasZeroJerkAfterTheFirstStep) {
  const auto agent = constant_agent(1.0);
  envsim::RoadConfig road;
  road.density = 0.5;
  const auto r = evaluate(agent, road, 1, 2);
  const auto& e = r.episodes[0];
  // Only the first step changes acceleration (0 -> 1) and so carries jerk.
  EXPECT_NEAR(e.jerk_sum, 1.0 / road.dt, 1e-6);
  EXPECT_NEAR(e.jerk_penalty_sum, -0.005 * 1.0, 1e-9);
  EXPECT_EQ(e.termination, "road_end");
}

TEST(Evaluator, ResultsIndependentOfEpisodeOrder) {
  const auto agent = train(tiny_config(Algorithm::PasacPidLag)).agent;
  envsim::RoadConfig road;
  const auto a = evaluate(agent, road, 6, 5);
  const auto b = evaluate(agent, road, 6, 5);
  EXPECT_EQ(a.metrics.average_reward, b.metrics.average_reward);
  EXPECT_EQ(a.metrics.total_steps, b.metrics.total_steps);
  std::vector<EpisodeSummary> reversed(a.episodes.rbegin(), a.episodes.rend());
  const auto m = aggregate(reversed);
  EXPECT_EQ(m.total_steps, a.metrics.total_steps);
  EXPECT_NEAR(m.average_reward, a.metrics.average_reward, 1e-12);
}

TEST(Evaluator, TrajectoryExportReproducesEpisodeMetrics) {
  const auto agent = train(tiny_config(Algorithm::PasacPidLag)).agent;
  envsim::RoadConfig road;
  road.density = 18.0;
  const auto r = evaluate(agent, road, 4, 21, true);
  ASSERT_EQ(r.trajectories.size(), 4u);
  const auto dir = lanesafe::testing::scratch_dir();
  for (std::size_t i = 0; i < 4; ++i) {
    const auto path = dir / ("trajectory_" + std::to_string(i) + ".csv");
    envsim::write_trajectory_csv(path, r.trajectories[i]);
    const auto rows = envsim::read_trajectory_csv(path);
    const auto s = summarize_trajectory(rows, road);
    const auto& e = r.episodes[i];
    EXPECT_EQ(s.steps, e.steps);
    EXPECT_EQ(s.reward_sum, e.reward_sum);
    EXPECT_EQ(s.speed_sum, e.speed_sum);
    EXPECT_EQ(s.accel_sum, e.accel_sum);
    EXPECT_EQ(s.jerk_sum, e.jerk_sum);
    EXPECT_EQ(s.cost_sum, e.cost_sum);
    EXPECT_EQ(s.lane_changes, e.lane_changes);
    EXPECT_EQ(s.collided, e.collided);
  }
}

TEST(Evaluator, RejectsMismatchedAgent) {
  pasac::AgentConfig c;
  c.state_dim = 3;
  c.hidden = {4};
  const pasac::Agent agent(c, 1);
  EXPECT_THROW(evaluate(agent, envsim::RoadConfig{}, 1, 1), StructuralError);
  envsim::RoadConfig bad;
  bad.density = 500.0;
  EXPECT_THROW(evaluate(constant_agent(0.0), bad, 1, 1), ConfigError);
}

TEST(ToyEnvs, ChaseDynamicsAndCost) {
  ChaseParams p;
  ToyChaseEnv env(p);
  const auto obs = env.reset(1);
  ASSERT_EQ(obs.size(), 2u);
  const double gap0 = env.gap();
  EXPECT_GE(gap0, 9.0);
  EXPECT_LE(gap0, 11.0);
  pasac::HybridAction a;
  a.acceleration = 1.0;
  const auto s = env.step(a);
  EXPECT_NEAR(env.gap(), gap0 - 0.25, 1e-12);  // closing speed 0.5 after one step
  EXPECT_NEAR(s.reward, 0.1 * (10.0 - env.gap()), 1e-12);
  EXPECT_EQ(s.cost, 0.0);
  int steps = 1;
  EnvStep last = s;
  while (!last.done) {
    last = env.step(a);
    ++steps;
  }
  EXPECT_EQ(steps, p.horizon);
  EXPECT_FALSE(last.terminal);
  EXPECT_EQ(last.cost, 1.0);  // full throttle ends well inside the cost gap
}

TEST(ToyEnvs, PointReach) {
  PointReachEnv env;
  const auto obs = env.reset(3);
  EXPECT_LE(std::abs(obs[0]), 1.0);
  const double x0 = env.position();
  pasac::HybridAction a;
  a.acceleration = -1.0;
  const auto s = env.step(a);
  EXPECT_NEAR(env.position(), x0 - 0.1, 1e-15);
  EXPECT_NEAR(s.reward, -std::abs(env.position()), 1e-15);
}

TEST(ToyCmdp, TraceSummary) {
  ToyCmdpTrace t;
  t.cost_estimate = {0.0, 5.0, 8.0, 4.0, 2.5, 2.1, 2.9, 2.2, 2.0};
  t.lambda = {0.0, 0.1, 0.3, 0.4, 0.35, 0.3, 0.31, 0.3, 0.29};
  summarize_trace(t, 2.0);
  EXPECT_EQ(t.peak, 8.0);
  EXPECT_EQ(t.final, 2.0);
  EXPECT_EQ(t.min_lambda, 0.0);
  EXPECT_TRUE(t.settled);
  EXPECT_EQ(t.settled_at, 7u);  // bound is 2.8; index 6 (2.9) is the last excursion
}

TEST(Cli, HelpAndErrors) {
  EXPECT_EQ(cli({"--help"}), 0);
  EXPECT_NE(cli({"train", "--no-such-flag"}), 0);
  EXPECT_NE(cli({"train", "--algorithm", "ppo"}), 0);
  const auto dir = lanesafe::testing::scratch_dir();
  EXPECT_EQ(cli({"eval", "--checkpoint", (dir / "missing.ckpt").string(), "--out", dir.string()}),
            1);
}

TEST(Cli, TrainEvalPlotRoundTrip) {
  const auto dir = lanesafe::testing::scratch_dir();
  const auto out = (dir / "run").string();
  ASSERT_EQ(cli({"train", "--algorithm", "pasac-pidlag", "--steps", "400", "--warmup", "100",
                 "--hidden", "8", "--episodes", "2", "--seed", "5", "--out", out}),
            0);
  for (const char* f : {"config.json", "agent.ckpt", "run.csv", "episodes.csv", "metrics.csv",
                        "reward-curve.svg", "cost-curve.svg", "lambda-curve.svg",
                        "trajectory_0.csv", "trajectory_0.svg"})
    EXPECT_TRUE(std::filesystem::exists(dir / "run" / f)) << f;
  EXPECT_EQ(line_count(dir / "run" / "run.csv"), 401u);
  const auto eval_out = (dir / "eval").string();
  ASSERT_EQ(cli({"eval", "--checkpoint", out + "/agent.ckpt", "--density", "10", "--episodes",
                 "2", "--out", eval_out}),
            0);
  const auto t = read_csv(dir / "eval" / "metrics.csv");
  EXPECT_EQ(t.header, kMetricsColumns);
  EXPECT_EQ(t.number(0, "density"), 10.0);
  std::filesystem::remove(dir / "run" / "reward-curve.svg");
  EXPECT_EQ(cli({"plot", "--kind", "reward-curve", "--out", out}), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "run" / "reward-curve.svg"));
  EXPECT_EQ(cli({"plot", "--out", out, "--trajectory", out + "/trajectory_0.csv"}), 0);
}
