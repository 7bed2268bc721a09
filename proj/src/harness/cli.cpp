#include "lanesafe/harness/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lanesafe/envsim/trajectory.hpp"
#include "lanesafe/error.hpp"
#include "lanesafe/harness/config.hpp"
#include "lanesafe/harness/csv.hpp"
#include "lanesafe/harness/evaluator.hpp"
#include "lanesafe/harness/plot.hpp"
#include "lanesafe/harness/toy_cmdp.hpp"
#include "lanesafe/harness/trainer.hpp"

namespace lanesafe::harness {

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algorithm;
  std::optional<double> density;
  std::optional<std::size_t> episodes;
  std::string out = ".";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_algorithm) {
  cmd->add_option("--config", f.config, "JSON training configuration (keys of TrainConfig)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Master seed (overrides the config)");
  if (with_algorithm)
    cmd->add_option("--algorithm", f.algorithm, "pasac, pasac-pidlag or pasac-lag")
        ->check(CLI::IsMember({"pasac", "pasac-pidlag", "pasac-lag"}));
  cmd->add_option("--density", f.density, "Traffic density in veh/km")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--episodes", f.episodes, "Evaluation episodes")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
}

TrainConfig resolve(const CommonFlags& f) {
  TrainConfig c = f.config.empty() ? TrainConfig{} : load_train_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.algorithm) c.algorithm = parse_algorithm(*f.algorithm);
  if (f.density) c.density = *f.density;
  if (f.episodes) c.eval_episodes = *f.episodes;
  c.validate();
  return c;
}

envsim::RoadConfig eval_road(const std::string& scenario, double density) {
  envsim::RoadConfig road = scenario.empty() ? envsim::RoadConfig{} : envsim::load_road_config(scenario);
  road.density = density;
  road.reward_mode = envsim::RewardMode::CollisionPenalty;
  road.validate();
  return road;
}

void print_metrics(const MetricsRow& r) {
  const auto& m = r.metrics;
  std::printf(
      "%s density=%g episodes=%zu reward/step=%.4f collision_rate=%.4f accel=%.4f speed=%.4f "
      "jerk=%.4f lane_changes=%zu episode_cost=%.4f\n",
      r.algorithm.c_str(), r.density, m.episodes, m.average_reward, m.collision_rate,
      m.average_acceleration, m.average_speed, m.average_jerk, m.lane_changes,
      m.mean_episode_cost);
}

void write_trajectories(const EvalResult& result, const envsim::RoadConfig& road,
                        std::size_t count, const fs::path& dir) {
  for (std::size_t i = 0; i < count && i < result.trajectories.size(); ++i) {
    const auto stem = "trajectory_" + std::to_string(i);
    envsim::write_trajectory_csv(dir / (stem + ".csv"), result.trajectories[i]);
    emit_trajectory_plot(result.trajectories[i], road, dir / (stem + ".svg"));
  }
}

int cmd_train(const CommonFlags& f, std::optional<std::uint64_t> steps,
              std::optional<std::uint64_t> warmup, const std::vector<std::size_t>& hidden) {
  TrainConfig c = resolve(f);
  if (steps) c.total_timesteps = *steps;
  if (warmup) c.warmup_steps = *warmup;
  if (!hidden.empty()) c.hidden_units = hidden;
  c.validate();
  const fs::path out(f.out);
  fs::create_directories(out);
  save_train_config(out / "config.json", c);

  TrainHooks hooks;
  hooks.on_episode = [](const EpisodeRecord& e) {
    if ((e.episode + 1) % 50 == 0)
      std::fprintf(stderr, "episode %llu step %llu return %.2f cost %.0f lambda %.6g\n",
                   static_cast<unsigned long long>(e.episode + 1),
                   static_cast<unsigned long long>(e.end_step + 1), e.episode_return,
                   e.cost_total, e.lambda);
  };
  const auto result = train(c, hooks);
  const auto& d = result.dual;
  result.agent.save(out / "agent.ckpt", {d.lambda, d.integral, d.previous_cost, c.total_timesteps});
  write_run_csv(out / "run.csv", result.log);
  write_episodes_csv(out / "episodes.csv", result.log);
  if (!result.log.episodes.empty()) {
    emit_plot(result.log, PlotKind::RewardCurve, out / "reward-curve.svg");
    emit_plot(result.log, PlotKind::CostCurve, out / "cost-curve.svg");
  }
  if (result.log.constrained) emit_plot(result.log, PlotKind::LambdaCurve, out / "lambda-curve.svg");

  const auto road = eval_road("", c.density);
  const auto eval = evaluate(result.agent, road, c.eval_episodes, derive_seed(c.seed, 100), true);
  const MetricsRow row{std::string(to_string(c.algorithm)), c.density, c.seed, eval.metrics};
  write_metrics_csv(out / "metrics.csv", std::span<const MetricsRow>(&row, 1));
  write_trajectories(eval, road, 1, out);
  print_metrics(row);
  return 0;
}

int cmd_eval(const CommonFlags& f, const std::string& checkpoint, const std::string& scenario,
             std::size_t trajectories) {
  TrainConfig c = resolve(f);
  const fs::path out(f.out);
  const fs::path ckpt = checkpoint.empty() ? out / "agent.ckpt" : fs::path(checkpoint);
  if (!fs::exists(ckpt)) throw IoError("checkpoint not found: " + ckpt.string());
  const auto agent = pasac::Agent::load(ckpt);
  const auto road = eval_road(scenario, c.density);
  const auto eval = evaluate(agent, road, c.eval_episodes, derive_seed(c.seed, 100), trajectories > 0);
  fs::create_directories(out);
  const MetricsRow row{std::string(to_string(c.algorithm)), c.density, c.seed, eval.metrics};
  write_metrics_csv(out / "metrics.csv", std::span<const MetricsRow>(&row, 1));
  write_trajectories(eval, road, trajectories, out);
  print_metrics(row);
  return 0;
}

int cmd_plot(const CommonFlags& f, const std::string& kind, const std::string& trajectory) {
  const fs::path out(f.out);
  if (!trajectory.empty()) {
    const auto rows = envsim::read_trajectory_csv(trajectory);
    const auto road = eval_road("", f.density.value_or(envsim::RoadConfig{}.density));
    const fs::path target = out / (fs::path(trajectory).stem().string() + ".svg");
    emit_trajectory_plot(rows, road, target);
    std::printf("wrote %s\n", target.string().c_str());
    return 0;
  }
  const fs::path cfg = f.config.empty() ? out / "config.json" : fs::path(f.config);
  const TrainConfig c = load_train_config(cfg);
  const auto log = read_run_log(out / "run.csv", out / "episodes.csv", c.algorithm != Algorithm::Pasac);
  std::vector<PlotKind> kinds;
  if (kind.empty() || kind == "all") {
    kinds = {PlotKind::RewardCurve, PlotKind::CostCurve};
    if (log.constrained) kinds.push_back(PlotKind::LambdaCurve);
  } else {
    kinds = {parse_plot_kind(kind)};
  }
  for (auto k : kinds) {
    const fs::path target = out / (std::string(to_string(k)) + ".svg");
    emit_plot(log, k, target);
    std::printf("wrote %s\n", target.string().c_str());
  }
  return 0;
}

int cmd_toy(const CommonFlags& f) {
  ToyCmdpOptions o;
  if (f.seed) o.seed = *f.seed;
  if (f.episodes) o.episodes = *f.episodes;
  const auto r = run_toy_cmdp(o);
  const fs::path out(f.out);
  fs::create_directories(out);
  {
    std::FILE* file = std::fopen((out / "toy_cmdp.csv").string().c_str(), "w");
    if (!file) throw IoError("cannot open " + (out / "toy_cmdp.csv").string() + " for writing");
    std::fprintf(file, "episode,pid_jc_estimate,pid_lambda,integral_jc_estimate,integral_lambda\n");
    for (std::size_t i = 0; i < r.pid.cost_estimate.size() && i < r.integral.cost_estimate.size(); ++i)
      std::fprintf(file, "%zu,%.17g,%.17g,%.17g,%.17g\n", i, r.pid.cost_estimate[i], r.pid.lambda[i],
                   r.integral.cost_estimate[i], r.integral.lambda[i]);
    std::fclose(file);
  }
  std::printf("cost limit %g, settle bound %g\n", o.cost_limit, r.settle_bound);
  std::printf("pid:      peak %.4f final %.4f min lambda %.6g settled %s at episode %zu\n",
              r.pid.peak, r.pid.final, r.pid.min_lambda, r.pid.settled ? "yes" : "no",
              r.pid.settled_at);
  std::printf("integral: peak %.4f final %.4f min lambda %.6g\n", r.integral.peak,
              r.integral.final, r.integral.min_lambda);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Safe lane-change agent: training, evaluation and plotting"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, plot_flags, toy_flags;
  std::optional<std::uint64_t> steps, warmup;
  std::vector<std::size_t> hidden;
  auto* train_cmd = app.add_subcommand("train", "Train an agent; writes agent.ckpt, logs, plots and metrics");
  add_common(train_cmd, train_flags, true);
  train_cmd->add_option("--steps", steps, "Total environment steps (overrides the config)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--warmup", warmup, "Warm-up steps before the first update");
  train_cmd->add_option("--hidden", hidden, "Hidden layer widths, e.g. --hidden 64 64");

  std::string checkpoint, scenario;
  std::size_t trajectories = 0;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint with the deterministic policy");
  add_common(eval_cmd, eval_flags, true);
  eval_cmd->add_option("--checkpoint", checkpoint, "Agent checkpoint (default <out>/agent.ckpt)");
  eval_cmd->add_option("--scenario", scenario, "JSON road scenario file")->check(CLI::ExistingFile);
  eval_cmd->add_option("--trajectories", trajectories,
                       "Export this many episode trajectories as CSV and SVG");

  std::string kind, trajectory;
  auto* plot_cmd = app.add_subcommand("plot", "Redraw plots from the CSV logs in --out");
  add_common(plot_cmd, plot_flags, false);
  plot_cmd->add_option("--kind", kind, "reward-curve, cost-curve, lambda-curve or all");
  plot_cmd->add_option("--trajectory", trajectory, "Trajectory CSV to draw")->check(CLI::ExistingFile);

  auto* toy_cmd = app.add_subcommand("toy-cmdp", "Run the constrained chase task with both multiplier controllers");
  add_common(toy_cmd, toy_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_flags, steps, warmup, hidden);
    if (eval_cmd->parsed()) return cmd_eval(eval_flags, checkpoint, scenario, trajectories);
    if (plot_cmd->parsed()) return cmd_plot(plot_flags, kind, trajectory);
    if (toy_cmd->parsed()) return cmd_toy(toy_flags);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace lanesafe::harness
