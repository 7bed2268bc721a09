#include "lanesafe/harness/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lanesafe/error.hpp"
#include "lanesafe/pasac/replay_buffer.hpp"
#include "lanesafe/safelag/cost_estimator.hpp"

namespace lanesafe::harness {

namespace {

constexpr int kMaxRefusedStreak = 100;

}  // namespace

pasac::AgentConfig agent_config_for(const TrainConfig& config, const Environment& env) {
  pasac::AgentConfig a;
  a.state_dim = env.state_dim();
  a.num_discrete = env.num_discrete();
  a.bounds = env.action_bounds();
  a.hidden = config.hidden_units;
  a.gamma = config.gamma;
  a.alpha = config.alpha;
  a.tau = config.tau;
  a.actor_lr = config.actor_lr;
  a.critic_lr = config.critic_lr;
  a.train_cost_critic = config.algorithm != Algorithm::Pasac;
  return a;
}

envsim::RoadConfig road_config_for(const TrainConfig& config) {
  envsim::RoadConfig road;
  road.density = config.density;
  road.reward_mode = config.algorithm == Algorithm::Pasac ? envsim::RewardMode::CollisionPenalty
                                                          : envsim::RewardMode::CostConstrained;
  road.validate();
  return road;
}

TrainResult train(const TrainConfig& config, Environment& env, const TrainHooks& hooks) {
  config.validate();
  const bool constrained = config.algorithm != Algorithm::Pasac;
  const SeedSet seeds = SeedSet::from_master(config.seed);

  pasac::Agent agent(agent_config_for(config, env), seeds.net_init);
  pasac::ReplayBuffer buffer(
      static_cast<std::size_t>(std::min<std::uint64_t>(config.buffer_size, config.total_timesteps)),
      env.state_dim());
  Rng sampling(seeds.sampling);
  Rng episode_seeds(seeds.env);

  safelag::PidDualState dual;
  dual.lambda = constrained ? config.lambda_init : 0.0;
  dual.cost_limit = config.cost_limit;
  safelag::CostEstimator estimator(config.cost_window);

  RunLog log;
  log.constrained = constrained;
  log.seeds = seeds;
  log.steps.reserve(static_cast<std::size_t>(config.total_timesteps));

  std::vector<double> obs = env.reset(episode_seeds.next_u64());
  std::uint64_t episode = 0;
  double episode_return = 0.0;
  std::uint64_t episode_length = 0;
  int refused_streak = 0;

  for (std::uint64_t t = 0; t < config.total_timesteps; ++t) {
    const auto action = agent.select_action(obs, pasac::ActionMode::Stochastic, sampling);
    const EnvStep s = env.step(action);

    pasac::Transition tr;
    tr.state = obs;
    tr.action = action;
    tr.reward = s.reward;
    tr.cost = s.cost;
    tr.next_state = s.observation;
    tr.done = s.terminal;
    buffer.add(tr);
    estimator.accumulate_step_cost(s.cost);
    episode_return += s.reward;
    ++episode_length;

    StepRecord rec;
    rec.step = t;
    rec.episode = episode;
    rec.reward = s.reward;
    rec.cost = s.cost;

    if (t >= config.warmup_steps && buffer.size() >= config.batch_size) {
      const auto batch = buffer.sample(config.batch_size, sampling);
      const auto stats = agent.train_step(batch, constrained ? dual.lambda : 0.0, sampling);
      rec.q1_loss = stats.q1_loss;
      rec.q2_loss = stats.q2_loss;
      rec.cost_loss = stats.cost_loss;
      rec.actor_loss = stats.actor_loss;
      rec.discrete_entropy = stats.discrete_entropy;
      rec.updated = true;
      refused_streak = stats.refused ? refused_streak + 1 : 0;
      if (refused_streak > kMaxRefusedStreak)
        throw TrainingAborted("training aborted at step " + std::to_string(t) + ": " +
                              std::to_string(refused_streak) +
                              " consecutive updates with non-finite losses or gradients" +
                              " (q1 " + std::to_string(stats.q1_loss) + ", actor " +
                              std::to_string(stats.actor_loss) + ")");
    }

    if (s.done) {
      const double cost_total = estimator.current_episode_total();
      const double estimate = estimator.finish_episode();
      if (constrained && t >= config.warmup_steps) {
        dual = config.algorithm == Algorithm::PasacPidLag
                   ? safelag::pid_update(dual, config.pid, estimate)
                   : safelag::integral_update(dual, config.effective_lambda_lr(), estimate);
      }
      EpisodeRecord ep;
      ep.episode = episode;
      ep.end_step = t;
      ep.episode_return = episode_return;
      ep.cost_total = cost_total;
      ep.length = episode_length;
      ep.termination = std::string(s.reason);
      ep.lambda = constrained ? dual.lambda : 0.0;
      ep.cost_estimate = estimate;
      log.episodes.push_back(ep);
      if (hooks.on_episode) hooks.on_episode(ep);

      ++episode;
      episode_return = 0.0;
      episode_length = 0;
      obs = env.reset(episode_seeds.next_u64());
    } else {
      obs = s.observation;
    }

    rec.lambda = constrained ? dual.lambda : 0.0;
    rec.cost_estimate = estimator.estimate();
    rec.pid_error = dual.last_error;
    rec.pid_integral = dual.integral;
    rec.pid_delta = dual.last_delta;
    log.steps.push_back(rec);
  }

  if (!constrained) dual = safelag::PidDualState{0.0, 0.0, 0.0, config.cost_limit, 0.0, 0.0};
  return {std::move(agent), std::move(log), dual};
}

TrainResult train(const TrainConfig& config, const TrainHooks& hooks) {
  LaneChangeEnv env(road_config_for(config));
  return train(config, env, hooks);
}

}  // namespace lanesafe::harness
