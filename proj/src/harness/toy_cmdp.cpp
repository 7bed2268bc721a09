#include "lanesafe/harness/toy_cmdp.hpp"

#include <algorithm>

#include "lanesafe/error.hpp"
#include "lanesafe/harness/trainer.hpp"

namespace lanesafe::harness {

void summarize_trace(ToyCmdpTrace& trace, double cost_limit) {
  if (trace.cost_estimate.empty()) throw ValidationError("toy trace has no episodes");
  trace.peak = *std::max_element(trace.cost_estimate.begin(), trace.cost_estimate.end());
  trace.final = trace.cost_estimate.back();
  trace.min_lambda = trace.lambda.empty()
                         ? 0.0
                         : *std::min_element(trace.lambda.begin(), trace.lambda.end());
  const double bound = cost_limit + 0.1 * trace.peak;
  std::size_t last_above = trace.cost_estimate.size();
  for (std::size_t i = trace.cost_estimate.size(); i-- > 0;) {
    if (trace.cost_estimate[i] > bound) {
      last_above = i;
      break;
    }
  }
  if (last_above == trace.cost_estimate.size()) {
    trace.settled = true;
    trace.settled_at = 0;
  } else {
    trace.settled = last_above + 1 < trace.cost_estimate.size();
    trace.settled_at = last_above + 1;
  }
}

namespace {

ToyCmdpTrace run_variant(const ToyCmdpOptions& o, Algorithm algorithm) {
  TrainConfig c;
  c.algorithm = algorithm;
  c.total_timesteps = o.episodes * static_cast<std::uint64_t>(o.chase.horizon);
  c.warmup_steps = o.warmup_steps;
  c.batch_size = o.batch_size;
  c.gamma = o.gamma;
  c.alpha = o.alpha;
  c.actor_lr = o.actor_lr;
  c.critic_lr = o.critic_lr;
  c.buffer_size = static_cast<std::size_t>(c.total_timesteps);
  c.tau = o.tau;
  c.pid = o.gains;
  c.cost_limit = o.cost_limit;
  c.lambda_init = o.lambda_init;
  c.lambda_lr = o.gains.kp;
  c.seed = o.seed;
  c.hidden_units = o.hidden;
  c.cost_window = o.cost_window;

  ToyChaseEnv env(o.chase);
  ToyCmdpTrace trace;
  TrainHooks hooks;
  double window_sum = 0.0;
  hooks.on_episode = [&](const EpisodeRecord& e) {
    trace.episode_cost.push_back(e.cost_total);
    window_sum += e.cost_total;
    const std::size_t n = trace.episode_cost.size();
    if (n > o.smoothing_window) window_sum -= trace.episode_cost[n - 1 - o.smoothing_window];
    trace.cost_estimate.push_back(window_sum / static_cast<double>(std::min(n, o.smoothing_window)));
    trace.lambda.push_back(e.lambda);
  };
  train(c, env, hooks);
  summarize_trace(trace, o.cost_limit);
  return trace;
}

}  // namespace

ToyCmdpReport run_toy_cmdp(const ToyCmdpOptions& options) {
  if (options.smoothing_window == 0) throw ConfigError("toy smoothing window must be positive");
  ToyCmdpReport r;
  r.pid = run_variant(options, Algorithm::PasacPidLag);
  r.integral = run_variant(options, Algorithm::PasacLag);
  r.settle_bound = options.cost_limit + 0.1 * r.pid.peak;
  return r;
}

}  // namespace lanesafe::harness
