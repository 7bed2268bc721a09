#include "lanesafe/pasac/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "lanesafe/error.hpp"
#include "lanesafe/nnet/checkpoint.hpp"

namespace lanesafe::pasac {

using nnet::Matrix;
using nnet::MlpParams;

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;
constexpr char kAgentMagic[8] = {'L', 'S', 'A', 'G', 'E', 'N', 'T', '\0'};
constexpr std::uint32_t kAgentFormatVersion = 1;

std::size_t actor_output_dim(const AgentConfig& c) { return 2 + c.num_discrete; }

Matrix critic_input(const Matrix& states, std::span<const double> squashed) {
  Matrix x(states.rows(), states.cols() + 1);
  for (std::size_t r = 0; r < states.rows(); ++r) {
    auto dst = x.row(r);
    auto src = states.row(r);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[states.cols()] = squashed[r];
  }
  return x;
}

/// Per-row decoded actor output with the continuous head evaluated at one noise draw.
struct PolicyRow {
  double mean;
  double raw_log_std;
  double log_std;
  double noise;
  double pre_squash;
  double squashed;
  double log_prob_c;
  std::vector<double> probs;
  std::vector<double> log_probs;
};

PolicyRow decode_row(std::span<const double> out, const AgentConfig& c, double noise) {
  PolicyRow p;
  p.mean = out[0];
  p.raw_log_std = out[1];
  p.log_std = nnet::clamp_log_std(out[1]);
  p.noise = noise;
  p.pre_squash = p.mean + std::exp(p.log_std) * noise;
  p.squashed = std::tanh(p.pre_squash);
  p.log_prob_c = -0.5 * noise * noise - p.log_std - kHalfLogTwoPi -
                 nnet::log_one_minus_tanh_sq(p.pre_squash) - std::log(c.bounds.half_range());
  auto logits = out.subspan(2, c.num_discrete);
  p.probs = nnet::softmax(logits);
  p.log_probs = nnet::log_softmax(logits);
  return p;
}

void require_noise(std::span<const double> noise, std::size_t n) {
  if (noise.size() != n)
    throw StructuralError("noise vector length " + std::to_string(noise.size()) +
                          " != batch size " + std::to_string(n));
}

}  // namespace

void AgentConfig::validate() const {
  if (state_dim == 0) throw ConfigError("state_dim must be positive");
  if (num_discrete == 0) throw ConfigError("num_discrete must be at least 1");
  bounds.validate();
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("learning rates must be positive");
}

AgentNets AgentNets::create(const AgentConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  AgentNets n;
  n.actor = nnet::make_mlp(config.state_dim, config.hidden, actor_output_dim(config), rng);
  n.q1 = nnet::make_mlp(config.state_dim + 1, config.hidden, config.num_discrete, rng);
  n.q2 = nnet::make_mlp(config.state_dim + 1, config.hidden, config.num_discrete, rng);
  n.cost = nnet::make_mlp(config.state_dim + 1, config.hidden, config.num_discrete, rng);
  n.q1_target = n.q1;
  n.q2_target = n.q2;
  n.cost_target = n.cost;
  return n;
}

double squash_action(const AgentConfig& config, double acceleration) noexcept {
  return (acceleration - config.bounds.midpoint()) / config.bounds.half_range();
}

CriticTargets compute_critic_targets(const AgentNets& nets, const AgentConfig& config,
                                     const Batch& batch, std::span<const double> noise,
                                     bool with_cost) {
  const std::size_t n = batch.size();
  if (n == 0) throw ContractError("compute_critic_targets: empty batch");
  require_noise(noise, n);
  const Matrix out = nnet::predict(nets.actor, batch.next_states, config.backend);
  std::vector<PolicyRow> rows;
  rows.reserve(n);
  std::vector<double> squashed(n);
  for (std::size_t r = 0; r < n; ++r) {
    rows.push_back(decode_row(out.row(r), config, noise[r]));
    squashed[r] = rows.back().squashed;
  }
  const Matrix x = critic_input(batch.next_states, squashed);
  const Matrix t1 = nnet::predict(nets.q1_target, x, config.backend);
  const Matrix t2 = nnet::predict(nets.q2_target, x, config.backend);
  Matrix tc;
  if (with_cost) tc = nnet::predict(nets.cost_target, x, config.backend);

  CriticTargets y;
  y.reward.resize(n);
  if (with_cost) y.cost.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& p = rows[r];
    double soft_value = 0.0;
    double cost_value = 0.0;
    for (std::size_t d = 0; d < config.num_discrete; ++d) {
      const double q = std::min(t1(r, d), t2(r, d));
      soft_value += p.probs[d] * (q - config.alpha * (p.log_prob_c + p.log_probs[d]));
      if (with_cost) cost_value += p.probs[d] * tc(r, d);
    }
    const double cont = batch.dones[r] ? 0.0 : config.gamma;
    y.reward[r] = batch.rewards[r] + cont * soft_value;
    if (with_cost) y.cost[r] = batch.costs[r] + cont * cost_value;
  }
  return y;
}

LossAndGrad critic_loss(const MlpParams& critic, const AgentConfig& config, const Batch& batch,
                        std::span<const double> targets) {
  const std::size_t n = batch.size();
  if (n == 0) throw ContractError("critic_loss: empty batch");
  if (targets.size() != n) throw StructuralError("critic_loss: target count != batch size");
  std::vector<double> squashed(n);
  for (std::size_t r = 0; r < n; ++r) squashed[r] = squash_action(config, batch.accelerations[r]);
  auto fwd = nnet::forward(critic, critic_input(batch.states, squashed), config.backend);

  Matrix g(n, critic.output_dim());
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto d = static_cast<std::size_t>(batch.discrete[r]);
    if (d >= critic.output_dim()) throw ValidationError("critic_loss: discrete action out of range");
    const double residual = fwd.output(r, d) - targets[r];
    loss += residual * residual;
    g(r, d) = 2.0 * residual * inv_n;
  }
  LossAndGrad res;
  res.loss = loss * inv_n;
  res.grads = nnet::backward(critic, fwd.trace, g, config.backend).params;
  return res;
}

ActorLossResult actor_loss(const MlpParams& actor, const AgentNets& nets,
                           const AgentConfig& config, const Matrix& states, double lambda,
                           std::span<const double> noise) {
  const std::size_t n = states.rows();
  const std::size_t k = config.num_discrete;
  if (n == 0) throw ContractError("actor_loss: empty batch");
  if (!(lambda >= 0.0)) throw ValidationError("actor_loss: lambda must be non-negative");
  require_noise(noise, n);

  auto afwd = nnet::forward(actor, states, config.backend);
  std::vector<PolicyRow> rows;
  rows.reserve(n);
  std::vector<double> squashed(n);
  for (std::size_t r = 0; r < n; ++r) {
    rows.push_back(decode_row(afwd.output.row(r), config, noise[r]));
    squashed[r] = rows.back().squashed;
  }
  const Matrix x = critic_input(states, squashed);
  auto f1 = nnet::forward(nets.q1, x, config.backend);
  auto f2 = nnet::forward(nets.q2, x, config.backend);
  const bool use_cost = lambda > 0.0;
  nnet::ForwardResult fc;
  if (use_cost) fc = nnet::forward(nets.cost, x, config.backend);

  const double inv_n = 1.0 / static_cast<double>(n);
  const double blend = 1.0 / (1.0 + lambda);
  const double alpha = config.alpha;
  Matrix g1(n, k), g2(n, k), gc;
  if (use_cost) gc.assign(n, k);
  Matrix g_actor(n, actor.output_dim());

  ActorLossResult res;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& p = rows[r];
    std::vector<double> q_blend(k);
    double row_loss = alpha * p.log_prob_c;
    for (std::size_t d = 0; d < k; ++d) {
      const double qmin = std::min(f1.output(r, d), f2.output(r, d));
      const double qc = use_cost ? fc.output(r, d) : 0.0;
      q_blend[d] = (qmin - lambda * qc) * blend;
      row_loss += p.probs[d] * (alpha * p.log_probs[d] - q_blend[d]);
      // dL/dQ for each critic output, routed to whichever twin is the minimum.
      const double gq = -p.probs[d] * blend * inv_n;
      if (f1.output(r, d) <= f2.output(r, d))
        g1(r, d) = gq;
      else
        g2(r, d) = gq;
      if (use_cost) gc(r, d) = p.probs[d] * lambda * blend * inv_n;
    }
    res.loss += row_loss;
    double entropy = 0.0;
    for (std::size_t d = 0; d < k; ++d) entropy -= p.probs[d] * p.log_probs[d];
    res.mean_discrete_entropy += entropy;
    res.mean_log_prob += p.log_prob_c;

    // Discrete head: dL/dlogit_j = p_j (g_j - sum_d p_d g_d), g_d = alpha (log p_d + 1) - Qblend_d.
    double mean_g = 0.0;
    std::vector<double> gd(k);
    for (std::size_t d = 0; d < k; ++d) {
      gd[d] = alpha * (p.log_probs[d] + 1.0) - q_blend[d];
      mean_g += p.probs[d] * gd[d];
    }
    for (std::size_t d = 0; d < k; ++d) g_actor(r, 2 + d) = p.probs[d] * (gd[d] - mean_g) * inv_n;
  }

  // Pathwise gradient through the critics' action input (last input column).
  const auto b1 = nnet::backward(nets.q1, f1.trace, g1, config.backend, nnet::GradientMode::InputOnly);
  const auto b2 = nnet::backward(nets.q2, f2.trace, g2, config.backend, nnet::GradientMode::InputOnly);
  nnet::BackwardResult bc;
  if (use_cost)
    bc = nnet::backward(nets.cost, fc.trace, gc, config.backend, nnet::GradientMode::InputOnly);
  const std::size_t a_col = config.state_dim;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& p = rows[r];
    double dl_dy = b1.input_grad(r, a_col) + b2.input_grad(r, a_col);
    if (use_cost) dl_dy += bc.input_grad(r, a_col);
    const double sigma = std::exp(p.log_std);
    // d/du [-log(1 - tanh^2 u)] = 2 tanh u
    const double dl_du = alpha * 2.0 * p.squashed * inv_n + dl_dy * (1.0 - p.squashed * p.squashed);
    g_actor(r, 0) = dl_du;
    const bool clamped = p.raw_log_std < nnet::kLogStdMin || p.raw_log_std > nnet::kLogStdMax;
    g_actor(r, 1) = clamped ? 0.0 : -alpha * inv_n + dl_du * sigma * p.noise;
  }
  res.loss *= inv_n;
  res.mean_discrete_entropy *= inv_n;
  res.mean_log_prob *= inv_n;
  res.grads = nnet::backward(actor, afwd.trace, g_actor, config.backend).params;
  return res;
}

void soft_update(const MlpParams& online, MlpParams& target, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("soft_update: tau must lie in (0, 1]");
  if (online.layers.size() != target.layers.size())
    throw StructuralError("soft_update: layer count mismatch");
  for (std::size_t k = 0; k < online.layers.size(); ++k) {
    const auto& o = online.layers[k];
    auto& t = target.layers[k];
    if (o.weight.size() != t.weight.size() || o.bias.size() != t.bias.size())
      throw StructuralError("soft_update: layer shape mismatch");
    for (std::size_t i = 0; i < o.weight.size(); ++i)
      t.weight[i] = tau * o.weight[i] + (1.0 - tau) * t.weight[i];
    for (std::size_t i = 0; i < o.bias.size(); ++i)
      t.bias[i] = tau * o.bias[i] + (1.0 - tau) * t.bias[i];
  }
}

Agent::Agent(AgentConfig config, std::uint64_t init_seed)
    : Agent(config, AgentNets::create(config, init_seed)) {}

Agent::Agent(AgentConfig config, AgentNets nets) : config_(std::move(config)), nets_(std::move(nets)) {
  config_.validate();
  if (nets_.actor.input_dim() != config_.state_dim ||
      nets_.actor.output_dim() != actor_output_dim(config_) ||
      nets_.q1.input_dim() != config_.state_dim + 1 || nets_.q1.output_dim() != config_.num_discrete)
    throw StructuralError("agent networks do not match the agent configuration");
  actor_opt_ = nnet::AdamState::for_params(nets_.actor, {.learning_rate = config_.actor_lr});
  q1_opt_ = nnet::AdamState::for_params(nets_.q1, {.learning_rate = config_.critic_lr});
  q2_opt_ = nnet::AdamState::for_params(nets_.q2, {.learning_rate = config_.critic_lr});
  cost_opt_ = nnet::AdamState::for_params(nets_.cost, {.learning_rate = config_.critic_lr});
}

HybridAction Agent::select_action(std::span<const double> observation, ActionMode mode,
                                  Rng& rng) const {
  if (mode == ActionMode::Deterministic) return select_action(observation, mode, 0.0, 0.0);
  const double z = rng.normal();
  const double u = rng.uniform();
  return select_action(observation, mode, z, u);
}

HybridAction Agent::select_action(std::span<const double> observation, ActionMode mode,
                                  double normal_draw, double uniform_draw) const {
  if (observation.size() != config_.state_dim)
    throw StructuralError("select_action: observation has wrong dimension");
  const auto out = nnet::predict(nets_.actor, observation, config_.backend);
  const auto head = nnet::GaussianHead::from_raw(out[0], out[1]);
  const std::span<const double> logits(out.data() + 2, config_.num_discrete);
  HybridAction a;
  if (mode == ActionMode::Deterministic) {
    a.acceleration = nnet::gaussian_deterministic(head, config_.bounds);
    a.lane_change = static_cast<int>(nnet::argmax(logits));
    return a;
  }
  const auto cs = nnet::gaussian_sample_squashed(head, normal_draw, config_.bounds);
  const auto ds = nnet::categorical_sample(logits, uniform_draw);
  a.acceleration = cs.action;
  a.log_prob_continuous = cs.log_prob;
  a.lane_change = static_cast<int>(ds.index);
  a.log_prob_discrete = ds.log_prob;
  return a;
}

double Agent::hybrid_log_prob(std::span<const double> observation,
                              const HybridAction& action) const {
  if (action.lane_change < 0 || static_cast<std::size_t>(action.lane_change) >= config_.num_discrete)
    throw ValidationError("hybrid_log_prob: discrete action out of range");
  const auto out = nnet::predict(nets_.actor, observation, config_.backend);
  const auto head = nnet::GaussianHead::from_raw(out[0], out[1]);
  const double lc = nnet::squashed_log_prob(head, action.acceleration, config_.bounds);
  const auto lp = nnet::log_softmax(std::span<const double>(out.data() + 2, config_.num_discrete));
  return lc + lp[static_cast<std::size_t>(action.lane_change)];
}

std::vector<double> Agent::discrete_probabilities(std::span<const double> observation) const {
  const auto out = nnet::predict(nets_.actor, observation, config_.backend);
  return nnet::softmax(std::span<const double>(out.data() + 2, config_.num_discrete));
}

CriticTargets Agent::critic_target(const Batch& batch, Rng& rng) const {
  std::vector<double> noise(batch.size());
  for (double& z : noise) z = rng.normal();
  return compute_critic_targets(nets_, config_, batch, noise, config_.train_cost_critic);
}

UpdateStats Agent::update_critics(const Batch& batch, const CriticTargets& targets) {
  UpdateStats s;
  auto step = [&](nnet::MlpParams& net, nnet::AdamState& opt, std::span<const double> y,
                  double& loss_out) {
    auto lg = critic_loss(net, config_, batch, y);
    loss_out = lg.loss;
    if (!std::isfinite(lg.loss) || !lg.grads.all_finite()) {
      s.refused = true;
      return;
    }
    nnet::adam_step(net, lg.grads, opt);
  };
  step(nets_.q1, q1_opt_, targets.reward, s.q1_loss);
  step(nets_.q2, q2_opt_, targets.reward, s.q2_loss);
  if (config_.train_cost_critic) {
    if (targets.cost.size() != batch.size())
      throw ContractError("update_critics: cost targets missing for a cost-trained agent");
    step(nets_.cost, cost_opt_, targets.cost, s.cost_loss);
  }
  return s;
}

UpdateStats Agent::update_actor(const Batch& batch, double lambda, Rng& rng) {
  std::vector<double> noise(batch.size());
  for (double& z : noise) z = rng.normal();
  UpdateStats s;
  auto res = actor_loss(nets_.actor, nets_, config_, batch.states, lambda, noise);
  s.actor_loss = res.loss;
  s.discrete_entropy = res.mean_discrete_entropy;
  if (!std::isfinite(res.loss) || !res.grads.all_finite()) {
    s.refused = true;
    return s;
  }
  nnet::adam_step(nets_.actor, res.grads, actor_opt_);
  return s;
}

void Agent::soft_update_targets() {
  soft_update(nets_.q1, nets_.q1_target, config_.tau);
  soft_update(nets_.q2, nets_.q2_target, config_.tau);
  if (config_.train_cost_critic) soft_update(nets_.cost, nets_.cost_target, config_.tau);
}

UpdateStats Agent::train_step(const Batch& batch, double lambda, Rng& rng) {
  const auto targets = critic_target(batch, rng);
  UpdateStats s = update_critics(batch, targets);
  const UpdateStats a = update_actor(batch, lambda, rng);
  s.actor_loss = a.actor_loss;
  s.discrete_entropy = a.discrete_entropy;
  s.refused = s.refused || a.refused;
  soft_update_targets();
  return s;
}

void Agent::save(const std::filesystem::path& path, const CheckpointMeta& meta) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  using namespace nnet::binio;
  write_magic(out, kAgentMagic);
  write_u32(out, kAgentFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(config_.state_dim));
  write_u32(out, static_cast<std::uint32_t>(config_.num_discrete));
  write_f64(out, config_.bounds.low);
  write_f64(out, config_.bounds.high);
  write_f64(out, config_.alpha);
  write_f64(out, config_.gamma);
  write_f64(out, config_.tau);
  write_f64(out, config_.actor_lr);
  write_f64(out, config_.critic_lr);
  write_u8(out, config_.train_cost_critic ? 1 : 0);
  write_f64(out, meta.lambda);
  write_f64(out, meta.pid_integral);
  write_f64(out, meta.pid_previous_cost);
  write_u64(out, meta.step);
  for (const auto* net : {&nets_.actor, &nets_.q1, &nets_.q2, &nets_.q1_target, &nets_.q2_target,
                          &nets_.cost, &nets_.cost_target})
    nnet::write_mlp(out, *net);
  if (!out) throw IoError("failed writing " + path.string());
}

Agent Agent::load(const std::filesystem::path& path, CheckpointMeta* meta, nnet::Backend backend) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  using namespace nnet::binio;
  expect_magic(in, kAgentMagic, "agent checkpoint " + path.string());
  const auto version = read_u32(in);
  if (version != kAgentFormatVersion)
    throw StructuralError("agent checkpoint: unsupported format version " + std::to_string(version));
  AgentConfig c;
  c.state_dim = read_u32(in);
  c.num_discrete = read_u32(in);
  c.bounds.low = read_f64(in);
  c.bounds.high = read_f64(in);
  c.alpha = read_f64(in);
  c.gamma = read_f64(in);
  c.tau = read_f64(in);
  c.actor_lr = read_f64(in);
  c.critic_lr = read_f64(in);
  c.train_cost_critic = read_u8(in) != 0;
  CheckpointMeta m;
  m.lambda = read_f64(in);
  m.pid_integral = read_f64(in);
  m.pid_previous_cost = read_f64(in);
  m.step = read_u64(in);
  AgentNets n;
  for (auto* net : {&n.actor, &n.q1, &n.q2, &n.q1_target, &n.q2_target, &n.cost, &n.cost_target})
    *net = nnet::read_mlp(in);
  c.hidden.clear();
  for (std::size_t k = 0; k + 1 < n.actor.layers.size(); ++k)
    c.hidden.push_back(n.actor.layers[k].out_dim);
  c.backend = backend;
  if (meta) *meta = m;
  return Agent(std::move(c), std::move(n));
}

}  // namespace lanesafe::pasac
