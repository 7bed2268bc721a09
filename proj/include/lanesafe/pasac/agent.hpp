#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lanesafe/nnet/adam.hpp"
#include "lanesafe/nnet/heads.hpp"
#include "lanesafe/nnet/mlp.hpp"
#include "lanesafe/pasac/replay_buffer.hpp"
#include "lanesafe/pasac/types.hpp"
#include "lanesafe/rng.hpp"

namespace lanesafe::pasac {

struct AgentConfig {
  std::size_t state_dim = 10;
  std::size_t num_discrete = 2;
  nnet::ActionBounds bounds = kAccelerationBounds;
  std::vector<std::size_t> hidden{256, 256};
  double gamma = 0.99;
  double alpha = 0.2;
  double tau = 0.005;
  double actor_lr = 1e-4;
  double critic_lr = 3e-4;
  /// Train the cost critic. The network always exists so that checkpoints
  /// have one layout; in unconstrained mode it stays at initialization.
  bool train_cost_critic = true;
  nnet::Backend backend = nnet::Backend::Parallel;

  void validate() const;
};

/// Actor output layout: [mean, raw log-std, logit_0 .. logit_{k-1}].
/// Critic input layout: [state..., tanh-squashed continuous action];
/// critic output: one value per discrete action.
struct AgentNets {
  nnet::MlpParams actor;
  nnet::MlpParams q1;
  nnet::MlpParams q2;
  nnet::MlpParams q1_target;
  nnet::MlpParams q2_target;
  nnet::MlpParams cost;
  nnet::MlpParams cost_target;

  static AgentNets create(const AgentConfig& config, std::uint64_t seed);
};

struct CriticTargets {
  std::vector<double> reward;
  std::vector<double> cost;  // empty when the cost critic is not trained
};

struct LossAndGrad {
  double loss = 0.0;
  nnet::GradientSet grads;
};

struct ActorLossResult {
  double loss = 0.0;
  nnet::GradientSet grads;
  double mean_discrete_entropy = 0.0;
  double mean_log_prob = 0.0;
};

/// Map an acceleration into the critic's (-1, 1) action input.
double squash_action(const AgentConfig& config, double acceleration) noexcept;

/// Bootstrapped targets. `noise` holds one standard-normal draw per batch row
/// for the resampled next action; the discrete expectation is exact.
CriticTargets compute_critic_targets(const AgentNets& nets, const AgentConfig& config,
                                     const Batch& batch, std::span<const double> noise,
                                     bool with_cost);

/// Mean squared error of `critic` at the stored (state, action) pairs against
/// `targets`, with its parameter gradient.
LossAndGrad critic_loss(const nnet::MlpParams& critic, const AgentConfig& config,
                        const Batch& batch, std::span<const double> targets);

/// Policy loss mean_b[ alpha * log pi_c + sum_d pi_d (alpha * log pi_d - Qblend_d) ] with
/// Qblend = (min(Q1, Q2) - lambda * Qc) / (1 + lambda), its gradient w.r.t. the
/// actor parameters. Continuous head reparameterized with the given `noise`.
ActorLossResult actor_loss(const nnet::MlpParams& actor, const AgentNets& nets,
                           const AgentConfig& config, const nnet::Matrix& states, double lambda,
                           std::span<const double> noise);

/// target <- tau * online + (1 - tau) * target. Throws StructuralError on shape mismatch.
void soft_update(const nnet::MlpParams& online, nnet::MlpParams& target, double tau);

struct UpdateStats {
  double q1_loss = 0.0;
  double q2_loss = 0.0;
  double cost_loss = 0.0;
  double actor_loss = 0.0;
  double discrete_entropy = 0.0;
  bool refused = false;  // a non-finite loss or gradient blocked some update
};

/// Metadata carried alongside the networks in an agent checkpoint.
struct CheckpointMeta {
  double lambda = 0.0;
  double pid_integral = 0.0;
  double pid_previous_cost = 0.0;
  std::uint64_t step = 0;
};

class Agent {
 public:
  Agent(AgentConfig config, std::uint64_t init_seed);
  Agent(AgentConfig config, AgentNets nets);

  const AgentConfig& config() const noexcept { return config_; }
  const AgentNets& nets() const noexcept { return nets_; }
  AgentNets& nets() noexcept { return nets_; }

  /// Stochastic mode draws one normal and one uniform from `rng`;
  /// deterministic mode uses the squashed mean and the argmax discrete action.
  HybridAction select_action(std::span<const double> observation, ActionMode mode,
                             Rng& rng) const;
  /// Same as select_action but with explicit draws.
  HybridAction select_action(std::span<const double> observation, ActionMode mode,
                             double normal_draw, double uniform_draw) const;

  /// log pi_c(a_c | s) + log pi_d(a_d | s).
  double hybrid_log_prob(std::span<const double> observation, const HybridAction& action) const;

  /// Discrete action probabilities at `observation`.
  std::vector<double> discrete_probabilities(std::span<const double> observation) const;

  CriticTargets critic_target(const Batch& batch, Rng& rng) const;
  UpdateStats update_critics(const Batch& batch, const CriticTargets& targets);
  UpdateStats update_actor(const Batch& batch, double lambda, Rng& rng);
  void soft_update_targets();

  /// One full gradient phase: targets, critics, actor, target sync.
  UpdateStats train_step(const Batch& batch, double lambda, Rng& rng);

  void save(const std::filesystem::path& path, const CheckpointMeta& meta) const;
  static Agent load(const std::filesystem::path& path, CheckpointMeta* meta = nullptr,
                    nnet::Backend backend = nnet::Backend::Parallel);

 private:
  AgentConfig config_;
  AgentNets nets_;
  nnet::AdamState actor_opt_;
  nnet::AdamState q1_opt_;
  nnet::AdamState q2_opt_;
  nnet::AdamState cost_opt_;
};

}  // namespace lanesafe::pasac
