#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lanesafe/safelag/pid_lagrangian.hpp"

namespace lanesafe::harness {

enum class Algorithm {
  Pasac,        ///< unconstrained; lambda fixed at 0, cost critic untrained
  PasacPidLag,  ///< PID Lagrangian multiplier
  PasacLag,     ///< integral-only multiplier baseline
};

std::string_view to_string(Algorithm a);
/// Accepts "pasac", "pasac-pidlag" and "pasac-lag". Throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view name);

struct TrainConfig {
  Algorithm algorithm = Algorithm::PasacPidLag;
  std::uint64_t total_timesteps = 400000;
  std::uint64_t warmup_steps = 10000;
  std::size_t batch_size = 256;
  double gamma = 0.99;
  double alpha = 0.2;
  double actor_lr = 1e-4;
  double critic_lr = 3e-4;
  std::size_t buffer_size = 1000000;
  double tau = 0.005;
  safelag::PidGains pid{};
  double cost_limit = 0.0;
  double lambda_init = 0.001;
  /// Step size of the integral-only baseline; matched to kp when unset (<= 0).
  double lambda_lr = 0.0;
  double density = 15.0;
  std::uint64_t seed = 1;
  std::size_t eval_episodes = 400;
  std::vector<std::size_t> hidden_units{256, 256};
  std::size_t cost_window = 10;

  double effective_lambda_lr() const noexcept { return lambda_lr > 0.0 ? lambda_lr : pid.kp; }
  /// Throws ConfigError on invalid values.
  void validate() const;
};

/// JSON file with exactly the TrainConfig keys (all optional, unknown keys rejected).
TrainConfig load_train_config(const std::filesystem::path& path);
void save_train_config(const std::filesystem::path& path, const TrainConfig& config);

}  // namespace lanesafe::harness
