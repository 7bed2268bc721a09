#pragma once

#include <cstdint>

#include "lanesafe/nnet/mlp.hpp"

namespace lanesafe::nnet {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  GradientSet first_moment;
  GradientSet second_moment;
  std::int64_t step = 0;
  AdamConfig config;

  static AdamState for_params(const MlpParams& params, AdamConfig config);
};

/// Bias-corrected Adam update of `params` in place. Refuses (throws
/// ValidationError, nothing modified) when any gradient is non-finite.
void adam_step(MlpParams& params, const GradientSet& grads, AdamState& state);

}  // namespace lanesafe::nnet
