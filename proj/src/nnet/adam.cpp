#include "lanesafe/nnet/adam.hpp"

#include <cmath>

#include "lanesafe/error.hpp"

namespace lanesafe::nnet {

AdamState AdamState::for_params(const MlpParams& params, AdamConfig config) {
  if (!(config.learning_rate > 0.0)) throw ValidationError("Adam learning rate must be positive");
  AdamState s;
  s.first_moment = GradientSet::zeros_like(params);
  s.second_moment = GradientSet::zeros_like(params);
  s.config = config;
  return s;
}

namespace {

void update_block(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                  std::vector<double>& v, const AdamConfig& c, double bc1, double bc2) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace

void adam_step(MlpParams& params, const GradientSet& grads, AdamState& state) {
  if (!grads.congruent_with(params) || !state.first_moment.congruent_with(params) ||
      !state.second_moment.congruent_with(params))
    throw StructuralError("adam_step: gradient or moment shapes differ from parameters");
  if (!grads.all_finite()) throw ValidationError("adam_step: non-finite gradient, update refused");

  state.step += 1;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    update_block(params.layers[k].weight, grads.layers[k].weight,
                 state.first_moment.layers[k].weight, state.second_moment.layers[k].weight, c, bc1,
                 bc2);
    update_block(params.layers[k].bias, grads.layers[k].bias, state.first_moment.layers[k].bias,
                 state.second_moment.layers[k].bias, c, bc1, bc2);
  }
}

}  // namespace lanesafe::nnet
