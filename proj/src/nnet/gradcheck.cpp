#include "lanesafe/nnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lanesafe/error.hpp"

namespace lanesafe::nnet {

double finite_difference_check(const std::function<double(const MlpParams&)>& loss,
                               const MlpParams& params, const GradientSet& analytic,
                               GradCheckOptions options) {
  if (!analytic.congruent_with(params))
    throw StructuralError("finite_difference_check: gradient shape differs from parameters");
  MlpParams probe = params;
  double worst = 0.0;
  auto check = [&](double& slot, double analytic_value) {
    const double saved = slot;
    slot = saved + options.step;
    const double up = loss(probe);
    slot = saved - options.step;
    const double down = loss(probe);
    slot = saved;
    const double numeric = (up - down) / (2.0 * options.step);
    const double denom =
        std::max({std::abs(numeric), std::abs(analytic_value), options.absolute_floor});
    worst = std::max(worst, std::abs(numeric - analytic_value) / denom);
  };
  for (std::size_t k = 0; k < probe.layers.size(); ++k) {
    auto& l = probe.layers[k];
    for (std::size_t i = 0; i < l.weight.size(); ++i) check(l.weight[i], analytic.layers[k].weight[i]);
    for (std::size_t i = 0; i < l.bias.size(); ++i) check(l.bias[i], analytic.layers[k].bias[i]);
  }
  return worst;
}

double relu_margin(const MlpParams& params, const Matrix& input) {
  double margin = std::numeric_limits<double>::infinity();
  Matrix x = input;
  Matrix y;
  for (const auto& l : params.layers) {
    kernels::dense_forward(Backend::Serial, l.weight, l.bias, x, y);
    if (l.activation == Activation::Relu) {
      for (std::size_t k = 0; k < y.rows() * y.cols(); ++k)
        margin = std::min(margin, std::abs(y.data()[k]));
      kernels::relu_inplace(Backend::Serial, y);
    }
    std::swap(x, y);
  }
  return margin;
}

}  // namespace lanesafe::nnet
