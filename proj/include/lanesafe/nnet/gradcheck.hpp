#pragma once

#include <functional>

#include "lanesafe/nnet/mlp.hpp"

namespace lanesafe::nnet {

struct GradCheckOptions {
  double step = 1e-5;
  double absolute_floor = 1e-6;
};

/// Worst-case relative error between `analytic` and central finite differences
/// of `loss` around `params`, with the denominator floored at
/// `absolute_floor`. Returns 0 for a network with no parameters.
double finite_difference_check(const std::function<double(const MlpParams&)>& loss,
                               const MlpParams& params, const GradientSet& analytic,
                               GradCheckOptions options = {});

/// Smallest |pre-activation| over all rectifier units for the given inputs.
/// Central differences are only a valid oracle where this is well above the
/// step size; returns +inf for a network without rectifiers.
double relu_margin(const MlpParams& params, const Matrix& input);

}  // namespace lanesafe::nnet
