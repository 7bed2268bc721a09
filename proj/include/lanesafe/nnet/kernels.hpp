#pragma once

#include <cstddef>
#include <span>

#include "lanesafe/nnet/matrix.hpp"

namespace lanesafe::nnet {

/// Which implementation of the dense-layer kernels to run. `Serial` is the
/// straightforward per-sample reference; `Parallel` is the OpenMP batched
/// version used for training. Both accumulate every output element in the
/// same order, so results agree to rounding.
enum class Backend { Serial, Parallel };

namespace kernels {

// Layer weights are stored row-major as [out x in].

/// y[b, o] = bias[o] + sum_i x[b, i] * w[o, i]. `y` is resized.
void dense_forward(Backend backend, std::span<const double> weight, std::span<const double> bias,
                   const Matrix& x, Matrix& y);

/// dx[b, i] = sum_o dy[b, o] * w[o, i]. `dx` is resized.
void dense_backward_input(Backend backend, std::span<const double> weight, std::size_t in_dim,
                          const Matrix& dy, Matrix& dx);

/// dw[o, i] = sum_b dy[b, o] * x[b, i]; db[o] = sum_b dy[b, o]. Overwrites dw and db.
void dense_backward_params(Backend backend, const Matrix& x, const Matrix& dy,
                           std::span<double> dweight, std::span<double> dbias);

/// In-place rectifier.
void relu_inplace(Backend backend, Matrix& m);

/// dy *= (activation > 0), elementwise.
void relu_mask_inplace(Backend backend, const Matrix& activation, Matrix& dy);

namespace serial {
void dense_forward(std::span<const double> weight, std::span<const double> bias, const Matrix& x,
                   Matrix& y);
void dense_backward_input(std::span<const double> weight, std::size_t in_dim, const Matrix& dy,
                          Matrix& dx);
void dense_backward_params(const Matrix& x, const Matrix& dy, std::span<double> dweight,
                           std::span<double> dbias);
}  // namespace serial

namespace parallel {
void dense_forward(std::span<const double> weight, std::span<const double> bias, const Matrix& x,
                   Matrix& y);
void dense_backward_input(std::span<const double> weight, std::size_t in_dim, const Matrix& dy,
                          Matrix& dx);
void dense_backward_params(const Matrix& x, const Matrix& dy, std::span<double> dweight,
                           std::span<double> dbias);
}  // namespace parallel

}  // namespace kernels
}  // namespace lanesafe::nnet
