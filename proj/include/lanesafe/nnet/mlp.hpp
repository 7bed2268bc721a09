#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lanesafe/nnet/kernels.hpp"
#include "lanesafe/nnet/matrix.hpp"
#include "lanesafe/rng.hpp"

namespace lanesafe::nnet {

enum class Activation : std::uint8_t { Identity = 0, Relu = 1 };

struct DenseLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weight;  // [out_dim x in_dim], row-major
  std::vector<double> bias;    // [out_dim]
  Activation activation = Activation::Identity;

  bool operator==(const DenseLayer&) const = default;
};

/// Parameters of a fully connected network.
struct MlpParams {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const noexcept { return layers.empty() ? 0 : layers.front().in_dim; }
  std::size_t output_dim() const noexcept { return layers.empty() ? 0 : layers.back().out_dim; }
  std::size_t parameter_count() const noexcept;
  bool all_finite() const noexcept;

  /// Throws StructuralError if layer dimensions do not chain or storage sizes disagree.
  void validate() const;

  bool operator==(const MlpParams&) const = default;
};

/// Rectifier hidden layers, identity output. Weights uniform in
/// [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
MlpParams make_mlp(std::size_t input_dim, std::span<const std::size_t> hidden,
                   std::size_t output_dim, Rng& rng);

struct LayerGradient {
  std::vector<double> weight;
  std::vector<double> bias;
};

/// One real per parameter, shaped like the MlpParams it was computed for.
struct GradientSet {
  std::vector<LayerGradient> layers;

  static GradientSet zeros_like(const MlpParams& params);
  bool all_finite() const noexcept;
  bool congruent_with(const MlpParams& params) const noexcept;
  double max_abs() const noexcept;
  GradientSet& operator+=(const GradientSet& other);
  GradientSet& operator*=(double s);
};

/// Activations kept by a forward pass: activations[0] is the input and
/// activations[k + 1] is the post-activation output of layer k.
struct ForwardTrace {
  std::vector<Matrix> activations;
  std::vector<std::size_t> dims;  // input dim followed by each layer's output dim
};

struct ForwardResult {
  Matrix output;
  ForwardTrace trace;
};

/// Batched forward pass, one sample per row. Throws StructuralError on a
/// dimension mismatch and ValidationError on non-finite input or output.
ForwardResult forward(const MlpParams& params, const Matrix& input,
                      Backend backend = Backend::Parallel);

/// Forward pass that keeps no trace.
Matrix predict(const MlpParams& params, const Matrix& input, Backend backend = Backend::Parallel);

/// Single-sample convenience overload.
std::vector<double> predict(const MlpParams& params, std::span<const double> input,
                            Backend backend = Backend::Parallel);

enum class GradientMode {
  Full,       ///< parameter gradients and input gradient
  InputOnly,  ///< input gradient only; the returned GradientSet is empty
};

struct BackwardResult {
  GradientSet params;
  Matrix input_grad;
};

/// Reverse-mode gradients of sum_{b,o} output_grad[b,o] * output[b,o].
BackwardResult backward(const MlpParams& params, const ForwardTrace& trace,
                        const Matrix& output_grad, Backend backend = Backend::Parallel,
                        GradientMode mode = GradientMode::Full);

}  // namespace lanesafe::nnet
