#include "lanesafe/nnet/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lanesafe/error.hpp"

namespace lanesafe::nnet {

namespace {

bool finite_range(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::size_t MlpParams::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

bool MlpParams::all_finite() const noexcept {
  return std::all_of(layers.begin(), layers.end(), [](const DenseLayer& l) {
    return finite_range(l.weight) && finite_range(l.bias);
  });
}

void MlpParams::validate() const {
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    if (l.weight.size() != l.in_dim * l.out_dim || l.bias.size() != l.out_dim)
      throw StructuralError("layer " + std::to_string(k) + ": storage does not match dimensions");
    if (k > 0 && layers[k - 1].out_dim != l.in_dim)
      throw StructuralError("layer " + std::to_string(k) + ": input dimension " +
                            std::to_string(l.in_dim) + " does not chain from " +
                            std::to_string(layers[k - 1].out_dim));
  }
}

MlpParams make_mlp(std::size_t input_dim, std::span<const std::size_t> hidden,
                   std::size_t output_dim, Rng& rng) {
  MlpParams p;
  std::size_t in = input_dim;
  auto add = [&](std::size_t out, Activation act) {
    DenseLayer l;
    l.in_dim = in;
    l.out_dim = out;
    l.activation = act;
    l.weight.resize(in * out);
    l.bias.assign(out, 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& w : l.weight) w = rng.uniform(-bound, bound);
    p.layers.push_back(std::move(l));
    in = out;
  };
  for (std::size_t h : hidden) add(h, Activation::Relu);
  add(output_dim, Activation::Identity);
  return p;
}

GradientSet GradientSet::zeros_like(const MlpParams& params) {
  GradientSet g;
  g.layers.reserve(params.layers.size());
  for (const auto& l : params.layers)
    g.layers.push_back({std::vector<double>(l.weight.size(), 0.0),
                        std::vector<double>(l.bias.size(), 0.0)});
  return g;
}

bool GradientSet::all_finite() const noexcept {
  return std::all_of(layers.begin(), layers.end(), [](const LayerGradient& l) {
    return finite_range(l.weight) && finite_range(l.bias);
  });
}

bool GradientSet::congruent_with(const MlpParams& params) const noexcept {
  if (layers.size() != params.layers.size()) return false;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (layers[k].weight.size() != params.layers[k].weight.size() ||
        layers[k].bias.size() != params.layers[k].bias.size())
      return false;
  }
  return true;
}

double GradientSet::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& l : layers) {
    for (double v : l.weight) m = std::max(m, std::abs(v));
    for (double v : l.bias) m = std::max(m, std::abs(v));
  }
  return m;
}

GradientSet& GradientSet::operator+=(const GradientSet& other) {
  if (other.layers.size() != layers.size())
    throw StructuralError("GradientSet::operator+=: layer count mismatch");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& a = layers[k];
    const auto& b = other.layers[k];
    if (a.weight.size() != b.weight.size() || a.bias.size() != b.bias.size())
      throw StructuralError("GradientSet::operator+=: layer shape mismatch");
    for (std::size_t i = 0; i < a.weight.size(); ++i) a.weight[i] += b.weight[i];
    for (std::size_t i = 0; i < a.bias.size(); ++i) a.bias[i] += b.bias[i];
  }
  return *this;
}

GradientSet& GradientSet::operator*=(double s) {
  for (auto& l : layers) {
    for (double& v : l.weight) v *= s;
    for (double& v : l.bias) v *= s;
  }
  return *this;
}

namespace {

void check_input(const MlpParams& params, const Matrix& input) {
  params.validate();
  if (params.layers.empty()) throw StructuralError("forward: network has no layers");
  if (input.cols() != params.input_dim())
    throw StructuralError("forward: input width " + std::to_string(input.cols()) +
                          " != network input dimension " + std::to_string(params.input_dim()));
  if (!finite_range(input.values())) throw ValidationError("forward: non-finite input");
}

void apply_layer(const DenseLayer& l, const Matrix& x, Matrix& y, Backend backend) {
  kernels::dense_forward(backend, l.weight, l.bias, x, y);
  if (l.activation == Activation::Relu) kernels::relu_inplace(backend, y);
}

}  // namespace

ForwardResult forward(const MlpParams& params, const Matrix& input, Backend backend) {
  check_input(params, input);
  ForwardResult r;
  auto& acts = r.trace.activations;
  acts.reserve(params.layers.size() + 1);
  acts.push_back(input);
  r.trace.dims.push_back(params.input_dim());
  for (const auto& l : params.layers) {
    Matrix y;
    apply_layer(l, acts.back(), y, backend);
    acts.push_back(std::move(y));
    r.trace.dims.push_back(l.out_dim);
  }
  r.output = acts.back();
  if (!finite_range(r.output.values())) throw ValidationError("forward: non-finite output");
  return r;
}

Matrix predict(const MlpParams& params, const Matrix& input, Backend backend) {
  check_input(params, input);
  Matrix cur = input;
  Matrix next;
  for (const auto& l : params.layers) {
    apply_layer(l, cur, next, backend);
    std::swap(cur, next);
  }
  if (!finite_range(cur.values())) throw ValidationError("predict: non-finite output");
  return cur;
}

std::vector<double> predict(const MlpParams& params, std::span<const double> input,
                            Backend backend) {
  return predict(params, Matrix::from_row(input), backend).values();
}

BackwardResult backward(const MlpParams& params, const ForwardTrace& trace,
                        const Matrix& output_grad, Backend backend, GradientMode mode) {
  const std::size_t n_layers = params.layers.size();
  if (trace.activations.size() != n_layers + 1 || trace.dims.size() != n_layers + 1)
    throw StructuralError("backward: trace does not match network depth");
  for (std::size_t k = 0; k < n_layers; ++k) {
    if (trace.dims[k] != params.layers[k].in_dim || trace.dims[k + 1] != params.layers[k].out_dim)
      throw StructuralError("backward: trace was produced by a different network shape");
  }
  const Matrix& out = trace.activations.back();
  if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols())
    throw StructuralError("backward: output gradient shape does not match forward output");

  BackwardResult r;
  if (mode == GradientMode::Full) r.params = GradientSet::zeros_like(params);

  Matrix grad = output_grad;
  Matrix grad_in;
  for (std::size_t k = n_layers; k-- > 0;) {
    const auto& l = params.layers[k];
    if (l.activation == Activation::Relu)
      kernels::relu_mask_inplace(backend, trace.activations[k + 1], grad);
    if (mode == GradientMode::Full)
      kernels::dense_backward_params(backend, trace.activations[k], grad, r.params.layers[k].weight,
                                     r.params.layers[k].bias);
    kernels::dense_backward_input(backend, l.weight, l.in_dim, grad, grad_in);
    std::swap(grad, grad_in);
  }
  r.input_grad = std::move(grad);
  return r;
}

}  // namespace lanesafe::nnet
