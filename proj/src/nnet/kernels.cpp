#include "lanesafe/nnet/kernels.hpp"

#include <algorithm>
#include <vector>

#include "lanesafe/error.hpp"

namespace lanesafe::nnet::kernels {

namespace serial {

void dense_forward(std::span<const double> weight, std::span<const double> bias, const Matrix& x,
                   Matrix& y) {
  const std::size_t in = x.cols();
  const std::size_t out = bias.size();
  y.assign(x.rows(), out);
  for (std::size_t b = 0; b < x.rows(); ++b) {
    for (std::size_t o = 0; o < out; ++o) {
      double acc = bias[o];
      for (std::size_t i = 0; i < in; ++i) acc += x(b, i) * weight[o * in + i];
      y(b, o) = acc;
    }
  }
}

void dense_backward_input(std::span<const double> weight, std::size_t in_dim, const Matrix& dy,
                          Matrix& dx) {
  const std::size_t out = dy.cols();
  dx.assign(dy.rows(), in_dim);
  for (std::size_t b = 0; b < dy.rows(); ++b) {
    for (std::size_t i = 0; i < in_dim; ++i) {
      double acc = 0.0;
      for (std::size_t o = 0; o < out; ++o) acc += dy(b, o) * weight[o * in_dim + i];
      dx(b, i) = acc;
    }
  }
}

void dense_backward_params(const Matrix& x, const Matrix& dy, std::span<double> dweight,
                           std::span<double> dbias) {
  const std::size_t in = x.cols();
  const std::size_t out = dy.cols();
  for (std::size_t o = 0; o < out; ++o) {
    double acc_b = 0.0;
    for (std::size_t b = 0; b < dy.rows(); ++b) acc_b += dy(b, o);
    dbias[o] = acc_b;
    for (std::size_t i = 0; i < in; ++i) {
      double acc = 0.0;
      for (std::size_t b = 0; b < dy.rows(); ++b) acc += dy(b, o) * x(b, i);
      dweight[o * in + i] = acc;
    }
  }
}

}  // namespace serial

namespace parallel {

// Each output element is owned by exactly one iteration of the parallel loop
// and accumulated in the same index order as the serial reference, so the
// result does not depend on the thread count.

namespace {

constexpr std::size_t kRowBlock = 4;
constexpr std::size_t kColBlock = 32;

/// c[r, n] = init[n] + sum_k a[r, k] * m[k, n] with k ascending; init may be null.
void blocked_product(const double* a, std::size_t rows, std::size_t inner, const double* m,
                     std::size_t cols, const double* init, double* c) {
  const auto row_blocks = static_cast<std::ptrdiff_t>((rows + kRowBlock - 1) / kRowBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t rb = 0; rb < row_blocks; ++rb) {
    const std::size_t r0 = static_cast<std::size_t>(rb) * kRowBlock;
    const std::size_t rn = std::min(kRowBlock, rows - r0);
    for (std::size_t n0 = 0; n0 < cols; n0 += kColBlock) {
      const std::size_t nn = std::min(kColBlock, cols - n0);
      alignas(64) double acc[kRowBlock][kColBlock];
      for (std::size_t r = 0; r < kRowBlock; ++r)
        for (std::size_t n = 0; n < kColBlock; ++n)
          acc[r][n] = (init && n < nn) ? init[n0 + n] : 0.0;
      if (rn == kRowBlock && nn == kColBlock) {
        for (std::size_t k = 0; k < inner; ++k) {
          const double* mr = m + k * cols + n0;
          for (std::size_t r = 0; r < kRowBlock; ++r) {
            const double av = a[(r0 + r) * inner + k];
#pragma omp simd
            for (std::size_t n = 0; n < kColBlock; ++n) acc[r][n] += av * mr[n];
          }
        }
      } else {
        for (std::size_t k = 0; k < inner; ++k) {
          const double* mr = m + k * cols + n0;
          for (std::size_t r = 0; r < rn; ++r) {
            const double av = a[(r0 + r) * inner + k];
            for (std::size_t n = 0; n < nn; ++n) acc[r][n] += av * mr[n];
          }
        }
      }
      for (std::size_t r = 0; r < rn; ++r)
        for (std::size_t n = 0; n < nn; ++n) c[(r0 + r) * cols + n0 + n] = acc[r][n];
    }
  }
}

std::vector<double> transpose(const double* src, std::size_t rows, std::size_t cols) {
  std::vector<double> t(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t[c * rows + r] = src[r * cols + c];
  return t;
}

}  // namespace

void dense_forward(std::span<const double> weight, std::span<const double> bias, const Matrix& x,
                   Matrix& y) {
  const std::size_t in = x.cols();
  const std::size_t out = bias.size();
  y.assign(x.rows(), out);
  const auto wt = transpose(weight.data(), out, in);
  blocked_product(x.data(), x.rows(), in, wt.data(), out, bias.data(), y.data());
}

void dense_backward_input(std::span<const double> weight, std::size_t in_dim, const Matrix& dy,
                          Matrix& dx) {
  dx.assign(dy.rows(), in_dim);
  blocked_product(dy.data(), dy.rows(), dy.cols(), weight.data(), in_dim, nullptr, dx.data());
}

void dense_backward_params(const Matrix& x, const Matrix& dy, std::span<double> dweight,
                           std::span<double> dbias) {
  const std::size_t out = dy.cols();
  const std::size_t rows = dy.rows();
  const auto dyt = transpose(dy.data(), rows, out);
  blocked_product(dyt.data(), out, rows, x.data(), x.cols(), nullptr, dweight.data());
  for (std::size_t o = 0; o < out; ++o) {
    double acc = 0.0;
    const double* g = dyt.data() + o * rows;
    for (std::size_t b = 0; b < rows; ++b) acc += g[b];
    dbias[o] = acc;
  }
}

}  // namespace parallel

void dense_forward(Backend backend, std::span<const double> weight, std::span<const double> bias,
                   const Matrix& x, Matrix& y) {
  if (weight.size() != bias.size() * x.cols())
    throw StructuralError("dense_forward: weight size does not match input width");
  if (backend == Backend::Serial)
    serial::dense_forward(weight, bias, x, y);
  else
    parallel::dense_forward(weight, bias, x, y);
}

void dense_backward_input(Backend backend, std::span<const double> weight, std::size_t in_dim,
                          const Matrix& dy, Matrix& dx) {
  if (weight.size() != in_dim * dy.cols())
    throw StructuralError("dense_backward_input: weight size does not match gradient width");
  if (backend == Backend::Serial)
    serial::dense_backward_input(weight, in_dim, dy, dx);
  else
    parallel::dense_backward_input(weight, in_dim, dy, dx);
}

void dense_backward_params(Backend backend, const Matrix& x, const Matrix& dy,
                           std::span<double> dweight, std::span<double> dbias) {
  if (x.rows() != dy.rows() || dweight.size() != x.cols() * dy.cols() ||
      dbias.size() != dy.cols())
    throw StructuralError("dense_backward_params: shape mismatch");
  if (backend == Backend::Serial)
    serial::dense_backward_params(x, dy, dweight, dbias);
  else
    parallel::dense_backward_params(x, dy, dweight, dbias);
}

void relu_inplace(Backend backend, Matrix& m) {
  double* v = m.data();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(m.rows() * m.cols());
  if (backend == Backend::Serial) {
    for (std::ptrdiff_t k = 0; k < n; ++k) v[k] = v[k] > 0.0 ? v[k] : 0.0;
    return;
  }
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) v[k] = v[k] > 0.0 ? v[k] : 0.0;
}

void relu_mask_inplace(Backend backend, const Matrix& activation, Matrix& dy) {
  if (activation.rows() != dy.rows() || activation.cols() != dy.cols())
    throw StructuralError("relu_mask_inplace: shape mismatch");
  const double* a = activation.data();
  double* g = dy.data();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(dy.rows() * dy.cols());
  if (backend == Backend::Serial) {
    for (std::ptrdiff_t k = 0; k < n; ++k)
      if (!(a[k] > 0.0)) g[k] = 0.0;
    return;
  }
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) g[k] = a[k] > 0.0 ? g[k] : 0.0;
}

}  // namespace lanesafe::nnet::kernels
