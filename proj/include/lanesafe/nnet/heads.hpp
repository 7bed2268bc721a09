#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lanesafe::nnet {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Closed interval an action is squashed into.
struct ActionBounds {
  double low = -1.0;
  double high = 1.0;

  double midpoint() const noexcept { return 0.5 * (high + low); }
  double half_range() const noexcept { return 0.5 * (high - low); }
  /// Throws ValidationError unless both ends are finite and low < high.
  void validate() const;
};

/// One-dimensional Gaussian policy head. `log_std` is clamped on construction.
struct GaussianHead {
  double mean = 0.0;
  double log_std = 0.0;

  static GaussianHead from_raw(double mean, double raw_log_std) noexcept;
  double stddev() const noexcept;
};

double clamp_log_std(double raw) noexcept;

/// log(1 - tanh(u)^2), stable for large |u|.
double log_one_minus_tanh_sq(double u) noexcept;

struct SquashedSample {
  double action = 0.0;      // in (low, high)
  double log_prob = 0.0;    // density of `action` after tanh and affine rescale
  double pre_squash = 0.0;  // mean + std * noise
  double squashed = 0.0;    // tanh(pre_squash)
};

/// action = mid + half * tanh(mean + std * noise), with the change-of-variables
/// correction applied to the Gaussian log-density.
SquashedSample gaussian_sample_squashed(const GaussianHead& head, double noise,
                                        const ActionBounds& bounds);

/// The squashed-Gaussian mean action, mid + half * tanh(mean).
double gaussian_deterministic(const GaussianHead& head, const ActionBounds& bounds) noexcept;

/// Log-density of `action` under the squashed head. Throws ValidationError for
/// actions on or outside the bounds, where the density is undefined.
double squashed_log_prob(const GaussianHead& head, double action, const ActionBounds& bounds);

/// Numerically stable softmax (max-subtracted).
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);
double categorical_entropy(std::span<const double> logits);
std::size_t argmax(std::span<const double> values);

struct CategoricalSample {
  std::size_t index = 0;
  double log_prob = 0.0;
};

/// Inverse-CDF draw over softmax(logits) using one uniform in [0, 1).
CategoricalSample categorical_sample(std::span<const double> logits, double uniform);

}  // namespace lanesafe::nnet
