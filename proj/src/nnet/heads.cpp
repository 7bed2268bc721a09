#include "lanesafe/nnet/heads.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lanesafe/error.hpp"

namespace lanesafe::nnet {

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // 0.5 * ln(2 pi)
// Largest |tanh| used for an emitted action, so the action stays strictly
// inside the bounds even when tanh rounds to 1.
constexpr double kMaxSquash = 1.0 - 1e-12;

}  // namespace

void ActionBounds::validate() const {
  if (!std::isfinite(low) || !std::isfinite(high) || !(low < high))
    throw ValidationError("action bounds must be finite with low < high");
}

double clamp_log_std(double raw) noexcept { return std::clamp(raw, kLogStdMin, kLogStdMax); }

GaussianHead GaussianHead::from_raw(double mean, double raw_log_std) noexcept {
  return {mean, clamp_log_std(raw_log_std)};
}

double GaussianHead::stddev() const noexcept { return std::exp(log_std); }

double log_one_minus_tanh_sq(double u) noexcept {
  const double a = std::abs(u);
  return 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
}

SquashedSample gaussian_sample_squashed(const GaussianHead& head, double noise,
                                        const ActionBounds& bounds) {
  bounds.validate();
  if (!std::isfinite(head.mean) || !std::isfinite(head.log_std) || !std::isfinite(noise))
    throw ValidationError("gaussian_sample_squashed: non-finite input");
  SquashedSample s;
  s.pre_squash = head.mean + head.stddev() * noise;
  s.squashed = std::tanh(s.pre_squash);
  const double y = std::clamp(s.squashed, -kMaxSquash, kMaxSquash);
  s.action = bounds.midpoint() + bounds.half_range() * y;
  s.log_prob = -0.5 * noise * noise - head.log_std - kHalfLogTwoPi -
               log_one_minus_tanh_sq(s.pre_squash) - std::log(bounds.half_range());
  return s;
}

double gaussian_deterministic(const GaussianHead& head, const ActionBounds& bounds) noexcept {
  const double y = std::clamp(std::tanh(head.mean), -kMaxSquash, kMaxSquash);
  return bounds.midpoint() + bounds.half_range() * y;
}

double squashed_log_prob(const GaussianHead& head, double action, const ActionBounds& bounds) {
  bounds.validate();
  if (!std::isfinite(action)) throw ValidationError("squashed_log_prob: non-finite action");
  const double y = (action - bounds.midpoint()) / bounds.half_range();
  if (!(std::abs(y) < 1.0))
    throw ValidationError("squashed_log_prob: action on or outside the bounds");
  const double u = std::atanh(y);
  const double z = (u - head.mean) / head.stddev();
  return -0.5 * z * z - head.log_std - kHalfLogTwoPi - log_one_minus_tanh_sq(u) -
         std::log(bounds.half_range());
}

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) throw ValidationError("log_softmax: empty logits");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - mx);
  const double lse = mx + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw ValidationError("softmax: empty logits");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

double categorical_entropy(std::span<const double> logits) {
  const auto lp = log_softmax(logits);
  double h = 0.0;
  for (double l : lp) h -= std::exp(l) * l;
  return h;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(
      std::distance(values.begin(), std::max_element(values.begin(), values.end())));
}

CategoricalSample categorical_sample(std::span<const double> logits, double uniform) {
  for (double l : logits)
    if (!std::isfinite(l)) throw ValidationError("categorical_sample: non-finite logit");
  const auto p = softmax(logits);
  const auto lp = log_softmax(logits);
  double cdf = 0.0;
  std::size_t idx = p.size() - 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cdf += p[i];
    if (uniform < cdf) {
      idx = i;
      break;
    }
  }
  return {idx, lp[idx]};
}

}  // namespace lanesafe::nnet
