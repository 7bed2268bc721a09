#include "lanesafe/safelag/cost_estimator.hpp"

#include <cmath>

#include "lanesafe/error.hpp"

namespace lanesafe::safelag {

CostEstimator::CostEstimator(std::size_t window) : window_(window) {
  if (window == 0) throw ConfigError("cost estimator window must be positive");
}

void CostEstimator::accumulate_step_cost(double step_cost) {
  if (!std::isfinite(step_cost) || step_cost < 0.0)
    throw ValidationError("step cost must be finite and non-negative");
  current_ += step_cost;
}

double CostEstimator::finish_episode() {
  totals_.push_back(current_);
  if (totals_.size() > window_) totals_.pop_front();
  current_ = 0.0;
  return estimate();
}

double CostEstimator::estimate() const noexcept {
  if (totals_.empty()) return 0.0;
  double sum = 0.0;
  for (double t : totals_) sum += t;
  return sum / static_cast<double>(totals_.size());
}

}  // namespace lanesafe::safelag
