#pragma once

#include <cstddef>
#include <deque>

namespace lanesafe::safelag {

/// Estimates J_C as the mean of the last `window` completed-episode cost
/// totals (undiscounted).
class CostEstimator {
 public:
  explicit CostEstimator(std::size_t window = 10);

  /// Adds one step's cost to the running episode. Throws ValidationError for
  /// negative or non-finite costs.
  void accumulate_step_cost(double step_cost);

  /// Pushes the current episode total into the window, resets the
  /// accumulator and returns the new estimate.
  double finish_episode();

  double current_episode_total() const noexcept { return current_; }
  double estimate() const noexcept;
  std::size_t window() const noexcept { return window_; }
  std::size_t count() const noexcept { return totals_.size(); }
  const std::deque<double>& totals() const noexcept { return totals_; }

 private:
  std::size_t window_;
  std::deque<double> totals_;
  double current_ = 0.0;
};

}  // namespace lanesafe::safelag
