#pragma once

#include <vector>

#include "lanesafe/nnet/heads.hpp"

namespace lanesafe::pasac {

/// Longitudinal acceleration limits of the ego vehicle, m/s^2.
inline constexpr nnet::ActionBounds kAccelerationBounds{-9.8, 5.0};

/// Continuous acceleration plus the index of the discrete action
/// (0 keeps the lane, 1 changes lane).
struct HybridAction {
  double acceleration = 0.0;
  int lane_change = 0;
  double log_prob_continuous = 0.0;
  double log_prob_discrete = 0.0;
};

enum class ActionMode { Stochastic, Deterministic };

struct Transition {
  std::vector<double> state;
  HybridAction action;
  double reward = 0.0;
  double cost = 0.0;
  std::vector<double> next_state;
  bool done = false;  // true terminal; time-limit truncation stays false
};

}  // namespace lanesafe::pasac
