#include "lanesafe/pasac/replay_buffer.hpp"

#include <cmath>
#include <string>

#include "lanesafe/error.hpp"

namespace lanesafe::pasac {

namespace {

void validate_transition(const Transition& t, std::size_t state_dim) {
  if (t.state.size() != state_dim || t.next_state.size() != state_dim)
    throw StructuralError("transition state dimension " + std::to_string(t.state.size()) +
                          " != buffer state dimension " + std::to_string(state_dim));
  for (double v : t.state)
    if (!std::isfinite(v)) throw ValidationError("transition: non-finite state");
  for (double v : t.next_state)
    if (!std::isfinite(v)) throw ValidationError("transition: non-finite next state");
  if (!std::isfinite(t.reward)) throw ValidationError("transition: non-finite reward");
  if (!std::isfinite(t.cost) || t.cost < 0.0)
    throw ValidationError("transition: cost must be finite and non-negative");
  if (!std::isfinite(t.action.acceleration))
    throw ValidationError("transition: non-finite acceleration");
  if (t.action.lane_change < 0) throw ValidationError("transition: negative discrete action");
}

}  // namespace

Batch make_batch(std::span<const Transition> transitions) {
  Batch b;
  if (transitions.empty()) return b;
  const std::size_t dim = transitions.front().state.size();
  const std::size_t n = transitions.size();
  b.states.assign(n, dim);
  b.next_states.assign(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = transitions[i];
    validate_transition(t, dim);
    std::copy(t.state.begin(), t.state.end(), b.states.row(i).begin());
    std::copy(t.next_state.begin(), t.next_state.end(), b.next_states.row(i).begin());
    b.accelerations.push_back(t.action.acceleration);
    b.discrete.push_back(t.action.lane_change);
    b.rewards.push_back(t.reward);
    b.costs.push_back(t.cost);
    b.dones.push_back(t.done ? 1 : 0);
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t state_dim)
    : capacity_(capacity), state_dim_(state_dim) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
  if (state_dim == 0) throw ConfigError("replay buffer state dimension must be positive");
}

void ReplayBuffer::add(const Transition& t) {
  validate_transition(t, state_dim_);
  if (size_ < capacity_) {
    states_.insert(states_.end(), t.state.begin(), t.state.end());
    next_states_.insert(next_states_.end(), t.next_state.begin(), t.next_state.end());
    accelerations_.push_back(t.action.acceleration);
    discrete_.push_back(t.action.lane_change);
    rewards_.push_back(t.reward);
    costs_.push_back(t.cost);
    dones_.push_back(t.done ? 1 : 0);
    ++size_;
  } else {
    const std::size_t k = cursor_;
    std::copy(t.state.begin(), t.state.end(), states_.begin() + k * state_dim_);
    std::copy(t.next_state.begin(), t.next_state.end(), next_states_.begin() + k * state_dim_);
    accelerations_[k] = t.action.acceleration;
    discrete_[k] = t.action.lane_change;
    rewards_[k] = t.reward;
    costs_[k] = t.cost;
    dones_[k] = t.done ? 1 : 0;
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

Transition ReplayBuffer::at(std::size_t index) const {
  if (index >= size_) throw ContractError("replay buffer index out of range");
  Transition t;
  t.state.assign(states_.begin() + index * state_dim_, states_.begin() + (index + 1) * state_dim_);
  t.next_state.assign(next_states_.begin() + index * state_dim_,
                      next_states_.begin() + (index + 1) * state_dim_);
  t.action.acceleration = accelerations_[index];
  t.action.lane_change = discrete_[index];
  t.reward = rewards_[index];
  t.cost = costs_[index];
  t.done = dones_[index] != 0;
  return t;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0 || size_ < batch_size)
    throw ContractError("replay buffer holds " + std::to_string(size_) +
                        " transitions, cannot sample a batch of " + std::to_string(batch_size));
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = rng.index(size_);
  return idx;
}

Batch ReplayBuffer::gather(std::span<const std::size_t> indices) const {
  Batch b;
  const std::size_t n = indices.size();
  b.states.assign(n, state_dim_);
  b.next_states.assign(n, state_dim_);
  b.accelerations.resize(n);
  b.discrete.resize(n);
  b.rewards.resize(n);
  b.costs.resize(n);
  b.dones.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t k = indices[r];
    if (k >= size_) throw ContractError("replay buffer index out of range");
    std::copy_n(states_.begin() + k * state_dim_, state_dim_, b.states.row(r).begin());
    std::copy_n(next_states_.begin() + k * state_dim_, state_dim_, b.next_states.row(r).begin());
    b.accelerations[r] = accelerations_[k];
    b.discrete[r] = discrete_[k];
    b.rewards[r] = rewards_[k];
    b.costs[r] = costs_[k];
    b.dones[r] = dones_[k];
  }
  return b;
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  const auto idx = sample_indices(batch_size, rng);
  return gather(idx);
}

}  // namespace lanesafe::pasac
