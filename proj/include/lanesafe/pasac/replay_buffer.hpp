#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lanesafe/nnet/matrix.hpp"
#include "lanesafe/pasac/types.hpp"
#include "lanesafe/rng.hpp"

namespace lanesafe::pasac {

/// Column-wise view of a sampled minibatch.
struct Batch {
  nnet::Matrix states;
  nnet::Matrix next_states;
  std::vector<double> accelerations;
  std::vector<int> discrete;
  std::vector<double> rewards;
  std::vector<double> costs;
  std::vector<std::uint8_t> dones;

  std::size_t size() const noexcept { return rewards.size(); }
};

/// Build a batch directly from transitions (tests and stubs).
Batch make_batch(std::span<const Transition> transitions);

/// Fixed-capacity ring of transitions with uniform sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t state_dim);

  /// Validates dimensions, finiteness and cost >= 0, then inserts, overwriting
  /// the oldest record once full.
  void add(const Transition& t);

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t state_dim() const noexcept { return state_dim_; }

  Transition at(std::size_t index) const;

  /// Indices drawn uniformly with replacement. Throws ContractError when
  /// fewer than `batch_size` transitions are stored.
  std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;
  Batch gather(std::span<const std::size_t> indices) const;
  Batch sample(std::size_t batch_size, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t state_dim_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  std::vector<double> states_;
  std::vector<double> next_states_;
  std::vector<double> accelerations_;
  std::vector<int> discrete_;
  std::vector<double> rewards_;
  std::vector<double> costs_;
  std::vector<std::uint8_t> dones_;
};

}  // namespace lanesafe::pasac
