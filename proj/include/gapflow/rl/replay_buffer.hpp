#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "gapflow/rl/dense_net.hpp"

namespace gapflow::rl {

struct Transition {
  Vector state;
  Vector action;  // normalized, in [-1, 1]
  double reward = 0.0;
  Vector next_state;
  bool done = false;
};

/// Column-stacked minibatch.
struct Batch {
  Matrix states;
  Matrix actions;
  Vector rewards;
  Matrix next_states;
  Vector done;  // 1.0 where the episode ended

  std::size_t size() const { return static_cast<std::size_t>(rewards.size()); }
  static Batch from(const std::vector<const Transition*>& items);
};

/// Fixed-capacity ring buffer; the oldest transition is overwritten first.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

  /// Throws std::invalid_argument on dimension mismatch.
  void push(Transition t);

  /// Uniform sampling with replacement. Throws std::runtime_error
  /// ("insufficient samples") when size() < n.
  Batch sample(std::size_t n, std::mt19937_64& rng) const;
  std::vector<std::size_t> sample_indices(std::size_t n, std::mt19937_64& rng) const;

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return count_; }
  std::size_t cursor() const { return cursor_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const Transition& at(std::size_t slot) const { return slots_.at(slot); }

  /// Restores ring metadata and slot contents (checkpoint loading).
  void restore(std::size_t cursor, std::size_t count, std::vector<Transition> slots);
  /// Restores ring metadata only. The buffer then reports the saved cursor
  /// and count but holds no samples; the next push starts a fresh ring.
  void restore_metadata(std::size_t cursor, std::size_t count);
  bool has_contents() const { return contents_present_; }

 private:
  std::size_t capacity_;
  int state_dim_;
  int action_dim_;
  std::size_t cursor_ = 0;
  std::size_t count_ = 0;
  bool contents_present_ = true;
  std::vector<Transition> slots_;
};

}  // namespace gapflow::rl
