#include "gapflow/rl/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace gapflow::rl {

Batch Batch::from(const std::vector<const Transition*>& items) {
  Batch b;
  if (items.empty()) return b;
  const auto n = static_cast<Eigen::Index>(items.size());
  const auto sd = items.front()->state.size();
  const auto ad = items.front()->action.size();
  b.states.resize(sd, n);
  b.actions.resize(ad, n);
  b.next_states.resize(sd, n);
  b.rewards.resize(n);
  b.done.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = *items[static_cast<std::size_t>(i)];
    b.states.col(i) = t.state;
    b.actions.col(i) = t.action;
    b.next_states.col(i) = t.next_state;
    b.rewards(i) = t.reward;
    b.done(i) = t.done ? 1.0 : 0.0;
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  slots_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
      t.action.size() != action_dim_) {
    throw std::invalid_argument("transition dimension mismatch");
  }
  if (!contents_present_) {
    cursor_ = 0;
    count_ = 0;
    contents_present_ = true;
  }
  if (slots_.size() < capacity_) {
    slots_.push_back(std::move(t));
  } else {
    slots_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
  count_ = std::min(count_ + 1, capacity_);
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n,
                                                      std::mt19937_64& rng) const {
  if (!contents_present_ || count_ < n || count_ == 0) throw std::runtime_error("insufficient samples");
  std::uniform_int_distribution<std::size_t> pick(0, count_ - 1);
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = pick(rng);
  return out;
}

Batch ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  std::vector<const Transition*> items;
  items.reserve(n);
  for (const auto i : sample_indices(n, rng)) items.push_back(&slots_[i]);
  return Batch::from(items);
}

void ReplayBuffer::restore(std::size_t cursor, std::size_t count, std::vector<Transition> slots) {
  if (count > capacity_ || cursor >= capacity_ || slots.size() > capacity_) {
    throw std::invalid_argument("replay metadata out of range");
  }
  for (const auto& t : slots) {
    if (t.state.size() != state_dim_ || t.action.size() != action_dim_) {
      throw std::invalid_argument("transition dimension mismatch");
    }
  }
  if (slots.size() != count) throw std::invalid_argument("replay slot count mismatch");
  cursor_ = cursor;
  count_ = count;
  slots_ = std::move(slots);
  contents_present_ = true;
}

void ReplayBuffer::restore_metadata(std::size_t cursor, std::size_t count) {
  if (count > capacity_ || cursor >= capacity_) {
    throw std::invalid_argument("replay metadata out of range");
  }
  cursor_ = cursor;
  count_ = count;
  slots_.clear();
  contents_present_ = count == 0;
}

}  // namespace gapflow::rl
