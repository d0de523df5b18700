#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "l2b/env.hpp"
#include "l2b/rng.hpp"
#include "l2b/value_net.hpp"

namespace l2b::rl {

struct Transition {
  env::JointState state;
  env::Action action;
  double reward = 0.0;
  env::JointState next_state;
  /// Terminal transitions are never bootstrapped.
  bool terminal = false;
};

/// Fixed-capacity FIFO of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition transition);

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_pushed() const { return pushed_; }

  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const;

  /// min(batch, size()) distinct transitions, chosen uniformly.
  std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // index of the oldest item once full
  std::uint64_t pushed_ = 0;
};

/// r if terminal, else r + discount * V_target(next_state).
double td_target(const Transition& transition, const nn::NetParams& target, double discount);

/// Batched td_target.
std::vector<double> td_targets(std::span<const Transition* const> batch, const nn::NetParams& target,
                               double discount);

}  // namespace l2b::rl
