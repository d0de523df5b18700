#include "l2b/replay.hpp"

#include <algorithm>
#include <stdexcept>

#include "l2b/features.hpp"

namespace l2b::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be > 0");
}

void ReplayBuffer::push(Transition transition) {
  ++pushed_;
  if (items_.size() < capacity_) {
    items_.push_back(std::move(transition));
    return;
  }
  items_[head_] = std::move(transition);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("replay index out of range");
  return items_[(head_ + i) % items_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  const std::size_t n = items_.size();
  const std::size_t k = std::min(batch, n);
  // Floyd's algorithm: k distinct indices in O(k).
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    const std::size_t t = rng.uniform_index(j + 1);
    const bool seen = std::find(chosen.begin(), chosen.end(), t) != chosen.end();
    chosen.push_back(seen ? j : t);
  }
  std::vector<const Transition*> out;
  out.reserve(k);
  for (const std::size_t i : chosen) out.push_back(&items_[i]);
  return out;
}

double td_target(const Transition& transition, const nn::NetParams& target, double discount) {
  const Transition* p = &transition;
  return td_targets(std::span<const Transition* const>(&p, 1), target, discount)[0];
}

std::vector<double> td_targets(std::span<const Transition* const> batch, const nn::NetParams& target,
                               double discount) {
  std::vector<double> out(batch.size());
  nn::FeatureBatch next;
  std::vector<std::size_t> bootstrapped;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out[i] = batch[i]->reward;
    if (!batch[i]->terminal) {
      next.add(nn::rotate(batch[i]->next_state));
      bootstrapped.push_back(i);
    }
  }
  if (!bootstrapped.empty()) {
    const Eigen::VectorXd v = nn::forward(target, next);
    for (std::size_t j = 0; j < bootstrapped.size(); ++j) {
      out[bootstrapped[j]] += discount * v[static_cast<Eigen::Index>(j)];
    }
  }
  return out;
}

}  // namespace l2b::rl
