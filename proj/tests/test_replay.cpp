#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "l2b/replay.hpp"

using namespace l2b;
using namespace l2b::rl;

namespace {

Transition tagged(double tag, bool terminal = false) {
  Transition t;
  t.reward = tag;
  t.terminal = terminal;
  t.state.robot.goal = {4, 0};
  t.next_state.robot.goal = {4, 0};
  return t;
}

// All weights zero and the output bias one: V is exactly 1 everywhere.
nn::NetParams unit_value_net() {
  nn::NetParams p(nn::NetConfig{});
  p.values().setZero();
  const auto& last = p.tensors().back();
  p.values()[last.offset] = 1.0;
  return p;
}

}  // namespace

TEST(Replay, EvictsInFifoOrder) {
  ReplayBuffer buf(5);
  for (int i = 0; i < 8; ++i) buf.push(tagged(i));
  EXPECT_EQ(buf.size(), 5u);
  EXPECT_EQ(buf.total_pushed(), 8u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(buf.at(i).reward, 3.0 + i);
  EXPECT_THROW(buf.at(5), std::out_of_range);
}

TEST(Replay, SamplesWithoutReplacementFromStoredItems) {
  ReplayBuffer buf(50);
  for (int i = 0; i < 80; ++i) buf.push(tagged(i));
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto batch = buf.sample(20, rng);
    ASSERT_EQ(batch.size(), 20u);
    std::set<double> seen;
    for (const Transition* t : batch) {
      ASSERT_GE(t->reward, 30.0);
      ASSERT_LT(t->reward, 80.0);
      seen.insert(t->reward);
    }
    ASSERT_EQ(seen.size(), 20u);
  }
  EXPECT_EQ(buf.sample(500, rng).size(), 50u);
}

TEST(Replay, SamplingCoversBufferUniformly) {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push(tagged(i));
  Rng rng(4);
  std::vector<int> counts(10, 0);
  for (int trial = 0; trial < 5000; ++trial) {
    for (const Transition* t : buf.sample(3, rng)) ++counts[static_cast<int>(t->reward)];
  }
  for (const int c : counts) EXPECT_NEAR(c, 1500, 150);
}

TEST(TdTarget, TerminalCollisionHasNoBootstrap) {
  EXPECT_EQ(td_target(tagged(-0.25, true), unit_value_net(), 0.974), -0.25);
}

TEST(TdTarget, DiscountArithmetic) {
  const double discount = std::pow(0.9, 0.25 * 1.0);
  EXPECT_NEAR(td_target(tagged(0.0), unit_value_net(), discount), 0.97400, 1e-5);
  EXPECT_NEAR(td_target(tagged(0.0), unit_value_net(), discount), 0.9740037464252967, 1e-9);
  EXPECT_EQ(td_target(tagged(0.3), unit_value_net(), 0.0), 0.3);
}

TEST(TdTarget, BatchMatchesSingle) {
  const nn::NetParams target = nn::NetParams::initialize(nn::NetConfig{}, 5);
  std::vector<Transition> ts;
  for (int i = 0; i < 6; ++i) {
    Transition t = tagged(0.1 * i, i % 3 == 0);
    env::ObservedPedestrian p;
    p.position = {1.0 + i, 0.5};
    p.distance = norm(p.position);
    t.next_state.pedestrians.push_back(p);
    ts.push_back(t);
  }
  std::vector<const Transition*> ptrs;
  for (const auto& t : ts) ptrs.push_back(&t);
  const auto batch = td_targets(ptrs, target, 0.974);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_NEAR(batch[i], td_target(ts[i], target, 0.974), 1e-12);
  }
}
