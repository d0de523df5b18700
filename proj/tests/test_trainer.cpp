#include <gtest/gtest.h>

#include <cmath>

#include "l2b/errors.hpp"
#include "l2b/features.hpp"
#include "l2b/trainer.hpp"

using namespace l2b;
using namespace l2b::rl;

namespace {

TrainConfig tiny_train() {
  TrainConfig t;
  t.imitation_episodes = 4;
  t.imitation_epochs = 3;
  t.rl_episodes = 6;
  t.batch_size = 16;
  t.train_batches = 2;
  t.target_sync_interval = 3;
  t.checkpoint_interval = 2;
  t.net.embedding = {16, 8};
  t.net.pairwise = {8, 6};
  t.net.attention = {8};
  t.net.value = {12, 8};
  return t;
}

env::EnvConfig small_env() {
  env::EnvConfig c;
  c.N = 3;
  return c;
}

}  // namespace

TEST(Returns, DiscountedFromTheEnd) {
  const double g = std::pow(0.9, 0.25);
  const std::vector<double> r{0.0, 1.0};
  const auto labels = discounted_returns(r, g);
  EXPECT_NEAR(labels[0], 0.974, 1e-3);
  EXPECT_EQ(labels[1], 1.0);
  const std::vector<double> r3{-0.05, 0.0, -0.25};
  const auto l3 = discounted_returns(r3, 0.5);
  EXPECT_EQ(l3[2], -0.25);
  EXPECT_NEAR(l3[0], -0.05 + 0.25 * -0.25, 1e-15);
}

TEST(Curriculum, StagesOnlyTheTargetRegime) {
  TrainConfig t;
  EXPECT_EQ(curriculum_N(t, 20, 0), 10);
  EXPECT_EQ(curriculum_N(t, 20, 9999), 10);
  EXPECT_EQ(curriculum_N(t, 20, 10000), 20);
  EXPECT_EQ(curriculum_N(t, 20, 19999), 20);
  EXPECT_EQ(curriculum_N(t, 5, 0), 5);
  EXPECT_EQ(curriculum_N(t, 15, 0), 15);
}

TEST(TrainConfigCheck, RejectsBadValues) {
  TrainConfig t;
  t.gamma = 1.0;
  EXPECT_THROW(validate(t), ConfigError);
  t = {};
  t.epsilon_start = 1.5;
  EXPECT_THROW(validate(t), ConfigError);
  t = {};
  t.batch_size = 0;
  EXPECT_THROW(validate(t), ConfigError);
}

TEST(Imitation, DemonstrationsAreLabeledWithReturns) {
  const TrainConfig t = tiny_train();
  const auto demos = collect_demonstrations(small_env(), t, 1);
  ASSERT_FALSE(demos.labeled.empty());
  ASSERT_EQ(demos.labeled.size(), demos.transitions.size());
  EXPECT_TRUE(demos.transitions.back().terminal);
  for (const auto& d : demos.labeled) {
    EXPECT_TRUE(std::isfinite(d.label));
    EXPECT_LE(d.label, 1.0);
    EXPECT_GE(d.label, -1.0);
  }
}

TEST(Train, ZeroEpisodesReturnsBootstrap) {
  TrainConfig t = tiny_train();
  t.rl_episodes = 0;
  const auto result = train(small_env(), t, env::Mode::l2b, 5);
  const auto boot = imitation_bootstrap(small_env(), t, 5, nn::NetParams::initialize(t.net, derive_seed(5, "init")));
  EXPECT_EQ(result.params.values(), boot.values());
  EXPECT_TRUE(result.log.empty());
}

TEST(Train, IdenticalSeedsGiveIdenticalLogs) {
  const TrainConfig t = tiny_train();
  const auto a = train(small_env(), t, env::Mode::l2b, 11);
  const auto b = train(small_env(), t, env::Mode::l2b, 11);
  ASSERT_EQ(a.log.size(), 6u);
  for (std::size_t i = 0; i < a.log.size(); ++i) EXPECT_EQ(to_json(a.log[i]), to_json(b.log[i]));
  EXPECT_EQ(a.params.values(), b.params.values());
  const auto c = train(small_env(), t, env::Mode::l2b, 12);
  EXPECT_NE(a.params.values(), c.params.values());
}

TEST(Train, LogRecordsFollowTheSchedule) {
  TrainConfig t = tiny_train();
  t.epsilon_decay_episodes = 4;
  const auto r = train(small_env(), t, env::Mode::sarl, 2);
  for (const auto& rec : r.log) {
    EXPECT_EQ(rec.epsilon, epsilon_at(0.5, 0.1, 4, rec.episode));
    EXPECT_EQ(rec.beep_count, 0);  // sarl cannot beep
    EXPECT_NE(rec.outcome, env::Terminal::none);
    EXPECT_GT(rec.steps, 0);
  }
  EXPECT_EQ(r.updates, r.log.back().updates);
}

TEST(Train, CheckpointsAtIntervalsAndResumes) {
  const TrainConfig t = tiny_train();
  std::vector<nn::Checkpoint> cks;
  TrainHooks hooks;
  hooks.on_checkpoint = [&](const nn::Checkpoint& ck) { cks.push_back(ck); };
  const auto full = train(small_env(), t, env::Mode::l2b, 3, hooks);
  ASSERT_EQ(cks.size(), 4u);  // bootstrap, 2, 4, 6
  EXPECT_EQ(cks[0].meta.episode, 0u);
  EXPECT_EQ(cks[3].meta.episode, 6u);
  EXPECT_EQ(cks[3].params.values(), full.params.values());

  // Resuming from the bootstrap reproduces the whole run.
  const auto again = train(small_env(), t, env::Mode::l2b, 3, {}, cks[0]);
  EXPECT_EQ(again.params.values(), full.params.values());

  // Resuming mid-run continues from the stored episode.
  const auto tail = train(small_env(), t, env::Mode::l2b, 3, {}, cks[2]);
  ASSERT_EQ(tail.log.size(), 2u);
  EXPECT_EQ(tail.log.front().episode, 4u);
}

TEST(Train, NonFiniteLossAborts) {
  const TrainConfig t = tiny_train();
  nn::Checkpoint ck{nn::NetParams::initialize(t.net, 1), {0, 0}};
  ck.params.values()[ck.params.tensors().back().offset] = std::nan("");
  EXPECT_THROW(train(small_env(), t, env::Mode::l2b, 1, {}, ck), TrainingDiverged);
}

TEST(Train, ParallelWorkersAreReproducible) {
  TrainConfig t = tiny_train();
  t.workers = 3;
  const auto a = train(small_env(), t, env::Mode::l2b, 4);
  const auto b = train(small_env(), t, env::Mode::l2b, 4);
  ASSERT_EQ(a.log.size(), 6u);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].episode, i);
    EXPECT_EQ(to_json(a.log[i]), to_json(b.log[i]));
  }
}

TEST(Imitation, BootstrapRanksGoalAboveCollision) {
  TrainConfig t;
  t.imitation_episodes = 200;
  t.imitation_epochs = 10;
  env::EnvConfig c;
  const nn::NetParams params =
      imitation_bootstrap(c, t, 21, nn::NetParams::initialize(t.net, derive_seed(21, "init")));

  // Held-out states: the robot one step from its goal versus the same
  // situation with a pedestrian closing in at 2 cm clearance.
  env::CrowdEnv env(c);
  int wins = 0, pairs = 0;
  for (std::uint64_t seed = 10000; pairs < 100; ++seed) {
    env.reset(seed);
    env::JointState s = env.observe();
    const Vec2 dir = normalize(s.robot.goal - s.robot.position);
    env::JointState good = s;
    good.robot.position = s.robot.goal - 0.4 * dir;
    good.robot.velocity = dir;
    for (auto& p : good.pedestrians) p.distance = norm(p.position - good.robot.position);
    env::JointState bad = s;
    bad.robot.velocity = dir;
    env::ObservedPedestrian threat;
    threat.position = s.robot.position + 0.62 * dir;
    threat.velocity = -dir;
    threat.distance = 0.62;
    bad.pedestrians.insert(bad.pedestrians.begin(), threat);
    bad.pedestrians.pop_back();
    const double vg = nn::forward(params, nn::rotate(good));
    const double vb = nn::forward(params, nn::rotate(bad));
    wins += vg > vb ? 1 : 0;
    ++pairs;
  }
  EXPECT_GE(wins, 90);
}
