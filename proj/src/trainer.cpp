#include "l2b/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "l2b/errors.hpp"
#include "l2b/features.hpp"
#include "l2b/replay.hpp"
#include "l2b/rng.hpp"

namespace l2b::rl {
namespace {

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ConfigError(std::string("train.") + field + ": " + why);
}

struct Rollout {
  std::vector<Transition> transitions;
  env::Terminal outcome = env::Terminal::none;
  int steps = 0;
  int beeps = 0;
  double ret = 0.0;
};

Rollout roll_out(const nn::NetParams& params, const env::EnvConfig& config,
                 std::span<const env::Action> actions, double discount, double epsilon,
                 std::uint64_t env_seed, std::uint64_t epsilon_seed) {
  env::CrowdEnv env(config);
  env.reset(env_seed);
  Rng rng(epsilon_seed);
  const ValueFn value = net_value(params);

  Rollout out;
  double weight = 1.0;
  while (!env.done()) {
    env::JointState state = env.observe();
    const env::Action greedy = actions[lookahead_index(value, state, actions, config, discount)];
    const env::Action action = epsilon_greedy(greedy, epsilon, actions, rng);
    env::StepOutcome step = env.step(action);
    out.ret += weight * step.reward;
    weight *= discount;
    out.beeps += action.beep ? 1 : 0;
    const bool terminal = step.terminal != env::Terminal::none;
    out.transitions.push_back(
        {std::move(state), action, step.reward, std::move(step.next_state), terminal});
  }
  out.outcome = env.terminal();
  out.steps = env.steps();
  return out;
}

// One minibatch of TD regression; returns the loss before the update.
double optimize_batch(nn::NetParams& params, const nn::NetParams& target, const ReplayBuffer& buffer,
                      std::size_t batch_size, double discount, double lr, Rng& rng) {
  const auto batch = buffer.sample(batch_size, rng);
  const std::vector<double> targets = td_targets(batch, target, discount);
  nn::FeatureBatch features;
  for (const Transition* t : batch) features.add(nn::rotate(t->state));
  nn::ForwardTape tape;
  const Eigen::VectorXd v = nn::forward(params, features, &tape);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), v.size());
  const Eigen::VectorXd diff = v - y;
  const double n = static_cast<double>(v.size());
  const double loss = diff.squaredNorm() / n;
  if (!std::isfinite(loss)) return loss;
  nn::adam_update(params, nn::backward(params, tape, Eigen::VectorXd(2.0 * diff / n)), lr);
  return loss;
}

void reset_adam(nn::NetParams& params) {
  params.adam_m().setZero();
  params.adam_v().setZero();
  params.set_adam_step(0);
}

}  // namespace

void validate(const TrainConfig& c) {
  require(c.gamma >= 0.0 && c.gamma < 1.0, "gamma", "must lie in [0, 1)");
  require(c.imitation_lr > 0.0, "imitation_lr", "must be > 0");
  require(c.rl_lr > 0.0, "rl_lr", "must be > 0");
  require(c.batch_size > 0, "batch_size", "must be > 0");
  require(c.epsilon_start >= 0.0 && c.epsilon_start <= 1.0, "epsilon_start", "must lie in [0, 1]");
  require(c.epsilon_end >= 0.0 && c.epsilon_end <= 1.0, "epsilon_end", "must lie in [0, 1]");
  require(c.epsilon_decay_episodes > 0, "epsilon_decay_episodes", "must be > 0");
  require(c.curriculum_initial_N >= 0, "curriculum_initial_N", "must be >= 0");
  require(c.target_sync_interval > 0, "target_sync_interval", "must be > 0");
  require(c.buffer_capacity > 0, "buffer_capacity", "must be > 0");
  require(c.workers >= 1, "workers", "must be >= 1");
  for (const auto* block : {&c.net.embedding, &c.net.pairwise, &c.net.attention, &c.net.value}) {
    require(!block->empty() && std::all_of(block->begin(), block->end(), [](int w) { return w > 0; }),
            "net", "every block needs at least one layer of positive width");
  }
}

int curriculum_N(const TrainConfig& train, int target_N, std::uint64_t episode) {
  const bool staged = target_N == train.curriculum_target_N && train.curriculum_initial_N < target_N;
  return staged && episode < train.curriculum_switch_episode ? train.curriculum_initial_N : target_N;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double discount) {
  std::vector<double> out(rewards.size());
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + discount * acc;
    out[i] = acc;
  }
  return out;
}

Demonstrations collect_demonstrations(const env::EnvConfig& config, const TrainConfig& train,
                                      std::uint64_t seed) {
  env::EnvConfig teacher_config = config;
  teacher_config.robot_visible = true;
  teacher_config.N = curriculum_N(train, config.N, 0);
  const double discount = step_discount(train.gamma, teacher_config, train.discount_unit);
  const OrcaPolicy teacher;

  Demonstrations data;
  env::CrowdEnv env(teacher_config);
  for (std::uint64_t e = 0; e < train.imitation_episodes; ++e) {
    env.reset(derive_seed(seed, "imitation", e));
    const std::size_t first = data.transitions.size();
    std::vector<double> rewards;
    while (!env.done()) {
      env::JointState state = env.observe();
      env::StepOutcome step = apply(env, teacher.act(env));
      rewards.push_back(step.reward);
      data.transitions.push_back({std::move(state), env::Action{}, step.reward, std::move(step.next_state),
                                  step.terminal != env::Terminal::none});
    }
    const auto labels = discounted_returns(rewards, discount);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      data.labeled.push_back({data.transitions[first + i].state, labels[i]});
    }
  }
  return data;
}

nn::NetParams fit_values(nn::NetParams params, std::span<const LabeledState> data,
                         const TrainConfig& train, std::uint64_t seed) {
  reset_adam(params);
  if (data.empty()) return params;
  std::vector<std::vector<nn::FeatureRow>> rows;
  rows.reserve(data.size());
  for (const auto& d : data) rows.push_back(nn::rotate(d.state));

  std::vector<std::size_t> order(data.size());
  Rng rng(derive_seed(seed, "imitation_shuffle"));
  for (std::uint64_t epoch = 0; epoch < train.imitation_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
    for (std::size_t begin = 0; begin < order.size(); begin += train.batch_size) {
      const std::size_t end = std::min(order.size(), begin + train.batch_size);
      nn::FeatureBatch batch;
      Eigen::VectorXd y(static_cast<Eigen::Index>(end - begin));
      for (std::size_t k = begin; k < end; ++k) {
        batch.add(rows[order[k]]);
        y[static_cast<Eigen::Index>(k - begin)] = data[order[k]].label;
      }
      nn::ForwardTape tape;
      const Eigen::VectorXd diff = nn::forward(params, batch, &tape) - y;
      const double n = static_cast<double>(diff.size());
      if (!std::isfinite(diff.squaredNorm())) {
        throw TrainingDiverged("imitation loss became non-finite in epoch " + std::to_string(epoch));
      }
      nn::adam_update(params, nn::backward(params, tape, Eigen::VectorXd(2.0 * diff / n)),
                      train.imitation_lr);
    }
  }
  return params;
}

nn::NetParams imitation_bootstrap(const env::EnvConfig& config, const TrainConfig& train,
                                  std::uint64_t seed, nn::NetParams params) {
  return fit_values(std::move(params), collect_demonstrations(config, train, seed).labeled, train, seed);
}

std::string to_json(const EpisodeLog& log) {
  nlohmann::ordered_json j;
  j["episode"] = log.episode;
  j["N"] = log.N;
  j["return"] = log.ret;
  j["outcome"] = env::to_string(log.outcome);
  j["steps"] = log.steps;
  j["beep_count"] = log.beep_count;
  j["epsilon"] = log.epsilon;
  j["loss"] = log.loss ? nlohmann::ordered_json(*log.loss) : nlohmann::ordered_json(nullptr);
  j["updates"] = log.updates;
  return j.dump();
}

TrainResult train(const env::EnvConfig& config, const TrainConfig& tc, env::Mode mode,
                  std::uint64_t seed, const TrainHooks& hooks,
                  const std::optional<nn::Checkpoint>& resume) {
  env::validate(config);
  validate(tc);

  TrainResult result;
  std::uint64_t start = 0;
  ReplayBuffer buffer(tc.buffer_capacity);
  // Demonstrations are regenerated on resume; they depend only on the seed.
  Demonstrations demos;
  if (!resume || tc.replay_demonstrations) demos = collect_demonstrations(config, tc, seed);
  if (resume) {
    if (!(resume->params.config() == tc.net)) {
      throw CheckpointError("resume checkpoint architecture differs from train.net");
    }
    result.params = resume->params;
    start = resume->meta.episode;
    result.updates = resume->meta.updates;
  } else {
    result.params = fit_values(nn::NetParams::initialize(tc.net, derive_seed(seed, "init")), demos.labeled,
                               tc, seed);
    if (hooks.on_checkpoint) hooks.on_checkpoint({result.params, {0, 0}});
  }
  if (start == 0) reset_adam(result.params);

  nn::NetParams& params = result.params;
  nn::NetParams target = params;
  if (tc.replay_demonstrations) {
    for (auto& t : demos.transitions) buffer.push(std::move(t));
  }
  demos = {};
  const std::vector<env::Action> actions = env::action_space(mode);
  const std::size_t workers = static_cast<std::size_t>(tc.workers);

  for (std::uint64_t round = start; round < tc.rl_episodes; round += workers) {
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(workers, tc.rl_episodes - round));
    std::vector<Rollout> rollouts(count);
    std::vector<env::EnvConfig> configs(count, config);
    std::vector<double> epsilons(count);
    auto run = [&](std::size_t i) {
      const std::uint64_t e = round + i;
      configs[i].N = curriculum_N(tc, config.N, e);
      epsilons[i] = epsilon_at(tc.epsilon_start, tc.epsilon_end, tc.epsilon_decay_episodes, e);
      const double discount = step_discount(tc.gamma, configs[i], tc.discount_unit);
      rollouts[i] = roll_out(params, configs[i], actions, discount, epsilons[i],
                             derive_seed(seed, "env", e), derive_seed(seed, "epsilon", e));
    };
    if (count == 1) {
      run(0);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(count);
      for (std::size_t i = 0; i < count; ++i) threads.emplace_back(run, i);
      for (auto& t : threads) t.join();
    }

    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t e = round + i;
      Rollout& r = rollouts[i];
      for (auto& t : r.transitions) buffer.push(std::move(t));

      EpisodeLog log;
      log.episode = e;
      log.N = configs[i].N;
      log.ret = r.ret;
      log.outcome = r.outcome;
      log.steps = r.steps;
      log.beep_count = r.beeps;
      log.epsilon = epsilons[i];

      if (buffer.size() >= tc.batch_size) {
        Rng rng(derive_seed(seed, "replay", e));
        const double discount = step_discount(tc.gamma, configs[i], tc.discount_unit);
        double total = 0.0;
        for (std::uint64_t b = 0; b < tc.train_batches; ++b) {
          const double loss =
              optimize_batch(params, target, buffer, tc.batch_size, discount, tc.rl_lr, rng);
          if (!std::isfinite(loss)) {
            throw TrainingDiverged("TD loss became non-finite at episode " + std::to_string(e));
          }
          total += loss;
          if (++result.updates % tc.target_sync_interval == 0) target.values() = params.values();
        }
        if (tc.train_batches > 0) log.loss = total / static_cast<double>(tc.train_batches);
      }
      log.updates = result.updates;
      if (hooks.on_episode) hooks.on_episode(log);
      result.log.push_back(log);

      const std::uint64_t done = e + 1;
      if (hooks.on_checkpoint && tc.checkpoint_interval > 0 &&
          (done % tc.checkpoint_interval == 0 || done == tc.rl_episodes)) {
        hooks.on_checkpoint({params, {done, result.updates}});
      }
    }
  }
  return result;
}

}  // namespace l2b::rl
