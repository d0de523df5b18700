#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "l2b/checkpoint.hpp"
#include "l2b/env.hpp"
#include "l2b/policy.hpp"
#include "l2b/replay.hpp"
#include "l2b/value_net.hpp"

namespace l2b::rl {

struct TrainConfig {
  double gamma = 0.9;
  std::uint64_t imitation_episodes = 3000;
  double imitation_lr = 0.01;
  std::uint64_t imitation_epochs = 50;
  double rl_lr = 0.001;
  std::uint64_t batch_size = 100;
  std::uint64_t rl_episodes = 20000;
  double epsilon_start = 0.5;
  double epsilon_end = 0.1;
  std::uint64_t epsilon_decay_episodes = 5000;
  /// Training at `curriculum_target_N` starts at `curriculum_initial_N`
  /// and switches at this episode. Other values of N train without it.
  std::uint64_t curriculum_switch_episode = 10000;
  int curriculum_initial_N = 10;
  int curriculum_target_N = 20;
  std::uint64_t target_sync_interval = 50;
  std::uint64_t buffer_capacity = 100000;
  /// Minibatch updates after each episode.
  std::uint64_t train_batches = 1;
  /// Keep the imitation demonstrations in the replay buffer, so early RL
  /// updates still see successful trajectories.
  bool replay_demonstrations = true;
  /// 0 disables periodic checkpoints.
  std::uint64_t checkpoint_interval = 1000;
  DiscountUnit discount_unit = DiscountUnit::time;
  int workers = 1;
  nn::NetConfig net;
};

/// Throws ConfigError naming the first invalid field.
void validate(const TrainConfig& config);

/// Raised when a training loss becomes non-finite.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of pedestrians used for RL episode `episode`.
int curriculum_N(const TrainConfig& train, int target_N, std::uint64_t episode);

/// labels[i] = sum_{t >= i} discount^(t - i) rewards[t].
std::vector<double> discounted_returns(std::span<const double> rewards, double discount);

/// One (state, return) pair collected from a demonstration.
struct LabeledState {
  env::JointState state;
  double label = 0.0;
};

struct Demonstrations {
  std::vector<LabeledState> labeled;
  /// The same steps as transitions. The teacher commands continuous
  /// velocities, so `action` holds the default action.
  std::vector<Transition> transitions;
};

/// Demonstrations from the ORCA teacher (robot visible to the crowd, never
/// beeping), episodes seeded from `seed`.
Demonstrations collect_demonstrations(const env::EnvConfig& config, const TrainConfig& train,
                                      std::uint64_t seed);

/// Mean squared error regression of V onto the labels, `imitation_epochs`
/// passes of shuffled minibatches. Adam state is reset first.
nn::NetParams fit_values(nn::NetParams params, std::span<const LabeledState> data,
                         const TrainConfig& train, std::uint64_t seed);

/// collect_demonstrations followed by fit_values.
nn::NetParams imitation_bootstrap(const env::EnvConfig& config, const TrainConfig& train,
                                  std::uint64_t seed, nn::NetParams params);

struct EpisodeLog {
  std::uint64_t episode = 0;
  int N = 0;
  /// Discounted return from the initial state.
  double ret = 0.0;
  env::Terminal outcome = env::Terminal::none;
  int steps = 0;
  int beep_count = 0;
  double epsilon = 0.0;
  /// Mean TD loss of the updates after this episode, if any ran.
  std::optional<double> loss;
  std::uint64_t updates = 0;
};

/// One JSON object, no trailing newline.
std::string to_json(const EpisodeLog& log);

struct TrainHooks {
  std::function<void(const EpisodeLog&)> on_episode;
  std::function<void(const nn::Checkpoint&)> on_checkpoint;
};

struct TrainResult {
  nn::NetParams params;
  std::vector<EpisodeLog> log;
  std::uint64_t updates = 0;
};

/// Imitation bootstrap, then RL episodes with epsilon-greedy lookahead and
/// TD(0) replay updates against a periodically synced target network.
///
/// With `resume`, imitation is skipped and RL continues at
/// resume->meta.episode with the stored weights and optimizer state (the
/// replay buffer starts empty). A resume at episode 0 is the hand-off from a
/// previously computed bootstrap.
///
/// Seeds: "init" for weights, "imitation" for demonstrations, and per RL
/// episode "env", "epsilon", "replay".
TrainResult train(const env::EnvConfig& config, const TrainConfig& train, env::Mode mode,
                  std::uint64_t seed, const TrainHooks& hooks = {},
                  const std::optional<nn::Checkpoint>& resume = {});

}  // namespace l2b::rl
