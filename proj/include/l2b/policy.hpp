#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l2b/env.hpp"
#include "l2b/rng.hpp"
#include "l2b/value_net.hpp"

namespace l2b::rl {

/// How the discount exponent is measured. `time`: gamma^(t * v_pref) with t
/// in seconds, so one step discounts by gamma^(dt * v_pref). `steps`: one
/// step discounts by gamma^(v_pref).
enum class DiscountUnit { time, steps };

DiscountUnit parse_discount_unit(std::string_view text);
std::string_view to_string(DiscountUnit unit);

/// Per-step discount factor.
double step_discount(double gamma, const env::EnvConfig& config, DiscountUnit unit = DiscountUnit::time);

/// Batched state-value oracle: writes one value per state.
using ValueFn = std::function<std::vector<double>(std::span<const env::JointState>)>;

/// Value network as a ValueFn. `params` must outlive the returned function.
ValueFn net_value(const nn::NetParams& params);

/// One-step transition model: the robot moves by the commanded velocity,
/// beeped pedestrians take their escape velocity, everyone else keeps
/// their current velocity.
env::JointState predict_next_state(const env::JointState& state, const env::Action& action,
                                   const env::EnvConfig& config);

/// Reward of arriving in `predicted` after taking an action with `beep`.
double predicted_reward(const env::JointState& predicted, bool beep, const env::EnvConfig& config);

/// argmax_a R(s, a) + discount * V(s'), ties to the lowest index. Throws
/// std::invalid_argument on an empty action set.
std::size_t lookahead_index(const ValueFn& value, const env::JointState& state,
                            std::span<const env::Action> actions, const env::EnvConfig& config,
                            double discount);

env::Action lookahead_policy(const nn::NetParams& params, const env::JointState& state,
                             std::span<const env::Action> actions, const env::EnvConfig& config,
                             double discount);

/// Uniform random action with probability epsilon, else `policy_action`.
env::Action epsilon_greedy(const env::Action& policy_action, double epsilon,
                           std::span<const env::Action> actions, Rng& rng);

/// Linear from `start` at episode 0 to `end` at `decay_episodes`, then flat.
double epsilon_at(double start, double end, std::uint64_t decay_episodes, std::uint64_t episode);

/// What a policy asks the environment to do for one step.
struct Command {
  env::Action action;
  /// Continuous override; when set, `action.beep` still selects beeping.
  std::optional<Vec2> velocity;
};

env::StepOutcome apply(env::CrowdEnv& env, const Command& command);

/// Robot controller. Implementations are immutable and may be shared
/// between threads; any randomness derives from the episode seed and step.
class RobotPolicy {
 public:
  virtual ~RobotPolicy() = default;
  virtual Command act(const env::CrowdEnv& env) const = 0;
  virtual std::string name() const = 0;
};

/// Greedy one-step lookahead on a value network.
class ValuePolicy final : public RobotPolicy {
 public:
  ValuePolicy(std::shared_ptr<const nn::NetParams> params, env::Mode mode, double gamma,
              DiscountUnit unit = DiscountUnit::time);

  Command act(const env::CrowdEnv& env) const override;
  std::string name() const override;
  const std::vector<env::Action>& actions() const { return actions_; }

 private:
  std::shared_ptr<const nn::NetParams> params_;
  env::Mode mode_;
  double gamma_;
  DiscountUnit unit_;
  std::vector<env::Action> actions_;
};

/// Robot driven by ORCA toward its goal, treating pedestrians as reciprocal
/// partners. Never beeps.
class OrcaPolicy final : public RobotPolicy {
 public:
  Command act(const env::CrowdEnv& env) const override;
  std::string name() const override { return "orca"; }
};

/// Discrete heading closest to the goal direction. Never beeps.
class GoalSeekingPolicy final : public RobotPolicy {
 public:
  Command act(const env::CrowdEnv& env) const override;
  std::string name() const override { return "goal"; }
};

/// Uniform over the action space of `mode`.
class RandomPolicy final : public RobotPolicy {
 public:
  explicit RandomPolicy(env::Mode mode) : actions_(env::action_space(mode)) {}
  Command act(const env::CrowdEnv& env) const override;
  std::string name() const override { return "random"; }

 private:
  std::vector<env::Action> actions_;
};

}  // namespace l2b::rl
