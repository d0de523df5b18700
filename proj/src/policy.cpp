#include "l2b/policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "l2b/errors.hpp"
#include "l2b/ervo.hpp"
#include "l2b/features.hpp"
#include "l2b/orca.hpp"

namespace l2b::rl {

DiscountUnit parse_discount_unit(std::string_view text) {
  if (text == "time") return DiscountUnit::time;
  if (text == "steps") return DiscountUnit::steps;
  throw ConfigError("train.discount_unit: expected 'time' or 'steps', got '" + std::string(text) +
                    "'");
}

std::string_view to_string(DiscountUnit unit) { return unit == DiscountUnit::time ? "time" : "steps"; }

double step_discount(double gamma, const env::EnvConfig& config, DiscountUnit unit) {
  const double exponent = unit == DiscountUnit::time ? config.dt * config.v_pref : config.v_pref;
  return std::pow(gamma, exponent);
}

ValueFn net_value(const nn::NetParams& params) {
  return [&params](std::span<const env::JointState> states) {
    nn::FeatureBatch batch;
    for (const auto& s : states) {
      const auto rows = nn::rotate(s);
      batch.add(rows);
    }
    const Eigen::VectorXd v = nn::forward(params, batch);
    return std::vector<double>(v.data(), v.data() + v.size());
  };
}

env::JointState predict_next_state(const env::JointState& state, const env::Action& action,
                                   const env::EnvConfig& config) {
  env::JointState next = state;
  env::RobotState& robot = next.robot;
  const Vec2 velocity = env::action_velocity(action, robot.v_pref);
  robot.velocity = velocity;
  if (abs_sq(velocity) > 0.0) robot.heading = normalize(velocity);

  const ervo::BeepEvent beep{action.beep, state.robot.position, robot.heading, robot.beep_range, 0};
  robot.position = state.robot.position + velocity * config.dt;

  for (auto& p : next.pedestrians) {
    if (const auto escape = ervo::escape_velocity(p.position, beep)) p.velocity = *escape;
    p.position += p.velocity * config.dt;
    p.distance = norm(p.position - robot.position);
  }
  next.t = state.t + config.dt;
  return next;
}

double predicted_reward(const env::JointState& predicted, bool beep, const env::EnvConfig& config) {
  const double clearance = env::min_clearance(predicted.robot, predicted.pedestrians);
  const env::Terminal event = env::classify(config, predicted.robot, clearance, predicted.t);
  return env::reward_env(config, event, predicted.t) + env::reward_social(config, clearance, beep);
}

std::size_t lookahead_index(const ValueFn& value, const env::JointState& state,
                            std::span<const env::Action> actions, const env::EnvConfig& config,
                            double discount) {
  if (actions.empty()) throw std::invalid_argument("lookahead: empty action set");
  std::vector<env::JointState> next;
  next.reserve(actions.size());
  for (const auto& a : actions) next.push_back(predict_next_state(state, a, config));
  const std::vector<double> v = value(next);

  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const double score = predicted_reward(next[i], actions[i].beep, config) + discount * v[i];
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

env::Action lookahead_policy(const nn::NetParams& params, const env::JointState& state,
                             std::span<const env::Action> actions, const env::EnvConfig& config,
                             double discount) {
  return actions[lookahead_index(net_value(params), state, actions, config, discount)];
}

env::Action epsilon_greedy(const env::Action& policy_action, double epsilon,
                           std::span<const env::Action> actions, Rng& rng) {
  if (rng.uniform() < epsilon) return actions[rng.uniform_index(actions.size())];
  return policy_action;
}

double epsilon_at(double start, double end, std::uint64_t decay_episodes, std::uint64_t episode) {
  if (episode >= decay_episodes) return end;
  const double frac = static_cast<double>(episode) / static_cast<double>(decay_episodes);
  return start + (end - start) * frac;
}

env::StepOutcome apply(env::CrowdEnv& env, const Command& command) {
  if (command.velocity) return env.step_velocity(*command.velocity, command.action.beep);
  return env.step(command.action);
}

ValuePolicy::ValuePolicy(std::shared_ptr<const nn::NetParams> params, env::Mode mode, double gamma,
                         DiscountUnit unit)
    : params_(std::move(params)), mode_(mode), gamma_(gamma), unit_(unit),
      actions_(env::action_space(mode)) {
  if (!params_) throw std::invalid_argument("ValuePolicy: null parameters");
}

Command ValuePolicy::act(const env::CrowdEnv& env) const {
  const double discount = step_discount(gamma_, env.config(), unit_);
  return {lookahead_policy(*params_, env.observe(), actions_, env.config(), discount), {}};
}

std::string ValuePolicy::name() const { return std::string(env::to_string(mode_)); }

Command OrcaPolicy::act(const env::CrowdEnv& env) const {
  const auto& robot = env.robot();
  const double dt = env.config().dt;
  orca::Disc self{robot.position, robot.velocity, robot.radius, {}, robot.v_pref};
  const Vec2 to_goal = robot.goal - robot.position;
  const double dist = norm(to_goal);
  if (dist > 1e-9) self.pref_velocity = to_goal / dist * std::min(robot.v_pref, dist / dt);

  std::vector<orca::Disc> others;
  others.reserve(env.pedestrians().size());
  for (const auto& p : env.pedestrians()) {
    others.push_back({p.position, p.velocity, p.radius, p.velocity, env.config().human_max_speed});
  }
  orca::OrcaParams params;
  params.time_horizon = env.config().orca_time_horizon;
  // Pedestrians that cannot see the robot will not yield, so it takes the
  // whole avoidance effort.
  if (!env.config().robot_visible) {
    return {{env::Action::kStill, false}, orca::orca_velocity(self, {}, dt, params, others)};
  }
  return {{env::Action::kStill, false}, orca::orca_velocity(self, others, dt, params)};
}

Command GoalSeekingPolicy::act(const env::CrowdEnv& env) const {
  const Vec2 to_goal = env.robot().goal - env.robot().position;
  int best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 8; ++k) {
    const double angle = k * std::numbers::pi / 4.0;
    const double d = dot(to_goal, Vec2{std::cos(angle), std::sin(angle)});
    if (d > best_dot) {
      best_dot = d;
      best = k;
    }
  }
  return {{best, false}, {}};
}

Command RandomPolicy::act(const env::CrowdEnv& env) const {
  Rng rng(derive_seed(env.episode_seed(), "random_policy", static_cast<std::uint64_t>(env.steps())));
  return {actions_[rng.uniform_index(actions_.size())], {}};
}

}  // namespace l2b::rl
