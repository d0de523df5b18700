#include "l2b/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "l2b/errors.hpp"
#include "l2b/orca.hpp"
#include "l2b/rng.hpp"

namespace l2b::env {
namespace {

constexpr int kMaxPlacementAttempts = 1000;
constexpr double kTieBreakAngle = 1e-3;

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ConfigError(std::string("env.") + field + ": " + why);
}

Vec2 goal_directed_velocity(const PedestrianState& p, double speed, double dt) {
  if (p.arrived) return {};
  const Vec2 to_goal = p.goal - p.position;
  const double dist = norm(to_goal);
  if (dist < 1e-9) return {};
  return to_goal / dist * std::min(speed, dist / dt);
}

}  // namespace

void validate(const EnvConfig& c) {
  require(c.N >= 0, "N", "must be >= 0");
  require(c.circle_radius > 0.0, "circle_radius", "must be > 0");
  require(c.dt > 0.0, "dt", "must be > 0");
  require(c.t_lim > 0.0, "t_lim", "must be > 0");
  require(c.v_pref > 0.0, "v_pref", "must be > 0");
  require(c.robot_radius > 0.0, "robot_radius", "must be > 0");
  require(c.human_radius > 0.0, "human_radius", "must be > 0");
  require(c.beep_range > 0.0, "beep_range", "must be > 0");
  require(c.d_disc > 0.0, "d_disc", "must be > 0");
  require(c.alpha > 0.0, "alpha", "must be > 0");
  require(c.beta >= 0.0, "beta", "must be >= 0");
  require(c.eta > c.beta, "eta",
          "must satisfy eta > beta (crowd discomfort is penalized more heavily than path "
          "clearing); got eta=" + std::to_string(c.eta) + ", beta=" + std::to_string(c.beta));
  require(c.noise_half_width >= 0.0, "noise_half_width", "must be >= 0");
  require(c.human_max_speed > 0.0, "human_max_speed", "must be > 0");
  require(c.orca_time_horizon > 0.0, "orca_time_horizon", "must be > 0");
}

Mode parse_mode(std::string_view text) {
  if (text == "sarl") return Mode::sarl;
  if (text == "l2b") return Mode::l2b;
  throw ConfigError("mode: expected 'sarl' or 'l2b', got '" + std::string(text) + "'");
}

std::string_view to_string(Mode mode) { return mode == Mode::sarl ? "sarl" : "l2b"; }

std::vector<Action> action_space(Mode mode) {
  std::vector<Action> actions;
  actions.push_back({Action::kStill, false});
  for (int k = 0; k < 8; ++k) actions.push_back({k, false});
  if (mode == Mode::l2b) {
    for (int k = 0; k < 8; ++k) actions.push_back({k, true});
  }
  return actions;
}

Vec2 action_velocity(const Action& action, double v_pref) {
  if (action.direction == Action::kStill) return {};
  const double angle = action.direction * std::numbers::pi / 4.0;
  return {v_pref * std::cos(angle), v_pref * std::sin(angle)};
}

std::string_view to_string(Terminal terminal) {
  switch (terminal) {
    case Terminal::none: return "none";
    case Terminal::goal: return "goal";
    case Terminal::collision: return "collision";
    case Terminal::timeout: return "timeout";
  }
  return "none";
}

Terminal parse_terminal(std::string_view text) {
  if (text == "none") return Terminal::none;
  if (text == "goal") return Terminal::goal;
  if (text == "collision") return Terminal::collision;
  if (text == "timeout") return Terminal::timeout;
  throw ConfigError("terminal: unknown value '" + std::string(text) + "'");
}

Scenario generate_scenario(const EnvConfig& config, std::uint64_t episode_seed) {
  Rng rng(derive_seed(episode_seed, "scenario"));
  const double radius = config.circle_radius;
  const double noise = config.noise_half_width;

  auto place = [&](Vec2& start, Vec2& goal) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Vec2 on_circle{radius * std::cos(angle), radius * std::sin(angle)};
    start = on_circle + Vec2{rng.uniform(-noise, noise), rng.uniform(-noise, noise)};
    goal = -on_circle + Vec2{rng.uniform(-noise, noise), rng.uniform(-noise, noise)};
  };

  Scenario s;
  s.robot.v_pref = config.v_pref;
  s.robot.radius = config.robot_radius;
  s.robot.beep_range = config.beep_range;
  place(s.robot.position, s.robot.goal);
  s.robot.heading = normalize(s.robot.goal - s.robot.position);

  for (int i = 0; i < config.N; ++i) {
    PedestrianState p;
    p.id = i;
    p.radius = config.human_radius;
    int attempts = 0;
    while (true) {
      if (++attempts > kMaxPlacementAttempts) {
        throw ConfigError("env.N: could not place pedestrian " + std::to_string(i) +
                          " without overlap after " + std::to_string(kMaxPlacementAttempts) +
                          " attempts");
      }
      place(p.position, p.goal);
      bool ok = norm(p.position - s.robot.position) > p.radius + s.robot.radius &&
                norm(p.goal - s.robot.goal) > p.radius + s.robot.radius;
      for (const auto& q : s.pedestrians) {
        if (!ok) break;
        ok = norm(p.position - q.position) > p.radius + q.radius &&
             norm(p.goal - q.goal) > p.radius + q.radius;
      }
      if (ok) break;
    }
    s.pedestrians.push_back(p);
  }
  return s;
}

template <typename Ped>
static double clearance_impl(const RobotState& robot, std::span<const Ped> peds) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : peds) {
    best = std::min(best, norm(p.position - robot.position) - robot.radius - p.radius);
  }
  return best;
}

double min_clearance(const RobotState& robot, std::span<const PedestrianState> peds) {
  return clearance_impl(robot, peds);
}

double min_clearance(const RobotState& robot, std::span<const ObservedPedestrian> peds) {
  return clearance_impl(robot, peds);
}

bool collision_check(const RobotState& robot, std::span<const PedestrianState> peds) {
  return std::any_of(peds.begin(), peds.end(), [&](const PedestrianState& p) {
    return robot.radius + p.radius >= norm(p.position - robot.position);
  });
}

bool goal_reached(const RobotState& robot) {
  return norm(robot.position - robot.goal) < robot.radius;
}

Terminal classify(const EnvConfig& config, const RobotState& robot, double clearance, double t) {
  if (goal_reached(robot)) return Terminal::goal;
  if (clearance <= 0.0) return Terminal::collision;
  // Half a step of slack absorbs accumulated rounding in t.
  if (t >= config.t_lim - 0.5 * config.dt) return Terminal::timeout;
  return Terminal::none;
}

double reward_env(const EnvConfig& config, Terminal event, double t) {
  switch (event) {
    case Terminal::goal: return 1.0 - config.alpha * t / config.t_lim;
    case Terminal::collision: return -0.25;
    default: return 0.0;
  }
}

double reward_social(const EnvConfig& config, double clearance, bool beep) {
  const double d = std::max(clearance, 0.0);
  if (beep && d < config.beep_range) return config.beta * (d - config.beep_range);
  if (d < config.d_disc) return config.eta * (d - config.d_disc);
  return 0.0;
}

JointState make_observation(const RobotState& robot, std::span<const PedestrianState> peds,
                            double t) {
  std::vector<std::pair<double, int>> order;
  order.reserve(peds.size());
  for (std::size_t i = 0; i < peds.size(); ++i) {
    order.emplace_back(norm(peds[i].position - robot.position), peds[i].id);
  }
  std::vector<std::size_t> idx(peds.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });

  JointState js;
  js.robot = robot;
  js.t = t;
  js.pedestrians.reserve(peds.size());
  for (const std::size_t i : idx) {
    js.pedestrians.push_back({peds[i].position, peds[i].velocity, order[i].first, peds[i].radius});
  }
  return js;
}

CrowdEnv::CrowdEnv(EnvConfig config) : config_(config) { validate(config_); }

void CrowdEnv::reset(std::uint64_t episode_seed) {
  reset(generate_scenario(config_, episode_seed), episode_seed);
}

void CrowdEnv::reset(Scenario scenario, std::uint64_t episode_seed) {
  robot_ = scenario.robot;
  peds_ = std::move(scenario.pedestrians);
  t_ = 0.0;
  steps_ = 0;
  terminal_ = Terminal::none;
  episode_seed_ = episode_seed;
  tie_break_rotation_ = (splitmix64(episode_seed) & 1U) ? kTieBreakAngle : -kTieBreakAngle;
  last_beep_ = {};
}

StepOutcome CrowdEnv::step(const Action& action) {
  if (action.direction == Action::kStill && action.beep) {
    throw UsageError("step: the still action cannot beep");
  }
  return step_velocity(action_velocity(action, robot_.v_pref), action.beep);
}

StepOutcome CrowdEnv::step_velocity(const Vec2& velocity, bool beep) {
  if (done()) throw UsageError("step: episode already terminated");

  // (1) holonomic robot takes the commanded velocity instantly
  const Vec2 previous_robot_velocity = robot_.velocity;
  robot_.velocity = velocity;
  if (abs_sq(velocity) > 0.0) robot_.heading = normalize(velocity);

  // (2) beep event from the pre-step pose
  last_beep_ = ervo::BeepEvent{beep, robot_.position, robot_.heading, robot_.beep_range,
                               derive_seed(episode_seed_, "ervo", static_cast<std::uint64_t>(steps_))};

  // (3) preferred velocities
  std::vector<orca::Disc> discs;
  discs.reserve(peds_.size());
  for (const auto& p : peds_) {
    orca::Disc d;
    d.position = p.position;
    d.velocity = p.velocity;
    d.radius = p.radius;
    d.max_speed = config_.human_max_speed;
    if (const auto escape = ervo::escape_velocity(p.position, last_beep_)) {
      d.pref_velocity = *escape;
    } else {
      d.pref_velocity = goal_directed_velocity(p, config_.human_max_speed, config_.dt);
    }
    discs.push_back(d);
  }

  // (4) crowd avoidance
  orca::OrcaParams params;
  params.time_horizon = config_.orca_time_horizon;
  params.pref_rotation = tie_break_rotation_;
  std::vector<orca::Disc> passive;
  if (config_.robot_visible) {
    passive.push_back({robot_.position, previous_robot_velocity, robot_.radius, {}, robot_.v_pref});
  }
  const auto new_velocities = orca::orca_policy_step(discs, config_.dt, params, passive);

  // (5) integrate
  for (std::size_t i = 0; i < peds_.size(); ++i) {
    auto& p = peds_[i];
    p.velocity = new_velocities[i];
    p.position += p.velocity * config_.dt;
    if (!p.arrived && norm(p.goal - p.position) < p.radius) p.arrived = true;
  }
  robot_.position += robot_.velocity * config_.dt;
  ++steps_;
  t_ = steps_ * config_.dt;

  // (6) reward, (7) termination
  const double clearance = min_clearance(robot_, peds_);
  StepOutcome out;
  out.terminal = classify(config_, robot_, clearance, t_);
  out.reward_env = reward_env(config_, out.terminal, t_);
  out.reward_social = reward_social(config_, clearance, beep);
  out.reward = out.reward_env + out.reward_social;
  out.next_state = observe();
  terminal_ = out.terminal;
  return out;
}

JointState CrowdEnv::observe() const { return make_observation(robot_, peds_, t_); }

}  // namespace l2b::env
