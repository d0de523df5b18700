#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "l2b/ervo.hpp"
#include "l2b/vec2.hpp"

/// Circle-crossing crowd navigation environment.
namespace l2b::env {

struct EnvConfig {
  int N = 5;
  double circle_radius = 4.0;
  double dt = 0.25;
  double t_lim = 25.0;
  double v_pref = 1.0;
  double robot_radius = 0.3;
  double human_radius = 0.3;
  double beep_range = 1.0;
  double d_disc = 0.2;
  double alpha = 0.1;
  double beta = 0.2;
  double eta = 0.5;
  std::uint64_t seed = 0;
  double noise_half_width = 0.5;
  /// Whether pedestrians include the robot in their ORCA neighbor set.
  bool robot_visible = false;
  double human_max_speed = 1.0;
  double orca_time_horizon = 5.0;
};

/// Throws ConfigError naming the first invalid field.
void validate(const EnvConfig& config);

struct RobotState {
  Vec2 position;
  Vec2 velocity;
  Vec2 goal;
  double v_pref = 1.0;
  double radius = 0.3;
  double beep_range = 1.0;
  /// Last nonzero commanded direction (unit).
  Vec2 heading{1.0, 0.0};
};

struct PedestrianState {
  Vec2 position;
  Vec2 velocity;
  double radius = 0.3;
  Vec2 goal;
  int id = 0;
  bool arrived = false;
};

/// What the robot may see of a pedestrian: no goal.
struct ObservedPedestrian {
  Vec2 position;
  Vec2 velocity;
  double distance = 0.0;
  double radius = 0.3;
};

struct JointState {
  RobotState robot;
  std::vector<ObservedPedestrian> pedestrians;
  double t = 0.0;
};

/// Direction index 0..7 is heading k * pi / 4 in the world frame; kStill
/// means zero velocity (and never beeps).
struct Action {
  static constexpr int kStill = 8;
  int direction = kStill;
  bool beep = false;

  bool operator==(const Action&) const = default;
};

enum class Mode { sarl, l2b };

Mode parse_mode(std::string_view text);
std::string_view to_string(Mode mode);

/// sarl: [still, 8 headings] (9 actions). l2b: additionally the 8 headings
/// with a beep (17 actions). Order is fixed; policies break ties by index.
std::vector<Action> action_space(Mode mode);

Vec2 action_velocity(const Action& action, double v_pref);

enum class Terminal { none, goal, collision, timeout };

std::string_view to_string(Terminal terminal);
Terminal parse_terminal(std::string_view text);

struct StepOutcome {
  JointState next_state;
  double reward = 0.0;
  double reward_env = 0.0;
  double reward_social = 0.0;
  Terminal terminal = Terminal::none;
};

struct Scenario {
  RobotState robot;
  std::vector<PedestrianState> pedestrians;
};

/// Random circle-crossing layout with antipodal goals. Bit-identical for
/// identical (config, episode_seed).
Scenario generate_scenario(const EnvConfig& config, std::uint64_t episode_seed);

/// Smallest surface clearance (center distance minus both radii) to any
/// pedestrian; +inf when there are none.
double min_clearance(const RobotState& robot, std::span<const PedestrianState> peds);
double min_clearance(const RobotState& robot, std::span<const ObservedPedestrian> peds);

/// True iff some pedestrian satisfies r_robot + r_ped >= center distance.
bool collision_check(const RobotState& robot, std::span<const PedestrianState> peds);

bool goal_reached(const RobotState& robot);

/// Event for a post-step state, with precedence goal > collision > timeout.
Terminal classify(const EnvConfig& config, const RobotState& robot, double clearance, double t);

/// Environment reward: 1 - alpha t / t_lim on goal, -0.25 on collision, else 0.
double reward_env(const EnvConfig& config, Terminal event, double t);

/// Crowd reward from the surface clearance d: beta (d - r_b) if beeping
/// within range, else eta (d - d_disc) inside the discomfort zone, else 0.
/// Negative clearances are treated as 0.
double reward_social(const EnvConfig& config, double clearance, bool beep);

/// Stateful episode. Not thread-safe; use one instance per worker.
class CrowdEnv {
 public:
  explicit CrowdEnv(EnvConfig config);

  void reset(std::uint64_t episode_seed);
  void reset(Scenario scenario, std::uint64_t episode_seed = 0);

  StepOutcome step(const Action& action);
  /// Continuous velocity command; used by scripted drivers such as ORCA.
  StepOutcome step_velocity(const Vec2& velocity, bool beep);

  JointState observe() const;

  const EnvConfig& config() const { return config_; }
  const RobotState& robot() const { return robot_; }
  const std::vector<PedestrianState>& pedestrians() const { return peds_; }
  double time() const { return t_; }
  int steps() const { return steps_; }
  Terminal terminal() const { return terminal_; }
  bool done() const { return terminal_ != Terminal::none; }
  std::uint64_t episode_seed() const { return episode_seed_; }
  /// Beep event applied during the most recent step.
  const ervo::BeepEvent& last_beep() const { return last_beep_; }

 private:
  EnvConfig config_;
  RobotState robot_;
  std::vector<PedestrianState> peds_;
  double t_ = 0.0;
  int steps_ = 0;
  Terminal terminal_ = Terminal::none;
  std::uint64_t episode_seed_ = 0;
  double tie_break_rotation_ = 0.0;
  ervo::BeepEvent last_beep_;
};

/// Observable projection of full states, pedestrians sorted by distance
/// (ties by id).
JointState make_observation(const RobotState& robot, std::span<const PedestrianState> peds,
                            double t);

}  // namespace l2b::env
