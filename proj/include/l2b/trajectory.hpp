#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "l2b/env.hpp"

namespace l2b {

struct PedestrianFrame {
  int id = 0;
  Vec2 position;
  Vec2 velocity;
};

/// Snapshot after a step. Frame 0 is the initial state (reward 0, no beep).
struct Frame {
  int step = 0;
  double t = 0.0;
  Vec2 robot_position;
  Vec2 robot_velocity;
  bool beep = false;
  std::vector<PedestrianFrame> pedestrians;
  double reward = 0.0;
  double reward_env = 0.0;
  double reward_social = 0.0;
  env::Terminal terminal = env::Terminal::none;
};

struct Trajectory {
  std::uint64_t episode_id = 0;
  Vec2 robot_goal;
  double robot_radius = 0.3;
  double human_radius = 0.3;
  double beep_range = 1.0;
  std::vector<Frame> frames;

  int beep_count() const;
};

Frame capture_frame(const env::CrowdEnv& env, bool beep, const env::StepOutcome* outcome);

/// Starts a trajectory holding the initial frame of `env`.
Trajectory begin_trajectory(const env::CrowdEnv& env);

/// Line-delimited JSON, one object per frame.
void write_jsonl(std::ostream& os, const Trajectory& trajectory);
std::string to_jsonl(const Trajectory& trajectory);

/// Parses records written by write_jsonl. Throws std::runtime_error on
/// malformed input.
Trajectory read_jsonl(std::istream& is);

}  // namespace l2b
