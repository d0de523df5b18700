#pragma once

#include <cstdint>
#include <optional>

#include "l2b/vec2.hpp"

/// Simplified emotional-reaction layer on top of ORCA: a robot beep makes
/// nearby pedestrians in front of it flee radially for one step.
namespace l2b::ervo {

struct BeepEvent {
  bool active = false;
  Vec2 robot_position;
  /// Unit vector; the affected region is the half-disc in front of it.
  Vec2 robot_heading{1.0, 0.0};
  double range = 1.0;
  /// Seeds the escape direction of a pedestrian sitting exactly on the robot.
  std::uint64_t degenerate_seed = 0;
};

/// True iff the beep is active, the pedestrian center is strictly closer
/// than `range`, and it is not behind the robot.
bool in_influence_region(const Vec2& ped_position, const BeepEvent& beep);

/// Gaussian degree of influence, exp(-d^2 / (2 r^2)) / (sqrt(2 pi) r), inside
/// the region; zero elsewhere.
double influence(const Vec2& ped_position, const BeepEvent& beep);

/// Velocity of magnitude influence() pointing away from the robot, or
/// nullopt when the pedestrian is not affected.
std::optional<Vec2> escape_velocity(const Vec2& ped_position, const BeepEvent& beep);

}  // namespace l2b::ervo
