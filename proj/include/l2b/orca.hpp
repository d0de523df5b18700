#pragma once

#include <span>
#include <vector>

#include "l2b/vec2.hpp"

/// Optimal Reciprocal Collision Avoidance for disc agents. This is the crowd
/// policy driving every pedestrian, and the teacher used for imitation.
namespace l2b::orca {

struct Disc {
  Vec2 position;
  Vec2 velocity;
  double radius = 0.3;
  Vec2 pref_velocity;
  double max_speed = 1.0;
};

/// Half-plane constraint on velocity. Feasible velocities v lie on the left
/// of the directed line: det(direction, point - v) <= 0.
struct OrcaLine {
  Vec2 point;
  Vec2 direction;
};

struct OrcaParams {
  double time_horizon = 5.0;
  /// Share of the avoidance effort taken by each agent of a reciprocal pair.
  double reciprocity = 0.5;
  /// Rotation (rad) applied to every preferred velocity before solving. A
  /// tiny nonzero value breaks exact head-on symmetry.
  double pref_rotation = 0.0;
};

bool is_feasible(const OrcaLine& line, const Vec2& v, double tolerance = 0.0);

/// One constraint per neighbor, in neighbor order. `responsibility` is the
/// fraction of the required velocity change this agent takes on.
std::vector<OrcaLine> compute_orca_lines(const Disc& self, std::span<const Disc> neighbors,
                                         double time_horizon, double dt,
                                         double responsibility = 0.5);

/// Closest velocity to `pref_velocity` inside the speed disc satisfying every
/// constraint. When the constraints are infeasible, returns the velocity
/// minimizing the largest constraint violation.
Vec2 solve_velocity(std::span<const OrcaLine> lines, const Vec2& pref_velocity, double max_speed);

/// ORCA velocity of one agent. Neighbors are ordered canonically (by
/// distance, then state) so the result does not depend on input order.
Vec2 orca_velocity(const Disc& self, std::span<const Disc> neighbors, double dt,
                   const OrcaParams& params = {}, std::span<const Disc> passive = {});

/// New velocity for every agent, computed from the same snapshot. Agents in
/// `passive` are seen by everyone but are not controlled; avoiding them is
/// the controlled agent's full responsibility.
std::vector<Vec2> orca_policy_step(std::span<const Disc> agents, double dt,
                                   const OrcaParams& params = {},
                                   std::span<const Disc> passive = {});

}  // namespace l2b::orca
