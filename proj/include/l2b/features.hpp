#pragma once

#include <array>
#include <vector>

#include "l2b/env.hpp"

namespace l2b::nn {

inline constexpr int kSelfDim = 6;
inline constexpr int kFeatureDim = 13;

/// One pedestrian row in the robot-centric frame (origin at the robot,
/// x-axis toward its goal):
///   [d_goal, v_pref, vx, vy, r_robot, r_beep,             (robot, 6)
///    px, py, vx, vy, r_ped, d_ped, r_robot + r_ped]       (pedestrian, 7)
using FeatureRow = std::array<double, kFeatureDim>;

/// One row per observed pedestrian, in observation order. With no
/// pedestrians a single row with a zeroed pedestrian block is returned.
std::vector<FeatureRow> rotate(const env::JointState& state);

}  // namespace l2b::nn
