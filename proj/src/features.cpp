#include "l2b/features.hpp"

namespace l2b::nn {

std::vector<FeatureRow> rotate(const env::JointState& state) {
  const env::RobotState& robot = state.robot;
  const Vec2 to_goal = robot.goal - robot.position;
  const double d_goal = norm(to_goal);
  const Vec2 ex = d_goal > 1e-12 ? to_goal / d_goal : Vec2{1.0, 0.0};
  const Vec2 ey{-ex.y, ex.x};
  auto local = [&](const Vec2& v) { return Vec2{dot(v, ex), dot(v, ey)}; };

  const Vec2 v_robot = local(robot.velocity);
  FeatureRow base{};
  base[0] = d_goal;
  base[1] = robot.v_pref;
  base[2] = v_robot.x;
  base[3] = v_robot.y;
  base[4] = robot.radius;
  base[5] = robot.beep_range;

  std::vector<FeatureRow> rows;
  if (state.pedestrians.empty()) {
    rows.push_back(base);
    return rows;
  }
  rows.reserve(state.pedestrians.size());
  for (const auto& p : state.pedestrians) {
    FeatureRow row = base;
    const Vec2 rel = local(p.position - robot.position);
    const Vec2 vel = local(p.velocity);
    row[6] = rel.x;
    row[7] = rel.y;
    row[8] = vel.x;
    row[9] = vel.y;
    row[10] = p.radius;
    row[11] = norm(p.position - robot.position);
    row[12] = robot.radius + p.radius;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace l2b::nn
