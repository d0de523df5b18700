#include <gtest/gtest.h>

#include <cmath>

#include "l2b/features.hpp"
#include "l2b/rng.hpp"

using namespace l2b;
using namespace l2b::env;
using l2b::nn::rotate;

namespace {

JointState random_state(Rng& rng, int n) {
  JointState s;
  s.robot.position = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
  s.robot.goal = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
  s.robot.velocity = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  for (int i = 0; i < n; ++i) {
    ObservedPedestrian p;
    p.position = {rng.uniform(-4, 4), rng.uniform(-4, 4)};
    p.velocity = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    p.distance = norm(p.position - s.robot.position);
    s.pedestrians.push_back(p);
  }
  return s;
}

Vec2 rotate_about(const Vec2& p, const Vec2& c, double a) { return c + l2b::rotate(p - c, a); }

}  // namespace

TEST(Features, RowLayout) {
  JointState s;
  s.robot.position = {1, 1};
  s.robot.goal = {1, 4};  // goal straight up: local x is world +y
  s.robot.velocity = {0.5, 0};
  ObservedPedestrian p;
  p.position = {2, 1};
  p.velocity = {0, -1};
  p.radius = 0.25;
  s.pedestrians.push_back(p);
  const auto rows = rotate(s);
  ASSERT_EQ(rows.size(), 1u);
  const auto& r = rows[0];
  EXPECT_NEAR(r[0], 3.0, 1e-12);   // d_goal
  EXPECT_EQ(r[1], 1.0);            // v_pref
  EXPECT_NEAR(r[2], 0.0, 1e-12);   // robot vx (along goal)
  EXPECT_NEAR(r[3], -0.5, 1e-12);  // robot vy (world +x is local -y)
  EXPECT_EQ(r[4], 0.3);
  EXPECT_EQ(r[5], 1.0);
  EXPECT_NEAR(r[6], 0.0, 1e-12);
  EXPECT_NEAR(r[7], -1.0, 1e-12);
  EXPECT_NEAR(r[8], -1.0, 1e-12);
  EXPECT_NEAR(r[9], 0.0, 1e-12);
  EXPECT_EQ(r[10], 0.25);
  EXPECT_NEAR(r[11], 1.0, 1e-12);
  EXPECT_NEAR(r[12], 0.55, 1e-12);
}

TEST(Features, EmptyCrowdGivesOneSentinelRow) {
  JointState s;
  s.robot.goal = {3, 4};
  const auto rows = rotate(s);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0][0], 5.0, 1e-12);
  for (int k = nn::kSelfDim; k < nn::kFeatureDim; ++k) EXPECT_EQ(rows[0][k], 0.0);
}

TEST(Features, InvariantUnderRigidRotationAboutRobot) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const JointState s = random_state(rng, 6);
    const double a = rng.uniform(-M_PI, M_PI);
    JointState t = s;
    const Vec2 c = s.robot.position;
    t.robot.goal = rotate_about(s.robot.goal, c, a);
    t.robot.velocity = l2b::rotate(s.robot.velocity, a);
    for (auto& p : t.pedestrians) {
      p.position = rotate_about(p.position, c, a);
      p.velocity = l2b::rotate(p.velocity, a);
    }
    const auto r1 = rotate(s);
    const auto r2 = rotate(t);
    for (std::size_t i = 0; i < r1.size(); ++i) {
      for (int k = 0; k < nn::kFeatureDim; ++k) ASSERT_NEAR(r1[i][k], r2[i][k], 1e-12);
    }
  }
}

TEST(Features, InvariantUnderTranslation) {
  Rng rng(9);
  const JointState s = random_state(rng, 4);
  JointState t = s;
  const Vec2 shift{3.5, -2.0};
  t.robot.position += shift;
  t.robot.goal += shift;
  for (auto& p : t.pedestrians) p.position += shift;
  const auto r1 = rotate(s);
  const auto r2 = rotate(t);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    for (int k = 0; k < nn::kFeatureDim; ++k) EXPECT_NEAR(r1[i][k], r2[i][k], 1e-12);
  }
}
