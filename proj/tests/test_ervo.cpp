#include <gtest/gtest.h>

#include <cmath>

#include "l2b/ervo.hpp"

using namespace l2b;
using namespace l2b::ervo;

namespace {
BeepEvent beep_at_origin() { return BeepEvent{true, {0, 0}, {1, 0}, 1.0, 17}; }
}  // namespace

TEST(Ervo, GaussianInfluenceValues) {
  const BeepEvent b = beep_at_origin();
  EXPECT_NEAR(influence({0, 0}, b), 0.39894, 1e-5);
  EXPECT_NEAR(influence({0.5, 0}, b), 0.35207, 1e-5);
  // Closed form with an independent constant.
  EXPECT_NEAR(influence({0.5, 0}, b), 0.3989422804014327 * std::exp(-0.125), 1e-15);
}

TEST(Ervo, RegionIsFrontHalfDiscStrictlyInsideRange) {
  const BeepEvent b = beep_at_origin();
  EXPECT_TRUE(in_influence_region({0.5, 0.3}, b));
  EXPECT_TRUE(in_influence_region({0.0, 0.9}, b));  // abeam counts as in front
  EXPECT_FALSE(in_influence_region({-0.2, 0.0}, b));
  EXPECT_FALSE(in_influence_region({1.0, 0.0}, b));
  EXPECT_FALSE(in_influence_region({1.5, 0.0}, b));
  BeepEvent off = b;
  off.active = false;
  EXPECT_FALSE(in_influence_region({0.5, 0.0}, off));
  EXPECT_EQ(influence({0.5, 0.0}, off), 0.0);
  EXPECT_FALSE(escape_velocity({0.5, 0.0}, off).has_value());
}

TEST(Ervo, EscapeIsStrictlyRadial) {
  const BeepEvent b{true, {1.0, -2.0}, normalize(Vec2{1, 1}), 1.0, 3};
  for (const Vec2 offset : {Vec2{0.3, 0.1}, Vec2{0.0, 0.7}, Vec2{0.6, -0.2}, Vec2{0.05, 0.05}}) {
    const Vec2 p = b.robot_position + offset;
    const auto v = escape_velocity(p, b);
    ASSERT_TRUE(v.has_value());
    EXPECT_NEAR(det(*v, offset), 0.0, 1e-12);
    EXPECT_GT(dot(*v, offset), 0.0);
    EXPECT_NEAR(norm(*v), influence(p, b), 1e-15);
  }
}

TEST(Ervo, CoincidentPedestrianGetsSeededDirection) {
  const BeepEvent b = beep_at_origin();
  const auto v1 = escape_velocity({0, 0}, b);
  const auto v2 = escape_velocity({0, 0}, b);
  ASSERT_TRUE(v1 && v2);
  EXPECT_EQ(v1->x, v2->x);
  EXPECT_EQ(v1->y, v2->y);
  EXPECT_NEAR(norm(*v1), influence({0, 0}, b), 1e-12);
  BeepEvent other = b;
  other.degenerate_seed = 18;
  const auto v3 = escape_velocity({0, 0}, other);
  EXPECT_TRUE(v3->x != v1->x || v3->y != v1->y);
}

TEST(Ervo, InfluenceDecreasesWithDistance) {
  const BeepEvent b = beep_at_origin();
  double prev = influence({0, 0}, b);
  for (double d = 0.05; d < 1.0; d += 0.05) {
    const double g = influence({d, 0}, b);
    EXPECT_LT(g, prev);
    prev = g;
  }
}
