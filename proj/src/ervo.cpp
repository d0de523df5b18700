#include "l2b/ervo.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "l2b/rng.hpp"

namespace l2b::ervo {
namespace {

constexpr double kCoincident = 1e-9;

}  // namespace

bool in_influence_region(const Vec2& ped_position, const BeepEvent& beep) {
  if (!beep.active) return false;
  const Vec2 offset = ped_position - beep.robot_position;
  return norm(offset) < beep.range && dot(offset, beep.robot_heading) >= 0.0;
}

double influence(const Vec2& ped_position, const BeepEvent& beep) {
  if (!in_influence_region(ped_position, beep)) return 0.0;
  const double r = beep.range;
  const double d_sq = abs_sq(ped_position - beep.robot_position);
  return std::exp(-d_sq / (2.0 * r * r)) / (std::sqrt(2.0 * std::numbers::pi) * r);
}

std::optional<Vec2> escape_velocity(const Vec2& ped_position, const BeepEvent& beep) {
  if (!in_influence_region(ped_position, beep)) return std::nullopt;
  const double gamma = influence(ped_position, beep);
  const Vec2 offset = ped_position - beep.robot_position;
  const double d = norm(offset);
  if (d > kCoincident) return gamma * (offset / d);

  // No radial direction exists; flee along a direction fixed by the seed and
  // the pedestrian position.
  const std::uint64_t key = beep.degenerate_seed ^ splitmix64(std::bit_cast<std::uint64_t>(ped_position.x)) ^
                            std::bit_cast<std::uint64_t>(ped_position.y);
  Rng rng(splitmix64(key));
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return gamma * Vec2{std::cos(angle), std::sin(angle)};
}

}  // namespace l2b::ervo
