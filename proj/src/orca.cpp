#include "l2b/orca.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace l2b::orca {
namespace {

constexpr double kEpsilon = 1e-10;

Vec2 left_normal(const Vec2& d) { return {-d.y, d.x}; }

// Optimizes along constraint `line_no` subject to lines [0, line_no) and the
// speed circle. Returns false when the 1-D program is infeasible.
bool linear_program1(std::span<const OrcaLine> lines, std::size_t line_no, double radius,
                     const Vec2& opt_velocity, bool direction_opt, Vec2& result) {
  const OrcaLine& line = lines[line_no];
  const double dot_product = dot(line.point, line.direction);
  const double discriminant = dot_product * dot_product + radius * radius - abs_sq(line.point);

  if (discriminant < 0.0) {
    // Speed circle lies entirely outside this constraint.
    return false;
  }

  const double sqrt_discriminant = std::sqrt(discriminant);
  double t_left = -dot_product - sqrt_discriminant;
  double t_right = -dot_product + sqrt_discriminant;

  for (std::size_t i = 0; i < line_no; ++i) {
    const double denominator = det(line.direction, lines[i].direction);
    const double numerator = det(lines[i].direction, line.point - lines[i].point);

    if (std::fabs(denominator) <= kEpsilon) {
      // Parallel lines.
      if (numerator < 0.0) return false;
      continue;
    }

    const double t = numerator / denominator;
    if (denominator >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  if (direction_opt) {
    result = dot(opt_velocity, line.direction) > 0.0 ? line.point + t_right * line.direction
                                                     : line.point + t_left * line.direction;
  } else {
    const double t = dot(line.direction, opt_velocity - line.point);
    result = line.point + std::clamp(t, t_left, t_right) * line.direction;
  }
  return true;
}

// Returns the index of the first line it fails on, or lines.size().
std::size_t linear_program2(std::span<const OrcaLine> lines, double radius,
                            const Vec2& opt_velocity, bool direction_opt, Vec2& result) {
  if (direction_opt) {
    result = opt_velocity * radius;
  } else if (abs_sq(opt_velocity) > radius * radius) {
    result = normalize(opt_velocity) * radius;
  } else {
    result = opt_velocity;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (det(lines[i].direction, lines[i].point - result) > 0.0) {
      const Vec2 previous = result;
      if (!linear_program1(lines, i, radius, opt_velocity, direction_opt, result)) {
        result = previous;
        return i;
      }
    }
  }
  return lines.size();
}

// Infeasible case: minimize the maximum penetration over lines [begin, n).
void linear_program3(std::span<const OrcaLine> lines, std::size_t begin_line, double radius,
                     Vec2& result) {
  double distance = 0.0;

  for (std::size_t i = begin_line; i < lines.size(); ++i) {
    if (det(lines[i].direction, lines[i].point - result) <= distance) continue;

    std::vector<OrcaLine> projected;
    projected.reserve(i);
    for (std::size_t j = 0; j < i; ++j) {
      OrcaLine line;
      const double determinant = det(lines[i].direction, lines[j].direction);

      if (std::fabs(determinant) <= kEpsilon) {
        if (dot(lines[i].direction, lines[j].direction) > 0.0) continue;
        line.point = 0.5 * (lines[i].point + lines[j].point);
      } else {
        line.point = lines[i].point +
                     (det(lines[j].direction, lines[i].point - lines[j].point) / determinant) *
                         lines[i].direction;
      }
      line.direction = normalize(lines[j].direction - lines[i].direction);
      projected.push_back(line);
    }

    const Vec2 previous = result;
    if (linear_program2(projected, radius, left_normal(lines[i].direction), true, result) <
        projected.size()) {
      // Only reachable through rounding; keep the previous result.
      result = previous;
    }
    distance = det(lines[i].direction, lines[i].point - result);
  }
}

// Orders neighbors independently of their position in the input list.
auto neighbor_key(const Disc& self, const Disc& other) {
  return std::make_tuple(abs_sq(other.position - self.position), other.position.x,
                         other.position.y, other.velocity.x, other.velocity.y, other.radius,
                         other.pref_velocity.x, other.pref_velocity.y);
}

OrcaLine pair_line(const Disc& self, const Disc& other, double time_horizon, double dt,
                   double responsibility) {
  const double inv_time_horizon = 1.0 / time_horizon;
  const Vec2 relative_position = other.position - self.position;
  const Vec2 relative_velocity = self.velocity - other.velocity;
  const double dist_sq = abs_sq(relative_position);
  const double combined_radius = self.radius + other.radius;
  const double combined_radius_sq = combined_radius * combined_radius;

  OrcaLine line;
  Vec2 u;

  if (dist_sq > combined_radius_sq) {
    // Vector from the truncation circle center to the relative velocity.
    const Vec2 w = relative_velocity - inv_time_horizon * relative_position;
    const double w_length_sq = abs_sq(w);
    const double dot_product = dot(w, relative_position);

    if (dot_product < 0.0 && dot_product * dot_product > combined_radius_sq * w_length_sq) {
      // Closest boundary point lies on the truncation circle.
      const double w_length = std::sqrt(w_length_sq);
      const Vec2 unit_w = w / w_length;
      line.direction = {unit_w.y, -unit_w.x};
      u = (combined_radius * inv_time_horizon - w_length) * unit_w;
    } else {
      const double leg = std::sqrt(dist_sq - combined_radius_sq);
      if (det(relative_position, w) > 0.0) {
        // Left leg.
        line.direction = Vec2{relative_position.x * leg - relative_position.y * combined_radius,
                              relative_position.x * combined_radius + relative_position.y * leg} /
                         dist_sq;
      } else {
        // Right leg.
        line.direction =
            -Vec2{relative_position.x * leg + relative_position.y * combined_radius,
                  -relative_position.x * combined_radius + relative_position.y * leg} /
            dist_sq;
      }
      u = dot(relative_velocity, line.direction) * line.direction - relative_velocity;
    }
  } else {
    // Already overlapping: resolve within one time step.
    const double inv_dt = 1.0 / dt;
    const Vec2 w = relative_velocity - inv_dt * relative_position;
    const double w_length = norm(w);
    Vec2 unit_w;
    if (w_length > kEpsilon) {
      unit_w = w / w_length;
    } else {
      // Coincident centers with equal velocities: separate along x, with
      // the two agents of the pair picking opposite signs.
      const bool lower = std::make_tuple(self.pref_velocity.x, self.pref_velocity.y,
                                         self.radius) <
                         std::make_tuple(other.pref_velocity.x, other.pref_velocity.y,
                                         other.radius);
      unit_w = lower ? Vec2{-1.0, 0.0} : Vec2{1.0, 0.0};
    }
    line.direction = {unit_w.y, -unit_w.x};
    u = (combined_radius * inv_dt - w_length) * unit_w;
  }

  line.point = self.velocity + responsibility * u;
  return line;
}

}  // namespace

bool is_feasible(const OrcaLine& line, const Vec2& v, double tolerance) {
  return det(line.direction, line.point - v) <= tolerance;
}

std::vector<OrcaLine> compute_orca_lines(const Disc& self, std::span<const Disc> neighbors,
                                         double time_horizon, double dt,
                                         double responsibility) {
  std::vector<OrcaLine> lines;
  lines.reserve(neighbors.size());
  for (const Disc& other : neighbors) {
    lines.push_back(pair_line(self, other, time_horizon, dt, responsibility));
  }
  return lines;
}

Vec2 solve_velocity(std::span<const OrcaLine> lines, const Vec2& pref_velocity, double max_speed) {
  Vec2 result;
  const std::size_t fail = linear_program2(lines, max_speed, pref_velocity, false, result);
  if (fail < lines.size()) {
    linear_program3(lines, fail, max_speed, result);
  }
  return result;
}

Vec2 orca_velocity(const Disc& self, std::span<const Disc> neighbors, double dt,
                   const OrcaParams& params, std::span<const Disc> passive) {
  std::vector<const Disc*> order;
  order.reserve(neighbors.size());
  for (const Disc& n : neighbors) order.push_back(&n);
  std::sort(order.begin(), order.end(), [&](const Disc* a, const Disc* b) {
    return neighbor_key(self, *a) < neighbor_key(self, *b);
  });

  std::vector<OrcaLine> lines;
  lines.reserve(passive.size() + order.size());
  // Passive discs first: the agent owns the whole avoidance effort for them.
  for (const Disc& p : passive) {
    lines.push_back(pair_line(self, p, params.time_horizon, dt, 1.0));
  }
  for (const Disc* other : order) {
    lines.push_back(pair_line(self, *other, params.time_horizon, dt, params.reciprocity));
  }

  Vec2 pref = self.pref_velocity;
  if (params.pref_rotation != 0.0) pref = rotate(pref, params.pref_rotation);
  return solve_velocity(lines, pref, self.max_speed);
}

std::vector<Vec2> orca_policy_step(std::span<const Disc> agents, double dt,
                                   const OrcaParams& params, std::span<const Disc> passive) {
  std::vector<Vec2> out;
  out.reserve(agents.size());
  std::vector<Disc> others;
  others.reserve(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    others.clear();
    for (std::size_t j = 0; j < agents.size(); ++j) {
      if (j != i) others.push_back(agents[j]);
    }
    out.push_back(orca_velocity(agents[i], others, dt, params, passive));
  }
  return out;
}

}  // namespace l2b::orca
