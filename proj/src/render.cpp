#include "l2b/render.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace l2b {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8"};

std::string f(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

struct Frame2Svg {
  double min_x, max_y, scale;
  double x(double wx) const { return (wx - min_x) * scale; }
  double y(double wy) const { return (max_y - wy) * scale; }
};

}  // namespace

std::string render_svg(const Trajectory& tr, const RenderStyle& style) {
  double min_x = tr.robot_goal.x, max_x = tr.robot_goal.x;
  double min_y = tr.robot_goal.y, max_y = tr.robot_goal.y;
  auto extend = [&](const Vec2& p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  };
  std::map<int, std::vector<Vec2>> peds;
  for (const Frame& fr : tr.frames) {
    extend(fr.robot_position);
    for (const auto& p : fr.pedestrians) {
      extend(p.position);
      peds[p.id].push_back(p.position);
    }
  }
  min_x -= style.margin;
  min_y -= style.margin;
  max_x += style.margin;
  max_y += style.margin;
  const Frame2Svg m{min_x, max_y, style.pixels_per_meter};
  const double width = (max_x - min_x) * m.scale;
  const double height = (max_y - min_y) * m.scale;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f(width) << "\" height=\""
     << f(height) << "\" viewBox=\"0 0 " << f(width) << ' ' << f(height) << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  std::size_t color = 0;
  for (const auto& [id, points] : peds) {
    const char* c = kPalette[color++ % std::size(kPalette)];
    os << "<polyline class=\"pedestrian\" data-id=\"" << id << "\" fill=\"none\" stroke=\"" << c
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      os << (i ? " " : "") << f(m.x(points[i].x)) << ',' << f(m.y(points[i].y));
    }
    os << "\"/>\n";
    const Vec2& last = points.back();
    os << "<circle class=\"pedestrian-end\" cx=\"" << f(m.x(last.x)) << "\" cy=\"" << f(m.y(last.y))
       << "\" r=\"" << f(tr.human_radius * m.scale) << "\" fill=\"none\" stroke=\"" << c << "\"/>\n";
  }

  if (!tr.frames.empty()) {
    os << "<polyline class=\"robot\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < tr.frames.size(); ++i) {
      const Vec2& p = tr.frames[i].robot_position;
      os << (i ? " " : "") << f(m.x(p.x)) << ',' << f(m.y(p.y));
    }
    os << "\"/>\n";
  }

  // A beep recorded on frame k was issued from the robot pose of frame k - 1.
  for (std::size_t k = 1; k < tr.frames.size(); ++k) {
    if (!tr.frames[k].beep) continue;
    const Vec2& p = tr.frames[k - 1].robot_position;
    os << "<circle class=\"beep\" cx=\"" << f(m.x(p.x)) << "\" cy=\"" << f(m.y(p.y)) << "\" r=\""
       << f(2.0 * tr.robot_radius * m.scale)
       << "\" fill=\"orange\" fill-opacity=\"0.6\" stroke=\"darkorange\"/>\n";
  }

  if (style.show_time_labels) {
    for (std::size_t k = 0; k < tr.frames.size(); k += 8) {
      const Vec2& p = tr.frames[k].robot_position;
      os << "<text class=\"time\" x=\"" << f(m.x(p.x) + 6.0) << "\" y=\"" << f(m.y(p.y) - 6.0)
         << "\" font-size=\"10\" font-family=\"sans-serif\">" << f(tr.frames[k].t) << "</text>\n";
    }
  }

  if (!tr.frames.empty()) {
    const Vec2& s = tr.frames.front().robot_position;
    const double half = 0.15 * m.scale;
    os << "<rect class=\"start\" x=\"" << f(m.x(s.x) - half) << "\" y=\"" << f(m.y(s.y) - half)
       << "\" width=\"" << f(2 * half) << "\" height=\"" << f(2 * half)
       << "\" fill=\"black\"/>\n";
  }
  const double gx = m.x(tr.robot_goal.x), gy = m.y(tr.robot_goal.y);
  const double r = 0.2 * m.scale;
  os << "<polygon class=\"goal\" points=\"" << f(gx) << ',' << f(gy - r) << ' ' << f(gx + r) << ','
     << f(gy) << ' ' << f(gx) << ',' << f(gy + r) << ' ' << f(gx - r) << ',' << f(gy)
     << "\" fill=\"red\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace l2b
