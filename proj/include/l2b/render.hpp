#pragma once

#include <string>

#include "l2b/trajectory.hpp"

namespace l2b {

struct RenderStyle {
  double pixels_per_meter = 50.0;
  double margin = 1.0;
  bool show_time_labels = true;
};

/// Standalone SVG: pedestrian traces, robot trace, one enlarged circle per
/// beep at the robot position where it was issued, and start/goal markers.
/// Output bytes depend only on the inputs.
std::string render_svg(const Trajectory& trajectory, const RenderStyle& style = {});

}  // namespace l2b
