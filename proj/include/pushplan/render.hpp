#pragma once

#include <string>

#include "pushplan/trace.hpp"

namespace pushplan {

enum class RenderMode { workspace, tree };

RenderMode parse_render_mode(const std::string& name);

struct RenderOptions {
  double pixels_per_meter = 60.0;
  /// Workspace mode: number of evenly spaced body snapshots, including the
  /// first and last trace times.
  int snapshots = 5;
};

/// SVG 1.1 document. Output depends only on the inputs.
std::string render_svg(const Trace& trace, RenderMode mode, const RenderOptions& options = {});

}  // namespace pushplan
