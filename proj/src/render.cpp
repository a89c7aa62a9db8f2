#include "pushplan/render.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pushplan {

RenderMode parse_render_mode(const std::string& name) {
  if (name == "workspace") return RenderMode::workspace;
  if (name == "tree") return RenderMode::tree;
  throw std::invalid_argument("unknown render mode '" + name + "' (expected workspace or tree)");
}

namespace {

class Canvas {
 public:
  Canvas(const Aabb& room, double ppm) : room_(room), ppm_(ppm) {}

  double width() const { return (room_.max.x - room_.min.x) * ppm_ + 2 * kMargin; }
  double height() const { return (room_.max.y - room_.min.y) * ppm_ + 2 * kMargin; }
  std::string x(double wx) const { return format_fixed((wx - room_.min.x) * ppm_ + kMargin, 2); }
  std::string y(double wy) const { return format_fixed((room_.max.y - wy) * ppm_ + kMargin, 2); }
  std::string len(double l) const { return format_fixed(l * ppm_, 2); }
  std::string pt(const Vec2& p) const { return x(p.x) + "," + y(p.y); }

  std::string polygon(const OrientedBox& b, const std::string& style) const {
    std::string pts;
    for (const Vec2& c : {Vec2{-1, -1}, Vec2{1, -1}, Vec2{1, 1}, Vec2{-1, 1}}) {
      const Vec2 p = b.center + rotate({c.x * b.half_extents.x, c.y * b.half_extents.y}, b.angle);
      if (!pts.empty()) pts += ' ';
      pts += pt(p);
    }
    return "<polygon points=\"" + pts + "\" " + style + "/>\n";
  }

  std::string shape(const Shape& s, const Pose& pose, const std::string& style) const {
    if (const auto* c = std::get_if<Circle>(&s))
      return "<circle cx=\"" + x(pose.position.x) + "\" cy=\"" + y(pose.position.y) + "\" r=\"" + len(c->radius) +
             "\" " + style + "/>\n";
    return polygon(as_oriented_box(std::get<Box>(s), pose), style);
  }

  std::string line(const Vec2& a, const Vec2& b, const std::string& style) const {
    return "<line x1=\"" + x(a.x) + "\" y1=\"" + y(a.y) + "\" x2=\"" + x(b.x) + "\" y2=\"" + y(b.y) + "\" " + style +
           "/>\n";
  }

  static constexpr double kMargin = 10.0;

 private:
  Aabb room_;
  double ppm_;
};

std::string fill_for(const TraceBody& b) {
  if (b.robot) return "#1f77b4";
  switch (b.category) {
    case Category::fixed: return "#555555";
    case Category::constraint_oriented: return "#d62728";
    case Category::free_manipulatable: return "#ff7f0e";
  }
  return "#000000";
}

// States grouped by time, in file order.
std::vector<std::pair<double, std::map<std::string, const TraceState*>>> frames_of(const Trace& trace) {
  std::vector<std::pair<double, std::map<std::string, const TraceState*>>> frames;
  for (const TraceState& s : trace.states) {
    if (frames.empty() || frames.back().first != s.time) frames.push_back({s.time, {}});
    frames.back().second[s.id] = &s;
  }
  return frames;
}

std::string open_svg(const Canvas& c, const Trace& trace) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << format_fixed(c.width(), 2)
    << "\" height=\"" << format_fixed(c.height(), 2) << "\" viewBox=\"0 0 " << format_fixed(c.width(), 2) << ' '
    << format_fixed(c.height(), 2) << "\">\n"
    << "<rect x=\"" << c.x(trace.header.room.min.x) << "\" y=\"" << c.y(trace.header.room.max.y) << "\" width=\""
    << c.len(trace.header.room.max.x - trace.header.room.min.x) << "\" height=\""
    << c.len(trace.header.room.max.y - trace.header.room.min.y)
    << "\" fill=\"#fafafa\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  const GoalSpec& g = trace.header.goal;
  o << "<circle cx=\"" << c.x(g.center.x) << "\" cy=\"" << c.y(g.center.y) << "\" r=\"" << c.len(g.radius)
    << "\" fill=\"#2ca02c\" fill-opacity=\"0.3\" stroke=\"#2ca02c\"/>\n";
  return o.str();
}

std::string render_workspace(const Trace& trace, const RenderOptions& opt) {
  const Canvas c(trace.header.room, opt.pixels_per_meter);
  std::ostringstream o;
  o << open_svg(c, trace);
  const auto frames = frames_of(trace);
  if (frames.empty()) {
    o << "</svg>\n";
    return o.str();
  }

  std::vector<std::size_t> picks;
  const int n = std::max(1, opt.snapshots);
  for (int k = 0; k < n; ++k) {
    const std::size_t idx = n == 1 ? frames.size() - 1 : (frames.size() - 1) * static_cast<std::size_t>(k) / (n - 1);
    if (picks.empty() || picks.back() != idx) picks.push_back(idx);
  }

  for (std::size_t pi = 0; pi < picks.size(); ++pi) {
    const bool last = pi + 1 == picks.size();
    const double opacity = last ? 1.0 : 0.15 + 0.5 * static_cast<double>(pi) / static_cast<double>(picks.size());
    const auto& frame = frames[picks[pi]].second;
    o << "<g id=\"snapshot-" << pi << "\" data-time=\"" << format_fixed(frames[picks[pi]].first, 3)
      << "\" opacity=\"" << format_fixed(opacity, 3) << "\">\n";
    for (const TraceBody& b : trace.header.bodies) {
      auto it = frame.find(b.id);
      if (it == frame.end()) continue;
      const Pose pose{it->second->position, it->second->orientation};
      o << c.shape(b.shape, pose, "fill=\"" + fill_for(b) + "\" stroke=\"#000000\" stroke-width=\"0.5\"");
      if (last) {
        for (const Part& p : b.parts)
          o << c.polygon(region_world_box(BodyState{pose.position, pose.orientation, {}, 0.0, -1}, p),
                         "fill=\"none\" stroke=\"#9467bd\" stroke-dasharray=\"4,2\"");
      }
    }
    o << "</g>\n";
  }

  const TraceBody* robot = nullptr;
  for (const TraceBody& b : trace.header.bodies)
    if (b.robot) robot = &b;
  if (robot) {
    std::string pts;
    for (const auto& [t, frame] : frames) {
      auto it = frame.find(robot->id);
      if (it == frame.end()) continue;
      if (!pts.empty()) pts += ' ';
      pts += c.pt(it->second->position);
    }
    o << "<polyline class=\"robot-path\" points=\"" << pts << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string render_tree(const Trace& trace, const RenderOptions& opt) {
  const Canvas c(trace.header.room, opt.pixels_per_meter);
  std::ostringstream o;
  o << open_svg(c, trace);
  const auto frames = frames_of(trace);
  if (!frames.empty()) {
    for (const TraceBody& b : trace.header.bodies) {
      if (b.robot) continue;
      auto it = frames.front().second.find(b.id);
      if (it == frames.front().second.end()) continue;
      o << c.shape(b.shape, {it->second->position, it->second->orientation},
                   "fill=\"" + fill_for(b) + "\" fill-opacity=\"0.4\" stroke=\"none\"");
    }
  }
  o << "<g class=\"tree\" stroke=\"#7f7f7f\" stroke-width=\"0.5\">\n";
  for (const TraceEdge& e : trace.edges)
    if (!e.on_path) o << c.line(e.from, e.to, "");
  o << "</g>\n<g class=\"solution\" stroke=\"#d62728\" stroke-width=\"2\">\n";
  for (const TraceEdge& e : trace.edges)
    if (e.on_path) o << c.line(e.from, e.to, "");
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace

std::string render_svg(const Trace& trace, RenderMode mode, const RenderOptions& options) {
  return mode == RenderMode::workspace ? render_workspace(trace, options) : render_tree(trace, options);
}

}  // namespace pushplan
