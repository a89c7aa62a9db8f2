#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pushplan/planners.hpp"
#include "pushplan/scene.hpp"

namespace pushplan {

// Trace files are newline-delimited JSON. The first record is a header
// describing the scene; then one "state" record per body per physics step of
// the solution (time, id, p, o, v, w, printed with 9 decimals); then one
// "edge" record per tree edge projected on the robot's (x, y).

struct TraceBody {
  std::string id;
  bool robot = false;
  Category category = Category::free_manipulatable;
  Shape shape;
  std::vector<Part> parts;
};

struct TraceHeader {
  Aabb room;
  GoalSpec goal;
  std::string algorithm;
  std::uint64_t seed = 0;
  bool knowledge_enabled = true;
  bool solved = false;
  std::vector<TraceBody> bodies;
};

struct TraceState {
  double time = 0.0;
  std::string id;
  Vec2 position;
  double orientation = 0.0;
  Vec2 linear_velocity;
  double angular_velocity = 0.0;
};

struct TraceEdge {
  Vec2 from;
  Vec2 to;
  bool on_path = false;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceState> states;
  std::vector<TraceEdge> edges;
};

class TraceError : public std::runtime_error {
 public:
  TraceError(std::size_t line, const std::string& what)
      : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

TraceHeader make_trace_header(const Scene& scene, const KnowledgeBase& kb, const PlannerConfig& config, bool solved);

/// Per-step world states of a path, re-simulated from its first state.
std::vector<WorldState> expand_path(const Propagator& prop, const Path& path);

void write_trace_header(std::ostream& out, const TraceHeader& header);
void write_trace_states(std::ostream& out, const World& scene, const std::vector<WorldState>& states);
/// Solution edges are those on the parent chain of `goal_node`.
void write_trace_edges(std::ostream& out, const PlannerTree& tree, std::optional<std::size_t> goal_node);

/// Writes a complete trace for one planner run.
void write_plan_trace(std::ostream& out, const Scene& scene, const KnowledgeBase& kb, const PlannerConfig& config,
                      const PlanResult& result);

Trace read_trace(std::istream& in);

/// Fixed-point rendering used by trace records.
std::string format_fixed(double v, int decimals = 9);

}  // namespace pushplan
