#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pushplan/knowledge.hpp"
#include "pushplan/transition.hpp"

namespace pushplan {

enum class Algorithm { rrt, kpiece };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct PlannerConfig {
  double t_max = 60.0;
  double goal_bias = 0.05;
  ControlBounds controls;
  double kpiece_cell_size = 0.25;
  double kpiece_exterior_prob = 0.75;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::rrt;
  bool knowledge_enabled = true;
  int check_interval = 5;
  /// Goal states must also leave the goal disc clear of other bodies.
  bool require_clear_goal = true;
  /// Hard cap on loop iterations; 0 means unlimited (wall clock only).
  std::uint64_t max_iterations = 0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct TreeNode {
  WorldState state;
  InstantiatedKnowledge kappa;
  std::optional<std::size_t> parent;
  std::optional<Control> incoming_control;
};

/// Flat tree; node indices follow insertion order.
struct PlannerTree {
  std::vector<TreeNode> nodes;
  std::size_t robot = 0;

  Vec2 robot_position(std::size_t i) const { return nodes[i].state.bodies[robot].position; }
};

/// Index of the node whose robot is closest to `target`; ties go to the
/// earliest inserted node.
std::size_t select_node_rrt(const PlannerTree& tree, const Vec2& target);

enum class CellClass { exterior, interior };

struct ProjectionCell {
  std::pair<int, int> coord;
  std::vector<std::size_t> nodes;
  CellClass classification = CellClass::exterior;
  std::uint64_t selection_count = 0;
};

/// KPIECE-style grid over the robot's (x, y).
class ProjectionGrid {
 public:
  explicit ProjectionGrid(double cell_size) : cell_size_(cell_size) {}

  std::pair<int, int> coord_of(const Vec2& p) const;
  void add(std::size_t node, const Vec2& robot_position);

  bool empty() const { return cells_.empty(); }
  std::size_t size() const { return cells_.size(); }
  const std::vector<ProjectionCell>& cells() const { return cells_; }
  std::size_t interior_count() const { return interior_count_; }
  const ProjectionCell* find(std::pair<int, int> coord) const;

  /// Picks a class (exterior with `exterior_prob`, falling back to whichever
  /// class is non-empty), then the cell with the best
  /// 1 / ((1 + selections) * coverage) score, then a uniform node of it.
  /// Bumps the cell's selection count.
  std::pair<std::size_t, std::size_t> select(double exterior_prob, std::mt19937_64& rng);

 private:
  void reclassify(std::size_t cell);

  double cell_size_;
  std::vector<ProjectionCell> cells_;
  std::map<std::pair<int, int>, std::size_t> index_;
  std::size_t interior_count_ = 0;
};

/// Uniform force in the disc of radius f_max, uniform integer duration.
Control sample_controls(const ControlBounds& bounds, std::mt19937_64& rng);

struct BiasDraw {
  Vec2 point;
  bool biased = false;
};

/// With probability goal_bias returns `bias_target`, otherwise a uniform
/// point of `room`.
BiasDraw sample_bias_point(const Vec2& bias_target, double goal_bias, const Aabb& room, std::mt19937_64& rng);

struct Path {
  std::vector<WorldState> states;
  std::vector<Control> controls;
  double planning_time = 0.0;
  std::size_t node_count = 0;
};

/// Throws std::out_of_range when the node is not part of the tree.
Path extract_path(const PlannerTree& tree, std::size_t goal_node);

struct PlannerStats {
  bool solved = false;
  std::uint64_t iterations = 0;
  std::uint64_t rejected_transitions = 0;
  double wall_time_s = 0.0;
  /// Iteration at which the robot first reached a valid region of the goal
  /// occupant, if it did.
  std::optional<std::uint64_t> region_entry_iteration;
};

struct BiasObservation {
  std::uint64_t iteration = 0;
  Vec2 target;
  /// Set once a node with the robot inside a valid region of the goal
  /// occupant has been inserted.
  bool after_region_entry = false;
};

struct PlanResult {
  std::optional<Path> path;
  PlannerStats stats;
  PlannerTree tree;
};

struct PlanHooks {
  std::function<void(const BiasObservation&)> on_biased_sample;
};

/// A goal state has the robot inside the goal disc and, when
/// `require_clear_goal`, no other body intersecting it.
bool goal_satisfied(const KnowledgeBase& kb, const WorldState& q, bool require_clear_goal);

/// The sampling-based planning loop with RRT or KPIECE node selection.
PlanResult plan(const KnowledgeBase& kb, const World& scene, const PlannerConfig& config, const PlanHooks& hooks = {});

}  // namespace pushplan
