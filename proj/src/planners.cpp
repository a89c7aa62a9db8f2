#include "pushplan/planners.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pushplan {

const char* to_string(Algorithm a) { return a == Algorithm::rrt ? "rrt" : "kpiece"; }

Algorithm parse_algorithm(const std::string& name) {
  if (name == "rrt") return Algorithm::rrt;
  if (name == "kpiece") return Algorithm::kpiece;
  throw std::invalid_argument("unknown algorithm '" + name + "' (expected rrt or kpiece)");
}

void PlannerConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(goal_bias)) throw std::invalid_argument("goal_bias must lie in [0, 1]");
  if (!prob(kpiece_exterior_prob)) throw std::invalid_argument("kpiece_exterior_prob must lie in [0, 1]");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (controls.min_steps < 1 || controls.min_steps > controls.max_steps)
    throw std::invalid_argument("need 1 <= min_steps <= max_steps");
  if (!(controls.f_max >= 0.0)) throw std::invalid_argument("f_max must be non-negative");
  if (!(kpiece_cell_size > 0.0)) throw std::invalid_argument("kpiece_cell_size must be positive");
  if (check_interval < 1) throw std::invalid_argument("check_interval must be at least 1");
}

std::size_t select_node_rrt(const PlannerTree& tree, const Vec2& target) {
  if (tree.nodes.empty()) throw std::invalid_argument("select_node_rrt on an empty tree");
  std::size_t best = 0;
  double best_d = norm_sq(tree.robot_position(0) - target);
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const double d = norm_sq(tree.robot_position(i) - target);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// --- KPIECE grid -----------------------------------------------------------

std::pair<int, int> ProjectionGrid::coord_of(const Vec2& p) const {
  return {static_cast<int>(std::floor(p.x / cell_size_)), static_cast<int>(std::floor(p.y / cell_size_))};
}

const ProjectionCell* ProjectionGrid::find(std::pair<int, int> coord) const {
  auto it = index_.find(coord);
  return it == index_.end() ? nullptr : &cells_[it->second];
}

void ProjectionGrid::reclassify(std::size_t cell) {
  ProjectionCell& c = cells_[cell];
  if (c.classification == CellClass::interior) return;
  const auto [x, y] = c.coord;
  const bool surrounded = index_.contains({x + 1, y}) && index_.contains({x - 1, y}) &&
                          index_.contains({x, y + 1}) && index_.contains({x, y - 1});
  if (surrounded) {
    c.classification = CellClass::interior;
    ++interior_count_;
  }
}

void ProjectionGrid::add(std::size_t node, const Vec2& robot_position) {
  const auto coord = coord_of(robot_position);
  auto it = index_.find(coord);
  if (it != index_.end()) {
    cells_[it->second].nodes.push_back(node);
    return;
  }
  const std::size_t id = cells_.size();
  cells_.push_back({coord, {node}, CellClass::exterior, 0});
  index_.emplace(coord, id);
  reclassify(id);
  const auto [x, y] = coord;
  for (const auto& nb : {std::pair{x + 1, y}, std::pair{x - 1, y}, std::pair{x, y + 1}, std::pair{x, y - 1}})
    if (auto n = index_.find(nb); n != index_.end()) reclassify(n->second);
}

std::pair<std::size_t, std::size_t> ProjectionGrid::select(double exterior_prob, std::mt19937_64& rng) {
  if (cells_.empty()) throw std::invalid_argument("select on an empty projection grid");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CellClass want = unit(rng) < exterior_prob ? CellClass::exterior : CellClass::interior;
  const std::size_t exterior_count = cells_.size() - interior_count_;
  if (want == CellClass::exterior && exterior_count == 0) want = CellClass::interior;
  if (want == CellClass::interior && interior_count_ == 0) want = CellClass::exterior;

  std::size_t best = cells_.size();
  double best_score = -1.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const ProjectionCell& c = cells_[i];
    if (c.classification != want) continue;
    const double score =
        1.0 / ((1.0 + static_cast<double>(c.selection_count)) * static_cast<double>(c.nodes.size()));
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  ProjectionCell& chosen = cells_[best];
  std::uniform_int_distribution<std::size_t> pick(0, chosen.nodes.size() - 1);
  const std::size_t node = chosen.nodes[pick(rng)];
  ++chosen.selection_count;
  return {best, node};
}

// --- sampling --------------------------------------------------------------

Control sample_controls(const ControlBounds& bounds, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = bounds.f_max * std::sqrt(unit(rng));
  const double theta = 2.0 * std::numbers::pi * unit(rng);
  std::uniform_int_distribution<int> steps(bounds.min_steps, bounds.max_steps);
  Control u;
  u.force = {r * std::cos(theta), r * std::sin(theta)};
  u.duration_steps = steps(rng);
  return u;
}

namespace {

template <class TargetFn>
BiasDraw draw_target(TargetFn&& bias_target, double goal_bias, const Aabb& room, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < goal_bias) return {bias_target(), true};
  std::uniform_real_distribution<double> ux(room.min.x, room.max.x);
  std::uniform_real_distribution<double> uy(room.min.y, room.max.y);
  const double x = ux(rng);
  const double y = uy(rng);
  return {{x, y}, false};
}

}  // namespace

BiasDraw sample_bias_point(const Vec2& bias_target, double goal_bias, const Aabb& room, std::mt19937_64& rng) {
  return draw_target([&] { return bias_target; }, goal_bias, room, rng);
}

// --- paths -----------------------------------------------------------------

Path extract_path(const PlannerTree& tree, std::size_t goal_node) {
  if (goal_node >= tree.nodes.size()) throw std::out_of_range("goal node is not in the tree");
  std::vector<std::size_t> chain;
  for (std::optional<std::size_t> n = goal_node; n; n = tree.nodes[*n].parent) chain.push_back(*n);
  Path path;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const TreeNode& node = tree.nodes[*it];
    path.states.push_back(node.state);
    if (node.incoming_control) path.controls.push_back(*node.incoming_control);
  }
  path.node_count = tree.nodes.size();
  return path;
}

bool goal_satisfied(const KnowledgeBase& kb, const WorldState& q, bool require_clear_goal) {
  if (!goal_reached(q, kb.goal(), kb.robot_index())) return false;
  return !require_clear_goal || !kb.determine_goal_region(q).has_value();
}

// --- main loop -------------------------------------------------------------

PlanResult plan(const KnowledgeBase& kb, const World& scene, const PlannerConfig& config, const PlanHooks& hooks) {
  config.validate();
  if (kb.body_count() != scene.size() || kb.robot_index() != scene.robot_index())
    throw std::invalid_argument("knowledge base and scene disagree on the bodies");

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const Propagator prop(scene, kb, {config.controls, config.check_interval, config.knowledge_enabled});
  std::mt19937_64 rng(config.seed);

  PlanResult result;
  PlannerTree& tree = result.tree;
  tree.robot = scene.robot_index();
  {
    TreeNode root;
    root.state = prop.initial_state();
    root.kappa = prop.kappa_for(root.state);
    tree.nodes.push_back(std::move(root));
  }
  std::vector<Vec2> positions{tree.robot_position(0)};
  ProjectionGrid grid(config.kpiece_cell_size);
  if (config.algorithm == Algorithm::kpiece) grid.add(0, positions[0]);

  // Biased samples are steered by the knowledge of a reference node: the root
  // until the robot first stands in a valid region of the goal occupant, the
  // plain goal afterwards.
  bool entered_region = config.knowledge_enabled && tree.nodes[0].kappa.robot_in_occupant_region;
  const std::size_t reference = 0;

  auto finish = [&](std::optional<std::size_t> goal_node) {
    result.stats.wall_time_s = elapsed();
    result.stats.solved = goal_node.has_value();
    if (goal_node) {
      result.path = extract_path(tree, *goal_node);
      result.path->planning_time = result.stats.wall_time_s;
    }
    return std::move(result);
  };

  if (goal_satisfied(kb, tree.nodes[0].state, config.require_clear_goal)) return finish(0);

  std::uint64_t& iter = result.stats.iterations;
  while (true) {
    if (config.max_iterations != 0 && iter >= config.max_iterations) break;
    if (elapsed() >= config.t_max) break;
    ++iter;

    auto bias_target = [&]() -> Vec2 {
      if (!config.knowledge_enabled || entered_region) return kb.goal().center;
      return kb.update_instantiated(tree.nodes[reference].state, mix_seed(config.seed, iter)).bias_target;
    };
    const BiasDraw draw = draw_target(bias_target, config.goal_bias, kb.room(), rng);
    if (draw.biased && hooks.on_biased_sample) hooks.on_biased_sample({iter, draw.point, entered_region});

    std::size_t from;
    if (config.algorithm == Algorithm::rrt || draw.biased) {
      from = 0;
      double best = norm_sq(positions[0] - draw.point);
      for (std::size_t i = 1; i < positions.size(); ++i) {
        const double d = norm_sq(positions[i] - draw.point);
        if (d < best) {
          best = d;
          from = i;
        }
      }
    } else {
      from = grid.select(config.kpiece_exterior_prob, rng).second;
    }

    const Control u = sample_controls(config.controls, rng);
    PropagationOutcome out = prop.propagate(tree.nodes[from].state, u, tree.nodes[from].kappa);
    if (!out.valid) {
      ++result.stats.rejected_transitions;
      continue;
    }

    const std::size_t id = tree.nodes.size();
    tree.nodes.push_back({std::move(out.end_state), std::move(out.kappa_end), from, u});
    positions.push_back(tree.robot_position(id));
    if (config.algorithm == Algorithm::kpiece) grid.add(id, positions.back());

    const TreeNode& added = tree.nodes.back();
    if (config.knowledge_enabled && !entered_region && added.kappa.robot_in_occupant_region) {
      entered_region = true;
      result.stats.region_entry_iteration = iter;
    }
    if (goal_satisfied(kb, added.state, config.require_clear_goal)) return finish(id);
  }
  return finish(std::nullopt);
}

}  // namespace pushplan
