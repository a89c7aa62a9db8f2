#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pushplan/geometry.hpp"
#include "pushplan/physics2d.hpp"
#include "pushplan/world_state.hpp"

namespace pushplan {

struct GoalSpec {
  Vec2 center;
  double radius = 0.0;
};

enum class DeclaredType { fixed, manipulatable };
enum class ManipType { none, free, constraint_oriented };

struct ElementSpec {
  std::string name;
  std::string action;
  std::optional<std::size_t> region_ref;  ///< index into ObjectSpec::parts
};

struct ObjectSpec {
  std::string id;
  DeclaredType declared_type = DeclaredType::manipulatable;
  bool wheel_drive = false;
  std::optional<Vec2> allowed_axis;
  std::string mass_class;
  std::vector<Part> parts;
  std::vector<ElementSpec> elements;
};

enum class RegionKind { manipulation, object, goal };

struct RegionDescriptor {
  RegionKind kind = RegionKind::manipulation;
  std::string object_id;  ///< empty for the goal region
  std::string element;    ///< manipulation regions only
};

/// Static description of the task: what the bodies are, how they may be
/// manipulated, and where the robot starts and has to go.
struct AbstractKnowledge {
  Vec2 initial_state;
  GoalSpec goal;
  std::vector<std::string> actions;
  std::vector<ObjectSpec> objects;
  std::vector<RegionDescriptor> regions;
  std::vector<std::string> warnings;

  const ObjectSpec* find(const std::string& id) const;
  bool has_action(const std::string& action) const;
};

enum class KnowledgeErrc { parse, dangling_region, unknown_action, unknown_object, invalid_value };

class KnowledgeError : public std::runtime_error {
 public:
  KnowledgeError(KnowledgeErrc code, std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), code_(code), path_(std::move(path)) {}
  KnowledgeErrc code() const { return code_; }
  const std::string& path() const { return path_; }

 private:
  KnowledgeErrc code_;
  std::string path_;
};

AbstractKnowledge parse_abstract_knowledge(const std::string& json_text);
AbstractKnowledge load_abstract_knowledge(const std::string& path);
std::string serialize_abstract_knowledge(const AbstractKnowledge& k);

/// Constraint described by a constraint-oriented object, in the form the
/// physics engine consumes. nullopt for other objects.
std::optional<ManipulationConstraint> constraint_of(const ObjectSpec& obj);

/// Dynamic facts inferred from the abstract knowledge for one world state.
/// All per-body vectors are indexed like the scene's bodies.
struct InstantiatedKnowledge {
  std::vector<std::uint8_t> collisionable;
  std::vector<std::vector<std::uint8_t>> region_valid;  ///< per body, per part
  std::vector<Category> effective_category;
  std::optional<std::size_t> goal_occupant;
  Vec2 bias_target;
  /// True when the robot sits in a valid region of the goal occupant.
  bool robot_in_occupant_region = false;
  double timestamp = 0.0;

  friend bool operator==(const InstantiatedKnowledge&, const InstantiatedKnowledge&) = default;
};

struct Classification {
  DeclaredType obj_type;
  ManipType manip_type;
  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Reasoner over a fixed abstract knowledge base bound to one scene. All
/// queries are const and safe to call concurrently.
class KnowledgeBase {
 public:
  /// Binds `k` to the bodies of `scene`. Throws KnowledgeError(unknown_object)
  /// when an object has no body of the same id.
  KnowledgeBase(AbstractKnowledge k, const World& scene, const Aabb& room);

  const AbstractKnowledge& abstract() const { return k_; }
  const Aabb& room() const { return room_; }
  const GoalSpec& goal() const { return k_.goal; }
  std::size_t robot_index() const { return robot_; }
  std::size_t body_count() const { return bodies_.size(); }
  std::size_t index_of(const std::string& id) const;

  Classification object_classification(const std::string& obj) const;
  std::vector<std::pair<std::string, std::string>> action_type(const std::string& obj) const;
  std::optional<std::size_t> determine_goal_region(const WorldState& q) const;
  bool valid_region(const WorldState& q, const std::string& obj, const std::string& element) const;

  InstantiatedKnowledge update_instantiated(const WorldState& q, std::uint64_t rng_seed) const;

  /// Knowledge used when reasoning is switched off: every movable body is
  /// collisionable, nothing is demoted and the bias stays on the goal.
  InstantiatedKnowledge inert(const WorldState& q) const;

  /// World-frame manipulation regions of body `i` at state q (empty unless
  /// constraint-oriented).
  std::vector<OrientedBox> regions_of(const WorldState& q, std::size_t i) const;

 private:
  struct BoundBody {
    std::string id;
    Shape shape;
    Category category;
    bool is_robot;
    int spec = -1;  ///< index into k_.objects, -1 for bodies not described in K
  };

  bool region_valid_at(const WorldState& q, std::size_t body, const Part& part) const;
  bool robot_inside(const WorldState& q, const OrientedBox& region) const;

  AbstractKnowledge k_;
  Aabb room_;
  std::vector<BoundBody> bodies_;
  std::vector<std::vector<Part>> parts_;  ///< constraint parts per body
  std::size_t robot_ = 0;
};

/// Derives a per-call seed for the bias-target generator.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace pushplan
