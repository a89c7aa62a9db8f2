#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pushplan/geometry.hpp"

namespace pushplan {

inline constexpr double kInfiniteMass = std::numeric_limits<double>::infinity();

enum class Category { fixed, free_manipulatable, constraint_oriented };

const char* to_string(Category c);

/// Kinematic state of one body. `constraint_ref` indexes the owning world's
/// constraint table and is -1 for bodies without one.
struct BodyState {
  Vec2 position;
  double orientation = 0.0;
  Vec2 linear_velocity;
  double angular_velocity = 0.0;
  int constraint_ref = -1;

  Pose pose() const { return {position, orientation}; }
  friend bool operator==(const BodyState&, const BodyState&) = default;
};

/// A pushable part of a constraint-oriented body and the body-frame box the
/// robot has to occupy to push it.
struct Part {
  std::string name;
  Vec2 push_direction;
  Vec2 region_offset;
  Vec2 region_half_extents;
};

struct ManipulationConstraint {
  Vec2 allowed_axis{1.0, 0.0};
  std::vector<Part> parts;

  /// Throws std::invalid_argument on a non-unit axis, an empty part list or a
  /// push direction that is not parallel to the axis.
  void validate() const;
  const Part* find_part(const std::string& name) const;
};

struct RigidBody {
  std::string id;
  Shape shape;
  double mass = 1.0;
  double inertia = 1.0;
  Category category = Category::free_manipulatable;
  bool is_robot = false;
  BodyState state;
  std::optional<ManipulationConstraint> constraint;
};

/// Mass and inertia of a body; fixed bodies get the infinite sentinel.
RigidBody make_body(std::string id, Shape shape, double mass, Category category, Pose pose,
                    std::optional<ManipulationConstraint> constraint = std::nullopt,
                    bool is_robot = false);

double moment_of_inertia(const Shape& shape, double mass);

struct PhysicsParams {
  double dt = 0.01;
  int solver_iters = 8;
  double restitution = 0.0;
  double friction = 0.5;
  double damping = 0.1;
  double baumgarte = 0.2;
  double slop = 1e-3;
};

struct ContactEvent {
  std::size_t body_a = 0;
  std::size_t body_b = 0;
  Vec2 point;
  Vec2 normal;
  double penetration = 0.0;
  double applied_impulse = 0.0;
};

enum class WorldErrc { duplicate_id, robot_count, bad_mass, bad_shape, bad_constraint, bad_force, bad_dt };

class WorldError : public std::runtime_error {
 public:
  WorldError(WorldErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  WorldErrc code() const { return code_; }

 private:
  WorldErrc code_;
};

/// A set of rigid bodies plus fixed simulation parameters. Worlds are plain
/// values: copying one gives an independent simulation.
class World {
 public:
  const PhysicsParams& params() const { return params_; }
  const std::vector<RigidBody>& bodies() const { return bodies_; }
  std::size_t size() const { return bodies_.size(); }
  const RigidBody& body(std::size_t i) const { return bodies_[i]; }
  std::size_t robot_index() const { return robot_; }
  std::optional<std::size_t> find(const std::string& id) const;
  double time() const { return time_; }

  void set_time(double t) { time_ = t; }
  void set_state(std::size_t i, const BodyState& s);

  /// Pinned bodies behave as infinite-mass colliders until unpinned.
  void set_pinned(std::size_t i, bool pinned) { pinned_[i] = pinned; }
  bool pinned(std::size_t i) const { return pinned_[i]; }

  double inverse_mass(std::size_t i) const;
  double inverse_inertia(std::size_t i) const;
  bool immobile(std::size_t i) const {
    return bodies_[i].category == Category::fixed || pinned_[i];
  }

  /// Constraint of body i, or nullptr.
  const ManipulationConstraint* constraint(std::size_t i) const;

  friend World make_world(std::vector<RigidBody> bodies, const PhysicsParams& params);
  friend void resolve_contacts_in_place(World& world, std::vector<ContactEvent>& contacts);
  friend std::vector<ContactEvent> step_in_place(World& world, const Vec2& robot_force);

 private:
  PhysicsParams params_;
  std::vector<RigidBody> bodies_;
  std::vector<ManipulationConstraint> constraints_;
  std::vector<bool> pinned_;
  std::size_t robot_ = 0;
  double time_ = 0.0;
};

World make_world(std::vector<RigidBody> bodies, const PhysicsParams& params = {});

/// All overlapping pairs (i < j) in body order, normal from i to j. Pairs of
/// two immobile bodies are skipped since nothing can resolve them.
std::vector<ContactEvent> detect_contacts(const World& world);

/// Sequential-impulse solve with restitution, Coulomb friction and a
/// Baumgarte position bias. Fills `applied_impulse` on each contact.
void resolve_contacts_in_place(World& world, std::vector<ContactEvent>& contacts);
World resolve_contacts(const World& world, std::vector<ContactEvent>& contacts);

/// Removes the velocity component off the world-frame allowed axis and all
/// rotation.
BodyState enforce_motion_constraint(const BodyState& state, const ManipulationConstraint& constraint);

/// One semi-implicit Euler step of `params().dt` seconds: robot force,
/// damping, contacts, constraints, then positions.
std::vector<ContactEvent> step_in_place(World& world, const Vec2& robot_force);

struct StepResult {
  World world;
  std::vector<ContactEvent> contacts;
};

/// Value form of step_in_place. `dt` must equal the world's fixed step.
StepResult step(const World& world, const Vec2& robot_force, double dt);

/// World-frame box of a part's manipulation region.
OrientedBox region_world_box(const RigidBody& body, const Part& part);
OrientedBox region_world_box(const BodyState& state, const Part& part);

}  // namespace pushplan
