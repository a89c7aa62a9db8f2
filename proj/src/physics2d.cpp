#include "pushplan/physics2d.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace pushplan {

const char* to_string(Category c) {
  switch (c) {
    case Category::fixed: return "fixed";
    case Category::free_manipulatable: return "free_manipulatable";
    case Category::constraint_oriented: return "constraint_oriented";
  }
  return "?";
}

void ManipulationConstraint::validate() const {
  if (std::abs(norm(allowed_axis) - 1.0) > 1e-12)
    throw std::invalid_argument("allowed_axis must be a unit vector");
  if (parts.empty()) throw std::invalid_argument("manipulation constraint needs at least one part");
  for (const Part& p : parts) {
    if (std::abs(norm(p.push_direction) - 1.0) > 1e-9)
      throw std::invalid_argument("push_direction of part '" + p.name + "' must be a unit vector");
    if (std::abs(cross(p.push_direction, allowed_axis)) > 1e-9)
      throw std::invalid_argument("push_direction of part '" + p.name + "' is not parallel to allowed_axis");
    if (!(p.region_half_extents.x > 0.0 && p.region_half_extents.y > 0.0))
      throw std::invalid_argument("region of part '" + p.name + "' must have positive half extents");
  }
}

const Part* ManipulationConstraint::find_part(const std::string& name) const {
  for (const Part& p : parts)
    if (p.name == name) return &p;
  return nullptr;
}

double moment_of_inertia(const Shape& shape, double mass) {
  if (const auto* c = std::get_if<Circle>(&shape)) return 0.5 * mass * c->radius * c->radius;
  const Vec2 h = std::get<Box>(shape).half_extents;
  return mass * (h.x * h.x + h.y * h.y) / 3.0;
}

RigidBody make_body(std::string id, Shape shape, double mass, Category category, Pose pose,
                    std::optional<ManipulationConstraint> constraint, bool is_robot) {
  RigidBody b;
  b.id = std::move(id);
  b.shape = shape;
  b.category = category;
  b.is_robot = is_robot;
  if (category == Category::fixed) {
    b.mass = kInfiniteMass;
    b.inertia = kInfiniteMass;
  } else {
    b.mass = mass;
    b.inertia = moment_of_inertia(shape, mass);
  }
  b.state.position = pose.position;
  b.state.orientation = wrap_angle(pose.orientation);
  b.constraint = std::move(constraint);
  return b;
}

World make_world(std::vector<RigidBody> bodies, const PhysicsParams& params) {
  World w;
  w.params_ = params;
  std::unordered_set<std::string> ids;
  int robots = 0;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    RigidBody& b = bodies[i];
    if (!ids.insert(b.id).second) throw WorldError(WorldErrc::duplicate_id, "duplicate body id '" + b.id + "'");
    try {
      validate_shape(b.shape);
    } catch (const std::invalid_argument& e) {
      throw WorldError(WorldErrc::bad_shape, "body '" + b.id + "': " + e.what());
    }
    if (b.is_robot) {
      ++robots;
      w.robot_ = i;
    }
    const bool infinite = std::isinf(b.mass) && std::isinf(b.inertia);
    if (b.category == Category::fixed) {
      if (!infinite) throw WorldError(WorldErrc::bad_mass, "fixed body '" + b.id + "' must have infinite mass");
      b.state.linear_velocity = {};
      b.state.angular_velocity = 0.0;
    } else if (!(b.mass > 0.0) || !std::isfinite(b.mass) || !(b.inertia > 0.0) || !std::isfinite(b.inertia)) {
      throw WorldError(WorldErrc::bad_mass, "body '" + b.id + "' needs a positive finite mass");
    }
    if (b.category == Category::constraint_oriented) {
      if (!b.constraint)
        throw WorldError(WorldErrc::bad_constraint, "constraint-oriented body '" + b.id + "' has no constraint");
      try {
        b.constraint->validate();
      } catch (const std::invalid_argument& e) {
        throw WorldError(WorldErrc::bad_constraint, "body '" + b.id + "': " + e.what());
      }
      b.state.constraint_ref = static_cast<int>(w.constraints_.size());
      w.constraints_.push_back(*b.constraint);
    } else {
      if (b.constraint)
        throw WorldError(WorldErrc::bad_constraint, "only constraint-oriented bodies carry a constraint ('" + b.id + "')");
      b.state.constraint_ref = -1;
    }
    b.state.orientation = wrap_angle(b.state.orientation);
  }
  if (robots != 1)
    throw WorldError(WorldErrc::robot_count, "a world needs exactly one robot, got " + std::to_string(robots));
  w.bodies_ = std::move(bodies);
  w.pinned_.assign(w.bodies_.size(), false);
  return w;
}

std::optional<std::size_t> World::find(const std::string& id) const {
  for (std::size_t i = 0; i < bodies_.size(); ++i)
    if (bodies_[i].id == id) return i;
  return std::nullopt;
}

void World::set_state(std::size_t i, const BodyState& s) {
  const int ref = bodies_[i].state.constraint_ref;
  bodies_[i].state = s;
  bodies_[i].state.constraint_ref = ref;
}

double World::inverse_mass(std::size_t i) const { return immobile(i) ? 0.0 : 1.0 / bodies_[i].mass; }

double World::inverse_inertia(std::size_t i) const {
  if (immobile(i) || bodies_[i].category == Category::constraint_oriented) return 0.0;
  return 1.0 / bodies_[i].inertia;
}

const ManipulationConstraint* World::constraint(std::size_t i) const {
  const int ref = bodies_[i].state.constraint_ref;
  return ref < 0 ? nullptr : &constraints_[static_cast<std::size_t>(ref)];
}

std::vector<ContactEvent> detect_contacts(const World& world) {
  std::vector<ContactEvent> contacts;
  const auto& bodies = world.bodies();
  std::vector<Aabb> boxes;
  boxes.reserve(bodies.size());
  for (const auto& b : bodies) boxes.push_back(bounding_box(b.shape, b.state.pose()));

  for (std::size_t i = 0; i < bodies.size(); ++i) {
    for (std::size_t j = i + 1; j < bodies.size(); ++j) {
      if (world.immobile(i) && world.immobile(j)) continue;
      const Aabb& a = boxes[i];
      const Aabb& b = boxes[j];
      if (a.max.x < b.min.x || b.max.x < a.min.x || a.max.y < b.min.y || b.max.y < a.min.y) continue;
      Overlap o;
      if (!collide(bodies[i].shape, bodies[i].state.pose(), bodies[j].shape, bodies[j].state.pose(), o)) continue;
      contacts.push_back({i, j, o.point, o.normal, o.penetration, 0.0});
    }
  }
  return contacts;
}

namespace {

// Velocity response of one body to a unit impulse along `dir` applied at
// offset `r`, projected back onto `dir`.
double response(const World& w, std::size_t i, const Vec2& r, const Vec2& dir) {
  const double inv_m = w.inverse_mass(i);
  if (inv_m == 0.0) return 0.0;
  if (const auto* c = w.constraint(i)) {
    const Vec2 axis = rotate(c->allowed_axis, w.body(i).state.orientation);
    const double along = dot(axis, dir);
    return along * along * inv_m;
  }
  const double rn = cross(r, dir);
  return inv_m + rn * rn * w.inverse_inertia(i);
}

void apply_impulse(const World& w, BodyState& s, std::size_t i, const Vec2& r, const Vec2& impulse) {
  const double inv_m = w.inverse_mass(i);
  if (inv_m == 0.0) return;
  if (const auto* c = w.constraint(i)) {
    const Vec2 axis = rotate(c->allowed_axis, s.orientation);
    s.linear_velocity += axis * (dot(axis, impulse) * inv_m);
    return;
  }
  s.linear_velocity += impulse * inv_m;
  s.angular_velocity += cross(r, impulse) * w.inverse_inertia(i);
}

Vec2 point_velocity(const BodyState& s, const Vec2& r) { return s.linear_velocity + cross(s.angular_velocity, r); }

struct SolverContact {
  Vec2 ra, rb, tangent;
  double normal_mass = 0.0;
  double tangent_mass = 0.0;
  double bias = 0.0;
  double jn = 0.0;
  double jt = 0.0;
};

}  // namespace

void resolve_contacts_in_place(World& world, std::vector<ContactEvent>& contacts) {
  const PhysicsParams& p = world.params();
  auto& bodies = world.bodies_;
  std::vector<SolverContact> sc(contacts.size());

  for (std::size_t k = 0; k < contacts.size(); ++k) {
    const ContactEvent& c = contacts[k];
    SolverContact& s = sc[k];
    const BodyState& a = bodies[c.body_a].state;
    const BodyState& b = bodies[c.body_b].state;
    s.ra = c.point - a.position;
    s.rb = c.point - b.position;
    s.tangent = perp(c.normal);
    const double kn = response(world, c.body_a, s.ra, c.normal) + response(world, c.body_b, s.rb, c.normal);
    const double kt = response(world, c.body_a, s.ra, s.tangent) + response(world, c.body_b, s.rb, s.tangent);
    s.normal_mass = kn > 0.0 ? 1.0 / kn : 0.0;
    s.tangent_mass = kt > 0.0 ? 1.0 / kt : 0.0;
    const double vn = dot(point_velocity(b, s.rb) - point_velocity(a, s.ra), c.normal);
    const double bounce = vn < 0.0 ? -p.restitution * vn : 0.0;
    const double push_out = p.baumgarte / p.dt * std::max(0.0, c.penetration - p.slop);
    s.bias = std::max(bounce, push_out);
  }

  for (int iter = 0; iter < p.solver_iters; ++iter) {
    for (std::size_t k = 0; k < contacts.size(); ++k) {
      const ContactEvent& c = contacts[k];
      SolverContact& s = sc[k];
      if (s.normal_mass == 0.0) continue;
      BodyState& a = bodies[c.body_a].state;
      BodyState& b = bodies[c.body_b].state;

      // Friction first so the normal impulse has the final word on separation.
      if (s.tangent_mass > 0.0 && p.friction > 0.0) {
        const double vt = dot(point_velocity(b, s.rb) - point_velocity(a, s.ra), s.tangent);
        const double max_f = p.friction * s.jn;
        const double jt_new = std::clamp(s.jt - vt * s.tangent_mass, -max_f, max_f);
        const double d = jt_new - s.jt;
        s.jt = jt_new;
        apply_impulse(world, a, c.body_a, s.ra, s.tangent * -d);
        apply_impulse(world, b, c.body_b, s.rb, s.tangent * d);
      }

      const double vn = dot(point_velocity(b, s.rb) - point_velocity(a, s.ra), c.normal);
      const double jn_new = std::max(0.0, s.jn + (s.bias - vn) * s.normal_mass);
      const double d = jn_new - s.jn;
      s.jn = jn_new;
      apply_impulse(world, a, c.body_a, s.ra, c.normal * -d);
      apply_impulse(world, b, c.body_b, s.rb, c.normal * d);
    }
  }

  for (std::size_t k = 0; k < contacts.size(); ++k) contacts[k].applied_impulse = sc[k].jn;

  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (world.immobile(i)) {
      if (bodies[i].category != Category::fixed) {
        bodies[i].state.linear_velocity = {};
        bodies[i].state.angular_velocity = 0.0;
      }
      continue;
    }
    if (const auto* c = world.constraint(i)) bodies[i].state = enforce_motion_constraint(bodies[i].state, *c);
  }
}

World resolve_contacts(const World& world, std::vector<ContactEvent>& contacts) {
  World out = world;
  resolve_contacts_in_place(out, contacts);
  return out;
}

BodyState enforce_motion_constraint(const BodyState& state, const ManipulationConstraint& constraint) {
  BodyState out = state;
  const Vec2 axis = rotate(constraint.allowed_axis, state.orientation);
  out.linear_velocity = axis * dot(axis, state.linear_velocity);
  out.angular_velocity = 0.0;
  return out;
}

std::vector<ContactEvent> step_in_place(World& world, const Vec2& robot_force) {
  if (!std::isfinite(robot_force.x) || !std::isfinite(robot_force.y))
    throw WorldError(WorldErrc::bad_force, "robot force must be finite");
  const PhysicsParams& p = world.params();
  auto& bodies = world.bodies_;

  RigidBody& robot = bodies[world.robot_];
  if (!world.immobile(world.robot_)) robot.state.linear_velocity += robot_force * (p.dt / robot.mass);

  const double keep = 1.0 - p.damping * p.dt;
  for (std::size_t i = 0; i < bodies.size(); ++i)
    if (!world.immobile(i)) bodies[i].state.linear_velocity *= keep;

  std::vector<ContactEvent> contacts = detect_contacts(world);
  resolve_contacts_in_place(world, contacts);

  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (world.immobile(i)) continue;
    BodyState& s = bodies[i].state;
    if (const auto* c = world.constraint(i)) s = enforce_motion_constraint(s, *c);
    s.position += s.linear_velocity * p.dt;
    s.orientation = wrap_angle(s.orientation + s.angular_velocity * p.dt);
  }
  world.time_ += p.dt;
  return contacts;
}

StepResult step(const World& world, const Vec2& robot_force, double dt) {
  if (dt != world.params().dt) throw WorldError(WorldErrc::bad_dt, "step size must equal the world's fixed dt");
  StepResult r{world, {}};
  r.contacts = step_in_place(r.world, robot_force);
  return r;
}

OrientedBox region_world_box(const BodyState& state, const Part& part) {
  return {state.position + rotate(part.region_offset, state.orientation), state.orientation,
          part.region_half_extents};
}

OrientedBox region_world_box(const RigidBody& body, const Part& part) {
  if (body.category != Category::constraint_oriented || !body.constraint)
    throw std::invalid_argument("body '" + body.id + "' is not constraint-oriented");
  bool owned = false;
  for (const Part& p : body.constraint->parts) owned = owned || &p == &part || p.name == part.name;
  if (!owned) throw std::invalid_argument("part '" + part.name + "' is not owned by body '" + body.id + "'");
  return region_world_box(body.state, part);
}

}  // namespace pushplan
