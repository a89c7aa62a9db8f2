#include "pushplan/transition.hpp"

#include <bit>
#include <cmath>

namespace pushplan {

WorldState capture_state(const World& world) {
  WorldState q;
  q.time = world.time();
  q.bodies.reserve(world.size());
  for (const RigidBody& b : world.bodies()) q.bodies.push_back(b.state);
  return q;
}

void load_state(World& world, const WorldState& q) {
  if (q.bodies.size() != world.size())
    throw std::invalid_argument("world state has " + std::to_string(q.bodies.size()) + " bodies, world has " +
                                std::to_string(world.size()));
  for (std::size_t i = 0; i < q.bodies.size(); ++i) world.set_state(i, q.bodies[i]);
  world.set_time(q.time);
}

bool transition_valid(const std::vector<ContactEvent>& contacts, const InstantiatedKnowledge& kappa,
                      std::size_t robot) {
  for (const ContactEvent& c : contacts) {
    if (c.body_a != robot && c.body_b != robot) continue;
    const std::size_t other = c.body_a == robot ? c.body_b : c.body_a;
    if (!kappa.collisionable[other]) return false;
  }
  return true;
}

bool goal_reached(const WorldState& q, const GoalSpec& goal, std::size_t robot) {
  return norm_sq(q.bodies[robot].position - goal.center) <= goal.radius * goal.radius;
}

namespace {

std::uint64_t state_seed(const WorldState& q) {
  const Vec2 p = q.bodies.empty() ? Vec2{} : q.bodies.front().position;
  return mix_seed(std::bit_cast<std::uint64_t>(q.time),
                  mix_seed(std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y)));
}

}  // namespace

Propagator::Propagator(const World& world_template, const KnowledgeBase& kb, PropagatorOptions options)
    : template_(world_template), kb_(&kb), options_(options) {
  if (kb.body_count() != template_.size())
    throw TransitionError(TransitionErrc::id_mismatch, "knowledge base is bound to a different scene");
  if (options_.check_interval < 1) options_.check_interval = 1;
}

InstantiatedKnowledge Propagator::kappa_for(const WorldState& q) const {
  return options_.knowledge_enabled ? kb_->update_instantiated(q, state_seed(q)) : kb_->inert(q);
}

void Propagator::check_control(const Control& u) const {
  const ControlBounds& b = options_.bounds;
  if (u.duration_steps < b.min_steps || u.duration_steps > b.max_steps)
    throw TransitionError(TransitionErrc::control_out_of_bounds, "control duration outside [min_steps, max_steps]");
  if (!std::isfinite(u.force.x) || !std::isfinite(u.force.y) || norm(u.force) > b.f_max * (1.0 + 1e-12))
    throw TransitionError(TransitionErrc::control_out_of_bounds, "control force exceeds f_max");
}

World Propagator::prepared(const WorldState& q) const {
  if (q.bodies.size() != template_.size())
    throw TransitionError(TransitionErrc::id_mismatch, "world state does not match the scene's bodies");
  World w = template_;
  load_state(w, q);
  return w;
}

void Propagator::apply_pins(World& w, const InstantiatedKnowledge& kappa) const {
  if (!options_.knowledge_enabled) return;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.body(i).category == Category::fixed) continue;
    w.set_pinned(i, kappa.effective_category[i] == Category::fixed);
  }
}

PropagationOutcome Propagator::run(const WorldState& q, const Control& u, const InstantiatedKnowledge& kappa_in,
                                   std::vector<WorldState>* trajectory) const {
  check_control(u);
  World w = prepared(q);
  const std::size_t robot = w.robot_index();
  const std::size_t n = w.size();

  InstantiatedKnowledge kappa = kappa_in;
  apply_pins(w, kappa);
  auto refresh = [&] {
    kappa = kappa_for(capture_state(w));
    apply_pins(w, kappa);
  };

  // Bodies whose contact with the robot began while legal; the contact stays
  // legal for as long as it persists.
  std::vector<std::uint8_t> engaged(n, 0);
  std::vector<std::uint8_t> touching(n, 0);

  PropagationOutcome out;
  for (int s = 1; s <= u.duration_steps; ++s) {
    out.contacts = step_in_place(w, u.force);
    out.steps_simulated = s;
    if (trajectory) trajectory->push_back(capture_state(w));

    if (options_.knowledge_enabled && s % options_.check_interval == 0) refresh();

    std::fill(touching.begin(), touching.end(), 0);
    bool refreshed = false;
    for (const ContactEvent& c : out.contacts) {
      if (c.body_a != robot && c.body_b != robot) continue;
      const std::size_t other = c.body_a == robot ? c.body_b : c.body_a;
      touching[other] = 1;
      if (engaged[other]) continue;
      if (!kappa.collisionable[other] && options_.knowledge_enabled && !refreshed) {
        refresh();
        refreshed = true;
      }
      if (kappa.collisionable[other]) {
        engaged[other] = 1;
        continue;
      }
      out.valid = false;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!touching[i]) engaged[i] = 0;
    if (!out.valid) break;
  }

  out.end_state = capture_state(w);
  out.kappa_end = kappa_for(out.end_state);
  return out;
}

PropagationOutcome Propagator::propagate(const WorldState& q, const Control& u,
                                         const InstantiatedKnowledge& kappa) const {
  return run(q, u, kappa, nullptr);
}

PropagationOutcome Propagator::propagate_recorded(const WorldState& q, const Control& u,
                                                  const InstantiatedKnowledge& kappa,
                                                  std::vector<WorldState>& trajectory) const {
  return run(q, u, kappa, &trajectory);
}

std::vector<WorldState> replay(const Propagator& prop, const WorldState& q_init, const std::vector<Control>& controls) {
  std::vector<WorldState> states{q_init};
  for (const Control& u : controls) {
    const WorldState& q = states.back();
    states.push_back(prop.propagate(q, u, prop.kappa_for(q)).end_state);
  }
  return states;
}

}  // namespace pushplan
