#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pushplan/knowledge.hpp"
#include "pushplan/physics2d.hpp"
#include "pushplan/world_state.hpp"

namespace pushplan {

struct Control {
  Vec2 force;
  int duration_steps = 1;
  friend bool operator==(const Control&, const Control&) = default;
};

struct ControlBounds {
  double f_max = 10.0;
  int min_steps = 10;
  int max_steps = 50;
  friend bool operator==(const ControlBounds&, const ControlBounds&) = default;
};

struct PropagationOutcome {
  WorldState end_state;
  bool valid = true;
  /// Contacts of the step that invalidated the transition, or of the last
  /// simulated step when it stayed valid.
  std::vector<ContactEvent> contacts;
  InstantiatedKnowledge kappa_end;
  int steps_simulated = 0;
};

struct PropagatorOptions {
  ControlBounds bounds;
  /// Physics steps between knowledge re-evaluations.
  int check_interval = 5;
  bool knowledge_enabled = true;
};

enum class TransitionErrc { id_mismatch, control_out_of_bounds };

class TransitionError : public std::runtime_error {
 public:
  TransitionError(TransitionErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  TransitionErrc code() const { return code_; }

 private:
  TransitionErrc code_;
};

/// False iff some contact pairs the robot with a non-collisionable body.
bool transition_valid(const std::vector<ContactEvent>& contacts, const InstantiatedKnowledge& kappa,
                      std::size_t robot);

/// Robot centre inside the closed goal disc.
bool goal_reached(const WorldState& q, const GoalSpec& goal, std::size_t robot);

/// Knowledge-aware state propagator. Holds the scene template and the
/// reasoner; every call works on its own copy of the template, so one
/// Propagator may serve several threads.
class Propagator {
 public:
  Propagator(const World& world_template, const KnowledgeBase& kb, PropagatorOptions options);

  const World& world_template() const { return template_; }
  const KnowledgeBase& knowledge() const { return *kb_; }
  const PropagatorOptions& options() const { return options_; }
  WorldState initial_state() const { return capture_state(template_); }

  /// Knowledge for state q: reasoned when enabled, inert otherwise. The
  /// bias-target draw is seeded from q itself, so this is a pure function.
  InstantiatedKnowledge kappa_for(const WorldState& q) const;

  PropagationOutcome propagate(const WorldState& q, const Control& u, const InstantiatedKnowledge& kappa) const;

  /// propagate, additionally recording the state after every physics step.
  PropagationOutcome propagate_recorded(const WorldState& q, const Control& u, const InstantiatedKnowledge& kappa,
                                        std::vector<WorldState>& trajectory) const;

  void check_control(const Control& u) const;

 private:
  World prepared(const WorldState& q) const;
  void apply_pins(World& w, const InstantiatedKnowledge& kappa) const;
  PropagationOutcome run(const WorldState& q, const Control& u, const InstantiatedKnowledge& kappa,
                         std::vector<WorldState>* trajectory) const;

  World template_;
  const KnowledgeBase* kb_;
  PropagatorOptions options_;
};

/// Re-runs a control sequence from q_init and returns q_init followed by the
/// end state of each control.
std::vector<WorldState> replay(const Propagator& prop, const WorldState& q_init, const std::vector<Control>& controls);

}  // namespace pushplan
