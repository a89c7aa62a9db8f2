#pragma once

#include <stdexcept>
#include <string>

#include "pushplan/knowledge.hpp"
#include "pushplan/physics2d.hpp"
#include "pushplan/planners.hpp"

namespace pushplan {

/// Planner parameters a scene may ship with; the CLI overrides them.
struct PlannerDefaults {
  double t_max = 60.0;
  double goal_bias = 0.05;
  ControlBounds controls;
  double kpiece_cell_size = 0.25;
  double kpiece_exterior_prob = 0.75;

  PlannerConfig to_config() const;
  friend bool operator==(const PlannerDefaults&, const PlannerDefaults&) = default;
};

struct Scene {
  Aabb room;
  World world;
  std::string knowledge_ref;
  PlannerDefaults planner;
};

enum class SceneErrc { parse, unknown_knowledge_ref, invalid_start, invalid_body };

class SceneError : public std::runtime_error {
 public:
  SceneError(SceneErrc code, std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), code_(code), path_(std::move(path)) {}
  SceneErrc code() const { return code_; }
  const std::string& path() const { return path_; }

 private:
  SceneErrc code_;
  std::string path_;
};

struct LoadedScene {
  Scene scene;
  AbstractKnowledge knowledge;
};

/// Builds a scene from its JSON text. Body categories and manipulation
/// constraints come from `k`; every non-robot body must be described there.
Scene parse_scene(const std::string& json_text, const AbstractKnowledge& k);
std::string serialize_scene(const Scene& scene);

/// Reads a scene file and its knowledge document. When `knowledge_path` is
/// empty the scene's own "knowledge" entry is used, relative to the scene.
LoadedScene load_scene(const std::string& scene_path, const std::string& knowledge_path = "");

}  // namespace pushplan
