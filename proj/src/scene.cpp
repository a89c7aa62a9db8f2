#include "pushplan/scene.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pushplan {

using nlohmann::json;

PlannerConfig PlannerDefaults::to_config() const {
  PlannerConfig c;
  c.t_max = t_max;
  c.goal_bias = goal_bias;
  c.controls = controls;
  c.kpiece_cell_size = kpiece_cell_size;
  c.kpiece_exterior_prob = kpiece_exterior_prob;
  return c;
}

namespace {

SceneError perr(const std::string& path, const std::string& what) { return {SceneErrc::parse, path, what}; }

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw perr(path, std::string("missing key '") + key + "'");
  return *it;
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw perr(path, "expected a number");
  return v.get<double>();
}

Vec2 vec2_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw perr(path, "expected [x, y]");
  return {number_at(v[0], path + "[0]"), number_at(v[1], path + "[1]")};
}

template <class T>
void read_opt(const json& obj, const char* key, T& out, const std::string& path) {
  if (auto it = obj.find(key); it != obj.end()) {
    if constexpr (std::is_same_v<T, int>) {
      if (!it->is_number_integer()) throw perr(path + "." + key, "expected an integer");
      out = it->get<int>();
    } else {
      out = number_at(*it, path + "." + key);
    }
  }
}

Shape shape_at(const json& v, const std::string& path) {
  if (!v.is_object() || v.size() != 1) throw perr(path, "expected {\"circle\": r} or {\"box\": [hx, hy]}");
  if (auto c = v.find("circle"); c != v.end()) return Circle{number_at(*c, path + ".circle")};
  if (auto b = v.find("box"); b != v.end()) return Box{vec2_at(*b, path + ".box")};
  throw perr(path, "unknown shape kind");
}

}  // namespace

Scene parse_scene(const std::string& json_text, const AbstractKnowledge& k) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw perr("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw perr("", "top level must be an object");

  Scene scene;
  const json& room = require(doc, "room", "$");
  scene.room = {vec2_at(require(room, "min", "$.room"), "$.room.min"),
                vec2_at(require(room, "max", "$.room"), "$.room.max")};
  if (!(scene.room.min.x < scene.room.max.x && scene.room.min.y < scene.room.max.y))
    throw perr("$.room", "min must be below max");

  PhysicsParams params;
  if (auto ph = doc.find("physics"); ph != doc.end()) {
    read_opt(*ph, "dt", params.dt, "$.physics");
    read_opt(*ph, "solver_iters", params.solver_iters, "$.physics");
    read_opt(*ph, "restitution", params.restitution, "$.physics");
    read_opt(*ph, "friction", params.friction, "$.physics");
    read_opt(*ph, "damping", params.damping, "$.physics");
    read_opt(*ph, "baumgarte", params.baumgarte, "$.physics");
    read_opt(*ph, "slop", params.slop, "$.physics");
    if (!(params.dt > 0.0)) throw perr("$.physics.dt", "must be positive");
  }

  if (auto pl = doc.find("planner"); pl != doc.end()) {
    PlannerDefaults& d = scene.planner;
    read_opt(*pl, "t_max", d.t_max, "$.planner");
    read_opt(*pl, "goal_bias", d.goal_bias, "$.planner");
    read_opt(*pl, "f_max", d.controls.f_max, "$.planner");
    read_opt(*pl, "min_steps", d.controls.min_steps, "$.planner");
    read_opt(*pl, "max_steps", d.controls.max_steps, "$.planner");
    read_opt(*pl, "kpiece_cell_size", d.kpiece_cell_size, "$.planner");
    read_opt(*pl, "kpiece_exterior_prob", d.kpiece_exterior_prob, "$.planner");
  }

  if (auto kr = doc.find("knowledge"); kr != doc.end()) {
    if (!kr->is_string()) throw perr("$.knowledge", "expected a path string");
    scene.knowledge_ref = kr->get<std::string>();
  }

  const json& bodies = require(doc, "bodies", "$");
  if (!bodies.is_array()) throw perr("$.bodies", "expected an array");
  std::vector<RigidBody> rigid;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const std::string path = "$.bodies[" + std::to_string(i) + "]";
    const json& b = bodies[i];
    const json& id = require(b, "id", path);
    if (!id.is_string()) throw perr(path + ".id", "expected a string");
    const std::string name = id.get<std::string>();
    const bool is_robot = b.value("robot", false);
    const Shape shape = shape_at(require(b, "shape", path), path + ".shape");

    const json& pose = require(b, "pose", path);
    if (!pose.is_array() || pose.size() != 3) throw perr(path + ".pose", "expected [x, y, theta]");
    const Pose p{{number_at(pose[0], path + ".pose[0]"), number_at(pose[1], path + ".pose[1]")},
                 number_at(pose[2], path + ".pose[2]")};

    Category category = Category::free_manipulatable;
    std::optional<ManipulationConstraint> constraint;
    if (const ObjectSpec* spec = k.find(name)) {
      if (spec->declared_type == DeclaredType::fixed) {
        category = Category::fixed;
      } else if ((constraint = constraint_of(*spec))) {
        category = Category::constraint_oriented;
      }
    } else if (!is_robot) {
      throw SceneError(SceneErrc::unknown_knowledge_ref, path + ".id",
                       "body '" + name + "' is not described by the knowledge document");
    }

    const json& mass = require(b, "mass", path);
    double m = 0.0;
    if (mass.is_string() && mass == "inf") m = kInfiniteMass;
    else m = number_at(mass, path + ".mass");
    if (category == Category::fixed && !std::isinf(m))
      throw SceneError(SceneErrc::invalid_body, path + ".mass", "fixed body '" + name + "' needs mass \"inf\"");
    if (category != Category::fixed && std::isinf(m))
      throw SceneError(SceneErrc::invalid_body, path + ".mass",
                       "only bodies the knowledge declares fixed may have infinite mass");

    RigidBody body = make_body(name, shape, m, category, p, constraint, is_robot);
    if (auto v = b.find("velocity"); v != b.end()) {
      if (!v->is_array() || v->size() != 3) throw perr(path + ".velocity", "expected [vx, vy, w]");
      body.state.linear_velocity = {number_at((*v)[0], path + ".velocity[0]"), number_at((*v)[1], path + ".velocity[1]")};
      body.state.angular_velocity = number_at((*v)[2], path + ".velocity[2]");
    }
    rigid.push_back(std::move(body));
  }

  for (const ObjectSpec& o : k.objects) {
    bool found = false;
    for (const RigidBody& b : rigid) found = found || b.id == o.id;
    if (!found)
      throw SceneError(SceneErrc::unknown_knowledge_ref, "$.bodies",
                       "knowledge object '" + o.id + "' has no body in the scene");
  }

  try {
    scene.world = make_world(std::move(rigid), params);
  } catch (const WorldError& e) {
    throw SceneError(SceneErrc::invalid_body, "$.bodies", e.what());
  }

  const World& w = scene.world;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Aabb bb = bounding_box(w.body(i).shape, w.body(i).state.pose());
    if (!scene.room.contains(bb.min) || !scene.room.contains(bb.max))
      throw SceneError(SceneErrc::invalid_start, "$.bodies[" + std::to_string(i) + "]",
                       "body '" + w.body(i).id + "' is not inside the room bounds");
  }
  const std::size_t r = w.robot_index();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i == r) continue;
    if (shapes_intersect(w.body(r).shape, w.body(r).state.pose(), w.body(i).shape, w.body(i).state.pose()))
      throw SceneError(SceneErrc::invalid_start, "$.bodies[" + std::to_string(r) + "]",
                       "robot starts overlapping '" + w.body(i).id + "'");
  }
  return scene;
}

std::string serialize_scene(const Scene& scene) {
  json doc;
  doc["room"] = {{"min", {scene.room.min.x, scene.room.min.y}}, {"max", {scene.room.max.x, scene.room.max.y}}};
  const PhysicsParams& p = scene.world.params();
  doc["physics"] = {{"dt", p.dt},           {"solver_iters", p.solver_iters}, {"restitution", p.restitution},
                    {"friction", p.friction}, {"damping", p.damping},         {"baumgarte", p.baumgarte},
                    {"slop", p.slop}};
  const PlannerDefaults& d = scene.planner;
  doc["planner"] = {{"t_max", d.t_max},
                    {"goal_bias", d.goal_bias},
                    {"f_max", d.controls.f_max},
                    {"min_steps", d.controls.min_steps},
                    {"max_steps", d.controls.max_steps},
                    {"kpiece_cell_size", d.kpiece_cell_size},
                    {"kpiece_exterior_prob", d.kpiece_exterior_prob}};
  if (!scene.knowledge_ref.empty()) doc["knowledge"] = scene.knowledge_ref;
  doc["bodies"] = json::array();
  for (const RigidBody& b : scene.world.bodies()) {
    json jb;
    jb["id"] = b.id;
    if (b.is_robot) jb["robot"] = true;
    if (const auto* c = std::get_if<Circle>(&b.shape)) jb["shape"] = {{"circle", c->radius}};
    else {
      const Vec2 h = std::get<Box>(b.shape).half_extents;
      jb["shape"] = {{"box", {h.x, h.y}}};
    }
    if (std::isinf(b.mass)) jb["mass"] = "inf";
    else jb["mass"] = b.mass;
    jb["pose"] = {b.state.position.x, b.state.position.y, b.state.orientation};
    if (b.state.linear_velocity != Vec2{} || b.state.angular_velocity != 0.0)
      jb["velocity"] = {b.state.linear_velocity.x, b.state.linear_velocity.y, b.state.angular_velocity};
    doc["bodies"].push_back(jb);
  }
  return doc.dump(2);
}

LoadedScene load_scene(const std::string& scene_path, const std::string& knowledge_path) {
  auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SceneError(SceneErrc::parse, path, "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string text = slurp(scene_path);

  std::string kpath = knowledge_path;
  if (kpath.empty()) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SceneError(SceneErrc::parse, scene_path, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("knowledge") || !doc["knowledge"].is_string())
      throw SceneError(SceneErrc::parse, scene_path, "no knowledge document given and none referenced by the scene");
    kpath = (std::filesystem::path(scene_path).parent_path() / doc["knowledge"].get<std::string>()).string();
  }

  LoadedScene out;
  out.knowledge = load_abstract_knowledge(kpath);
  out.scene = parse_scene(text, out.knowledge);
  return out;
}

}  // namespace pushplan
