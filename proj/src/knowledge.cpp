#include "pushplan/knowledge.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pushplan {

using nlohmann::json;

namespace {

KnowledgeError parse_error(const std::string& path, const std::string& what) {
  return {KnowledgeErrc::parse, path, what};
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw parse_error(path, std::string("missing key '") + key + "'");
  return *it;
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw parse_error(path, "expected a number");
  return v.get<double>();
}

Vec2 vec2_at(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw parse_error(path, "expected [x, y]");
  return {number_at(v[0], path + "[0]"), number_at(v[1], path + "[1]")};
}

void warn_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path,
                  std::vector<std::string>& warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }) == known.end())
      warnings.push_back(path + ": unknown key '" + it.key() + "'");
  }
}

struct RegionBox {
  Vec2 offset;
  Vec2 half;
};

RegionBox region_at(const json& v, const std::string& path, std::vector<std::string>& warnings) {
  if (!v.is_object()) throw parse_error(path, "expected a region object");
  warn_unknown(v, {"offset", "half"}, path, warnings);
  RegionBox r{vec2_at(require(v, "offset", path), path + ".offset"), vec2_at(require(v, "half", path), path + ".half")};
  if (!(r.half.x > 0.0 && r.half.y > 0.0))
    throw KnowledgeError(KnowledgeErrc::invalid_value, path + ".half", "half extents must be positive");
  return r;
}

Vec2 normalized(const Vec2& v, const std::string& path) {
  const double n = norm(v);
  if (!(n > 0.0)) throw KnowledgeError(KnowledgeErrc::invalid_value, path, "direction must be non-zero");
  return v * (1.0 / n);
}

bool is_directional(const Part& p) { return p.push_direction != Vec2{}; }

ManipType infer_manip_type(const ObjectSpec& o) {
  if (o.declared_type == DeclaredType::fixed) return ManipType::none;
  if (o.wheel_drive) return ManipType::constraint_oriented;
  for (const ElementSpec& e : o.elements)
    if (e.region_ref && is_directional(o.parts[*e.region_ref])) return ManipType::constraint_oriented;
  return ManipType::free;
}

}  // namespace

const ObjectSpec* AbstractKnowledge::find(const std::string& id) const {
  for (const ObjectSpec& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

bool AbstractKnowledge::has_action(const std::string& action) const {
  return std::find(actions.begin(), actions.end(), action) != actions.end();
}

AbstractKnowledge parse_abstract_knowledge(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw parse_error("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw parse_error("", "top level must be an object");

  AbstractKnowledge k;
  warn_unknown(doc, {"initial_state", "goal", "actions", "objects", "regions"}, "$", k.warnings);

  const json& init = require(doc, "initial_state", "$");
  k.initial_state = {number_at(require(init, "x", "$.initial_state"), "$.initial_state.x"),
                     number_at(require(init, "y", "$.initial_state"), "$.initial_state.y")};

  const json& goal = require(doc, "goal", "$");
  k.goal.center = {number_at(require(goal, "x", "$.goal"), "$.goal.x"),
                   number_at(require(goal, "y", "$.goal"), "$.goal.y")};
  k.goal.radius = number_at(require(goal, "radius", "$.goal"), "$.goal.radius");
  if (!(k.goal.radius > 0.0)) throw KnowledgeError(KnowledgeErrc::invalid_value, "$.goal.radius", "must be positive");

  const json& actions = require(doc, "actions", "$");
  if (!actions.is_array()) throw parse_error("$.actions", "expected an array");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (!actions[i].is_string()) throw parse_error("$.actions[" + std::to_string(i) + "]", "expected a string");
    k.actions.push_back(actions[i].get<std::string>());
  }

  // Named regions that elements may reference instead of inlining a box.
  std::vector<std::pair<std::string, RegionBox>> named;
  if (auto it = doc.find("regions"); it != doc.end()) {
    if (!it->is_object()) throw parse_error("$.regions", "expected an object");
    for (auto r = it->begin(); r != it->end(); ++r)
      named.emplace_back(r.key(), region_at(r.value(), "$.regions." + r.key(), k.warnings));
  }

  const json& objects = require(doc, "objects", "$");
  if (!objects.is_array()) throw parse_error("$.objects", "expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string path = "$.objects[" + std::to_string(i) + "]";
    const json& o = objects[i];
    if (!o.is_object()) throw parse_error(path, "expected an object");
    warn_unknown(o, {"id", "type", "wheel_drive", "allowed_axis", "mass_class", "elements"}, path, k.warnings);

    ObjectSpec spec;
    const json& id = require(o, "id", path);
    if (!id.is_string()) throw parse_error(path + ".id", "expected a string");
    spec.id = id.get<std::string>();
    if (!ids.insert(spec.id).second)
      throw KnowledgeError(KnowledgeErrc::invalid_value, path + ".id", "duplicate object id '" + spec.id + "'");

    const json& type = require(o, "type", path);
    if (type == "fixed") spec.declared_type = DeclaredType::fixed;
    else if (type == "manipulatable") spec.declared_type = DeclaredType::manipulatable;
    else throw parse_error(path + ".type", "expected \"fixed\" or \"manipulatable\"");

    if (auto w = o.find("wheel_drive"); w != o.end()) {
      if (!w->is_boolean()) throw parse_error(path + ".wheel_drive", "expected a boolean");
      spec.wheel_drive = w->get<bool>();
    }
    if (auto a = o.find("allowed_axis"); a != o.end())
      spec.allowed_axis = normalized(vec2_at(*a, path + ".allowed_axis"), path + ".allowed_axis");
    if (auto m = o.find("mass_class"); m != o.end()) {
      if (!m->is_string()) throw parse_error(path + ".mass_class", "expected a string");
      spec.mass_class = m->get<std::string>();
    }

    if (auto els = o.find("elements"); els != o.end()) {
      if (!els->is_array()) throw parse_error(path + ".elements", "expected an array");
      for (std::size_t j = 0; j < els->size(); ++j) {
        const std::string epath = path + ".elements[" + std::to_string(j) + "]";
        const json& e = (*els)[j];
        if (!e.is_object()) throw parse_error(epath, "expected an object");
        warn_unknown(e, {"name", "action", "region", "push_direction"}, epath, k.warnings);
        ElementSpec el;
        const json& name = require(e, "name", epath);
        const json& action = require(e, "action", epath);
        if (!name.is_string()) throw parse_error(epath + ".name", "expected a string");
        if (!action.is_string()) throw parse_error(epath + ".action", "expected a string");
        el.name = name.get<std::string>();
        el.action = action.get<std::string>();
        if (!k.has_action(el.action))
          throw KnowledgeError(KnowledgeErrc::unknown_action, epath + ".action",
                               "action '" + el.action + "' is not declared in actions");

        if (auto r = e.find("region"); r != e.end()) {
          RegionBox box;
          if (r->is_string()) {
            const std::string ref = r->get<std::string>();
            auto hit = std::find_if(named.begin(), named.end(), [&](const auto& n) { return n.first == ref; });
            if (hit == named.end())
              throw KnowledgeError(KnowledgeErrc::dangling_region, epath + ".region",
                                   "region '" + ref + "' is not defined");
            box = hit->second;
          } else {
            box = region_at(*r, epath + ".region", k.warnings);
          }
          Part part{el.name, {}, box.offset, box.half};
          if (auto d = e.find("push_direction"); d != e.end())
            part.push_direction = normalized(vec2_at(*d, epath + ".push_direction"), epath + ".push_direction");
          el.region_ref = spec.parts.size();
          spec.parts.push_back(part);
        } else if (e.contains("push_direction")) {
          throw KnowledgeError(KnowledgeErrc::dangling_region, epath, "push_direction given without a region");
        }
        spec.elements.push_back(std::move(el));
      }
    }

    if (spec.declared_type == DeclaredType::fixed && !spec.elements.empty())
      k.warnings.push_back(path + ": elements of a fixed object are ignored");
    if (infer_manip_type(spec) == ManipType::constraint_oriented) {
      try {
        constraint_of(spec)->validate();
      } catch (const std::invalid_argument& e) {
        throw KnowledgeError(KnowledgeErrc::invalid_value, path, e.what());
      }
    }

    k.regions.push_back({RegionKind::object, spec.id, ""});
    for (const ElementSpec& el : spec.elements)
      if (el.region_ref && is_directional(spec.parts[*el.region_ref]))
        k.regions.push_back({RegionKind::manipulation, spec.id, el.name});
    k.objects.push_back(std::move(spec));
  }
  k.regions.push_back({RegionKind::goal, "", ""});
  return k;
}

AbstractKnowledge load_abstract_knowledge(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw KnowledgeError(KnowledgeErrc::parse, path, "cannot open knowledge document");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_abstract_knowledge(ss.str());
}

std::string serialize_abstract_knowledge(const AbstractKnowledge& k) {
  json doc;
  doc["initial_state"] = {{"x", k.initial_state.x}, {"y", k.initial_state.y}};
  doc["goal"] = {{"x", k.goal.center.x}, {"y", k.goal.center.y}, {"radius", k.goal.radius}};
  doc["actions"] = k.actions;
  doc["objects"] = json::array();
  for (const ObjectSpec& o : k.objects) {
    json jo;
    jo["id"] = o.id;
    jo["type"] = o.declared_type == DeclaredType::fixed ? "fixed" : "manipulatable";
    jo["wheel_drive"] = o.wheel_drive;
    if (o.allowed_axis) jo["allowed_axis"] = {o.allowed_axis->x, o.allowed_axis->y};
    if (!o.mass_class.empty()) jo["mass_class"] = o.mass_class;
    jo["elements"] = json::array();
    for (const ElementSpec& e : o.elements) {
      json je{{"name", e.name}, {"action", e.action}};
      if (e.region_ref) {
        const Part& p = o.parts[*e.region_ref];
        je["region"] = {{"offset", {p.region_offset.x, p.region_offset.y}},
                        {"half", {p.region_half_extents.x, p.region_half_extents.y}}};
        if (is_directional(p)) je["push_direction"] = {p.push_direction.x, p.push_direction.y};
      }
      jo["elements"].push_back(je);
    }
    doc["objects"].push_back(jo);
  }
  return doc.dump(2);
}

std::optional<ManipulationConstraint> constraint_of(const ObjectSpec& obj) {
  if (infer_manip_type(obj) != ManipType::constraint_oriented) return std::nullopt;
  ManipulationConstraint c;
  std::vector<Part> parts;
  for (const ElementSpec& e : obj.elements)
    if (e.region_ref && is_directional(obj.parts[*e.region_ref])) parts.push_back(obj.parts[*e.region_ref]);
  // A wheel drive constrains motion to the body's forward axis unless told otherwise.
  if (obj.allowed_axis) c.allowed_axis = *obj.allowed_axis;
  else if (!parts.empty()) c.allowed_axis = parts.front().push_direction;
  c.parts = std::move(parts);
  return c;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finaliser over the combined words
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------

KnowledgeBase::KnowledgeBase(AbstractKnowledge k, const World& scene, const Aabb& room)
    : k_(std::move(k)), room_(room), robot_(scene.robot_index()) {
  bodies_.reserve(scene.size());
  for (const RigidBody& b : scene.bodies()) bodies_.push_back({b.id, b.shape, b.category, b.is_robot, -1});
  for (std::size_t i = 0; i < k_.objects.size(); ++i) {
    const auto idx = scene.find(k_.objects[i].id);
    if (!idx)
      throw KnowledgeError(KnowledgeErrc::unknown_object, "$.objects[" + std::to_string(i) + "]",
                           "object '" + k_.objects[i].id + "' has no body in the scene");
    bodies_[*idx].spec = static_cast<int>(i);
  }
  parts_.resize(scene.size());
  for (std::size_t i = 0; i < scene.size(); ++i)
    if (const auto* c = scene.constraint(i)) parts_[i] = c->parts;
}

std::size_t KnowledgeBase::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < bodies_.size(); ++i)
    if (bodies_[i].id == id) return i;
  throw KnowledgeError(KnowledgeErrc::unknown_object, "", "unknown object '" + id + "'");
}

Classification KnowledgeBase::object_classification(const std::string& obj) const {
  const ObjectSpec* o = k_.find(obj);
  if (!o) throw KnowledgeError(KnowledgeErrc::unknown_object, "", "unknown object '" + obj + "'");
  return {o->declared_type, infer_manip_type(*o)};
}

std::vector<std::pair<std::string, std::string>> KnowledgeBase::action_type(const std::string& obj) const {
  const ObjectSpec* o = k_.find(obj);
  if (!o) throw KnowledgeError(KnowledgeErrc::unknown_object, "", "unknown object '" + obj + "'");
  std::vector<std::pair<std::string, std::string>> out;
  if (o->declared_type == DeclaredType::fixed) return out;
  for (const ElementSpec& e : o->elements) out.emplace_back(e.name, e.action);
  return out;
}

std::optional<std::size_t> KnowledgeBase::determine_goal_region(const WorldState& q) const {
  std::optional<std::size_t> best;
  double best_d = 0.0;
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    if (i == robot_) continue;
    const Pose pose = q.bodies[i].pose();
    if (!disc_intersects_shape(k_.goal.center, k_.goal.radius, bodies_[i].shape, pose)) continue;
    const double d = norm_sq(pose.position - k_.goal.center);
    if (!best || d < best_d || (d == best_d && bodies_[i].id < bodies_[*best].id)) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

bool KnowledgeBase::region_valid_at(const WorldState& q, std::size_t body, const Part& part) const {
  const OrientedBox box = region_world_box(q.bodies[body], part);
  if (!box_inside(box, room_)) return false;
  for (std::size_t j = 0; j < bodies_.size(); ++j) {
    if (j == body || j == robot_) continue;
    if (box_intersects_shape(box, bodies_[j].shape, q.bodies[j].pose())) return false;
  }
  return true;
}

bool KnowledgeBase::robot_inside(const WorldState& q, const OrientedBox& region) const {
  return point_in_box(region, q.bodies[robot_].position);
}

bool KnowledgeBase::valid_region(const WorldState& q, const std::string& obj, const std::string& element) const {
  const std::size_t i = index_of(obj);
  if (bodies_[i].category != Category::constraint_oriented)
    throw KnowledgeError(KnowledgeErrc::invalid_value, "", "object '" + obj + "' is not constraint-oriented");
  for (const Part& p : parts_[i])
    if (p.name == element) return region_valid_at(q, i, p);
  throw KnowledgeError(KnowledgeErrc::unknown_object, "", "object '" + obj + "' has no element '" + element + "'");
}

std::vector<OrientedBox> KnowledgeBase::regions_of(const WorldState& q, std::size_t i) const {
  std::vector<OrientedBox> out;
  for (const Part& p : parts_[i]) out.push_back(region_world_box(q.bodies[i], p));
  return out;
}

InstantiatedKnowledge KnowledgeBase::update_instantiated(const WorldState& q, std::uint64_t rng_seed) const {
  const std::size_t n = bodies_.size();
  InstantiatedKnowledge kappa;
  kappa.timestamp = q.time;
  kappa.collisionable.assign(n, 0);
  kappa.region_valid.assign(n, {});
  kappa.effective_category.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const Category cat = bodies_[i].category;
    kappa.effective_category[i] = cat;
    switch (cat) {
      case Category::fixed:
        kappa.collisionable[i] = 0;
        break;
      case Category::free_manipulatable:
        kappa.collisionable[i] = 1;
        break;
      case Category::constraint_oriented: {
        bool any_valid = false;
        bool robot_in_valid = false;
        for (const Part& p : parts_[i]) {
          const bool valid = region_valid_at(q, i, p);
          kappa.region_valid[i].push_back(valid ? 1 : 0);
          any_valid = any_valid || valid;
          robot_in_valid = robot_in_valid || (valid && robot_inside(q, region_world_box(q.bodies[i], p)));
        }
        kappa.collisionable[i] = robot_in_valid ? 1 : 0;
        if (!any_valid) kappa.effective_category[i] = Category::fixed;
        break;
      }
    }
  }

  kappa.goal_occupant = determine_goal_region(q);
  kappa.bias_target = k_.goal.center;
  if (kappa.goal_occupant) {
    const std::size_t occ = *kappa.goal_occupant;
    if (kappa.effective_category[occ] == Category::constraint_oriented) {
      if (kappa.collisionable[occ]) {
        kappa.robot_in_occupant_region = true;
      } else {
        std::vector<std::size_t> valid;
        for (std::size_t p = 0; p < parts_[occ].size(); ++p)
          if (kappa.region_valid[occ][p]) valid.push_back(p);
        const std::size_t pick = static_cast<std::size_t>(mix_seed(rng_seed, occ) % valid.size());
        kappa.bias_target = region_world_box(q.bodies[occ], parts_[occ][valid[pick]]).center;
      }
    }
  }
  return kappa;
}

InstantiatedKnowledge KnowledgeBase::inert(const WorldState& q) const {
  const std::size_t n = bodies_.size();
  InstantiatedKnowledge kappa;
  kappa.timestamp = q.time;
  kappa.collisionable.assign(n, 1);
  kappa.region_valid.assign(n, {});
  kappa.effective_category.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    kappa.effective_category[i] = bodies_[i].category;
    if (bodies_[i].category == Category::fixed) kappa.collisionable[i] = 0;
  }
  kappa.bias_target = k_.goal.center;
  return kappa;
}

}  // namespace pushplan
