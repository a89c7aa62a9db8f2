#include "pushplan/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace pushplan {

using nlohmann::json;

std::string format_fixed(double v, int decimals) {
  if (v == 0.0) v = 0.0;  // folds -0 into +0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

TraceHeader make_trace_header(const Scene& scene, const KnowledgeBase& kb, const PlannerConfig& config, bool solved) {
  TraceHeader h;
  h.room = scene.room;
  h.goal = kb.goal();
  h.algorithm = to_string(config.algorithm);
  h.seed = config.seed;
  h.knowledge_enabled = config.knowledge_enabled;
  h.solved = solved;
  for (std::size_t i = 0; i < scene.world.size(); ++i) {
    const RigidBody& b = scene.world.body(i);
    TraceBody tb{b.id, b.is_robot, b.category, b.shape, {}};
    if (const auto* c = scene.world.constraint(i)) tb.parts = c->parts;
    h.bodies.push_back(std::move(tb));
  }
  return h;
}

std::vector<WorldState> expand_path(const Propagator& prop, const Path& path) {
  std::vector<WorldState> states;
  if (path.states.empty()) return states;
  states.push_back(path.states.front());
  for (std::size_t k = 0; k < path.controls.size(); ++k) {
    const WorldState q = states.back();
    prop.propagate_recorded(q, path.controls[k], prop.kappa_for(q), states);
  }
  return states;
}

void write_trace_header(std::ostream& out, const TraceHeader& h) {
  json j;
  j["type"] = "header";
  j["room"] = {{"min", {h.room.min.x, h.room.min.y}}, {"max", {h.room.max.x, h.room.max.y}}};
  j["goal"] = {{"x", h.goal.center.x}, {"y", h.goal.center.y}, {"radius", h.goal.radius}};
  j["algorithm"] = h.algorithm;
  j["seed"] = h.seed;
  j["knowledge_enabled"] = h.knowledge_enabled;
  j["solved"] = h.solved;
  j["bodies"] = json::array();
  for (const TraceBody& b : h.bodies) {
    json jb{{"id", b.id}, {"robot", b.robot}, {"category", to_string(b.category)}};
    if (const auto* c = std::get_if<Circle>(&b.shape)) jb["shape"] = {{"circle", c->radius}};
    else jb["shape"] = {{"box", {std::get<Box>(b.shape).half_extents.x, std::get<Box>(b.shape).half_extents.y}}};
    jb["regions"] = json::array();
    for (const Part& p : b.parts)
      jb["regions"].push_back({{"name", p.name},
                               {"offset", {p.region_offset.x, p.region_offset.y}},
                               {"half", {p.region_half_extents.x, p.region_half_extents.y}},
                               {"push_direction", {p.push_direction.x, p.push_direction.y}}});
    j["bodies"].push_back(jb);
  }
  out << j.dump() << '\n';
}

void write_trace_states(std::ostream& out, const World& scene, const std::vector<WorldState>& states) {
  for (const WorldState& q : states) {
    const std::string t = format_fixed(q.time);
    for (std::size_t i = 0; i < q.bodies.size(); ++i) {
      const BodyState& s = q.bodies[i];
      out << "{\"type\":\"state\",\"t\":" << t << ",\"id\":" << json(scene.body(i).id).dump() << ",\"p\":["
          << format_fixed(s.position.x) << ',' << format_fixed(s.position.y) << "],\"o\":" << format_fixed(s.orientation)
          << ",\"v\":[" << format_fixed(s.linear_velocity.x) << ',' << format_fixed(s.linear_velocity.y)
          << "],\"w\":" << format_fixed(s.angular_velocity) << "}\n";
    }
  }
}

void write_trace_edges(std::ostream& out, const PlannerTree& tree, std::optional<std::size_t> goal_node) {
  std::vector<std::uint8_t> on_path(tree.nodes.size(), 0);
  for (auto n = goal_node; n; n = tree.nodes[*n].parent) on_path[*n] = 1;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& parent = tree.nodes[i].parent;
    if (!parent) continue;
    const Vec2 a = tree.robot_position(*parent);
    const Vec2 b = tree.robot_position(i);
    out << "{\"type\":\"edge\",\"a\":[" << format_fixed(a.x) << ',' << format_fixed(a.y) << "],\"b\":["
        << format_fixed(b.x) << ',' << format_fixed(b.y) << "],\"path\":" << (on_path[i] ? "true" : "false") << "}\n";
  }
}

void write_plan_trace(std::ostream& out, const Scene& scene, const KnowledgeBase& kb, const PlannerConfig& config,
                      const PlanResult& result) {
  write_trace_header(out, make_trace_header(scene, kb, config, result.path.has_value()));
  const Propagator prop(scene.world, kb, {config.controls, config.check_interval, config.knowledge_enabled});
  std::vector<WorldState> states;
  if (result.path) states = expand_path(prop, *result.path);
  else states.push_back(prop.initial_state());
  write_trace_states(out, scene.world, states);
  std::optional<std::size_t> goal_node;
  if (result.path) goal_node = result.tree.nodes.size() - 1;
  write_trace_edges(out, result.tree, goal_node);
}

namespace {

Vec2 vec2(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

Category parse_category(const std::string& s) {
  if (s == "fixed") return Category::fixed;
  if (s == "constraint_oriented") return Category::constraint_oriented;
  if (s == "free_manipulatable") return Category::free_manipulatable;
  throw std::invalid_argument("unknown category '" + s + "'");
}

}  // namespace

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        TraceHeader& h = trace.header;
        h.room = {vec2(j.at("room").at("min")), vec2(j.at("room").at("max"))};
        h.goal = {{j.at("goal").at("x").get<double>(), j.at("goal").at("y").get<double>()},
                  j.at("goal").at("radius").get<double>()};
        h.algorithm = j.at("algorithm").get<std::string>();
        h.seed = j.at("seed").get<std::uint64_t>();
        h.knowledge_enabled = j.at("knowledge_enabled").get<bool>();
        h.solved = j.at("solved").get<bool>();
        for (const json& b : j.at("bodies")) {
          TraceBody tb;
          tb.id = b.at("id").get<std::string>();
          tb.robot = b.at("robot").get<bool>();
          tb.category = parse_category(b.at("category").get<std::string>());
          const json& s = b.at("shape");
          if (s.contains("circle")) tb.shape = Circle{s.at("circle").get<double>()};
          else tb.shape = Box{vec2(s.at("box"))};
          for (const json& r : b.at("regions"))
            tb.parts.push_back({r.at("name").get<std::string>(), vec2(r.at("push_direction")), vec2(r.at("offset")),
                                vec2(r.at("half"))});
          h.bodies.push_back(std::move(tb));
        }
        have_header = true;
      } else if (!have_header) {
        throw TraceError(lineno, "first record must be the header");
      } else if (type == "state") {
        trace.states.push_back({j.at("t").get<double>(), j.at("id").get<std::string>(), vec2(j.at("p")),
                                j.at("o").get<double>(), vec2(j.at("v")), j.at("w").get<double>()});
      } else if (type == "edge") {
        trace.edges.push_back({vec2(j.at("a")), vec2(j.at("b")), j.at("path").get<bool>()});
      } else {
        throw TraceError(lineno, "unknown record type '" + type + "'");
      }
    } catch (const TraceError&) {
      throw;
    } catch (const std::exception& e) {
      throw TraceError(lineno, e.what());
    }
  }
  if (!have_header) throw TraceError(lineno, "trace has no header record");
  return trace;
}

}  // namespace pushplan
