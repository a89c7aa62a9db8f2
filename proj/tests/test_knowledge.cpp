#include <gtest/gtest.h>

#include <random>

#include "pushplan/knowledge.hpp"
#include "pushplan/scene.hpp"
#include "support/oracles.hpp"
#include "support/random_scenes.hpp"

using namespace pushplan;

namespace {

const char* kMinimalDoc = R"({
  "initial_state": {"x": 0, "y": 0},
  "goal": {"x": 1, "y": 1, "radius": 0.5},
  "actions": ["push"],
  "objects": []
})";

KnowledgeErrc parse_code(const std::string& text) {
  try {
    parse_abstract_knowledge(text);
  } catch (const KnowledgeError& e) {
    return e.code();
  }
  ADD_FAILURE() << "document parsed";
  return KnowledgeErrc::parse;
}

std::string with_objects(const std::string& objects) {
  return R"({"initial_state": {"x": 0, "y": 0}, "goal": {"x": 0, "y": 0, "radius": 1}, "actions": ["push"],
             "objects": )" + objects + "}";
}

struct RoomCar {
  LoadedScene loaded = load_scene(PUSHPLAN_DATA_DIR "/room_car.scene");
  KnowledgeBase kb{loaded.knowledge, loaded.scene.world, loaded.scene.room};
  const World& world() const { return loaded.scene.world; }
  std::size_t car() const { return *world().find("car"); }
  std::size_t robot() const { return world().robot_index(); }
  WorldState initial() const { return capture_state(world()); }
  const Part& part(const std::string& name) const { return *world().constraint(car())->find_part(name); }
};

// RoomCar with an extra free crate appended to the scene.
struct RoomCarWithCrate {
  World world;
  AbstractKnowledge k;
  Aabb room;

  explicit RoomCarWithCrate(Vec2 crate_at, double crate_radius = 0.25) {
    const RoomCar base;
    std::vector<RigidBody> bodies = base.world().bodies();
    bodies.push_back(make_body("crate", Circle{crate_radius}, 1.0, Category::free_manipulatable, {crate_at, 0.0}));
    world = make_world(std::move(bodies), base.world().params());
    k = base.loaded.knowledge;
    k.objects.push_back({"crate", DeclaredType::manipulatable, false, std::nullopt, "", {}, {}});
    room = base.loaded.scene.room;
  }
};

}  // namespace

TEST(LoadKnowledge, RoomCarDocument) {
  const AbstractKnowledge k = load_abstract_knowledge(PUSHPLAN_DATA_DIR "/room_car.knowledge.json");
  EXPECT_GT(k.goal.radius, 0.0);
  ASSERT_NE(k.find("car"), nullptr);
  const ObjectSpec& car = *k.find("car");
  ASSERT_EQ(car.elements.size(), 2u);
  EXPECT_EQ(car.elements[0].name, "rear");
  EXPECT_EQ(car.elements[1].name, "front");
  ASSERT_TRUE(constraint_of(car).has_value());
  for (const char* w : {"wall_west", "wall_east", "wall_south", "wall_north"})
    EXPECT_EQ(k.find(w)->declared_type, DeclaredType::fixed) << w;
  EXPECT_TRUE(k.warnings.empty());
  int manipulation = 0, goal = 0;
  for (const RegionDescriptor& r : k.regions) {
    manipulation += r.kind == RegionKind::manipulation;
    goal += r.kind == RegionKind::goal;
  }
  EXPECT_EQ(manipulation, 2);
  EXPECT_EQ(goal, 1);
}

TEST(LoadKnowledge, UnknownActionIsAnError) {
  EXPECT_EQ(parse_code(with_objects(R"([{"id": "car", "type": "manipulatable",
      "elements": [{"name": "rear", "action": "pull"}]}])")),
            KnowledgeErrc::unknown_action);
}

TEST(LoadKnowledge, EmptyObjectListIsValid) {
  const AbstractKnowledge k = parse_abstract_knowledge(kMinimalDoc);
  EXPECT_TRUE(k.objects.empty());
  EXPECT_EQ(k.goal.center, (Vec2{1, 1}));
}

TEST(LoadKnowledge, UnknownKeysWarn) {
  const AbstractKnowledge k = parse_abstract_knowledge(with_objects(R"([{"id": "box", "type": "manipulatable",
      "colour": "red"}])"));
  ASSERT_EQ(k.warnings.size(), 1u);
  EXPECT_NE(k.warnings[0].find("colour"), std::string::npos);
}

TEST(LoadKnowledge, ErrorsCarryFieldPaths) {
  try {
    parse_abstract_knowledge(with_objects(R"([{"id": "car", "type": "manipulatable",
        "elements": [{"name": "rear", "action": "push", "region": "nowhere"}]}])"));
    FAIL();
  } catch (const KnowledgeError& e) {
    EXPECT_EQ(e.code(), KnowledgeErrc::dangling_region);
    EXPECT_EQ(e.path(), "$.objects[0].elements[0].region");
  }
  EXPECT_EQ(parse_code("{"), KnowledgeErrc::parse);
  EXPECT_EQ(parse_code(with_objects(R"([{"id": "x", "type": "heavy"}])")), KnowledgeErrc::parse);
  EXPECT_EQ(parse_code(R"({"initial_state": {"x": 0, "y": 0}, "goal": {"x": 0, "y": 0, "radius": 0},
                           "actions": [], "objects": []})"),
            KnowledgeErrc::invalid_value);
}

TEST(LoadKnowledge, NamedRegionsResolve) {
  const AbstractKnowledge k = parse_abstract_knowledge(R"({
    "initial_state": {"x": 0, "y": 0}, "goal": {"x": 0, "y": 0, "radius": 1}, "actions": ["push"],
    "regions": {"behind": {"offset": [-1, 0], "half": [0.3, 0.3]}},
    "objects": [{"id": "cart", "type": "manipulatable",
                 "elements": [{"name": "rear", "action": "push", "region": "behind", "push_direction": [2, 0]}]}]})");
  const ObjectSpec& cart = *k.find("cart");
  ASSERT_EQ(cart.parts.size(), 1u);
  EXPECT_EQ(cart.parts[0].region_offset, (Vec2{-1, 0}));
  EXPECT_EQ(cart.parts[0].push_direction, (Vec2{1, 0}));
}

TEST(LoadKnowledge, SerializeRoundTrip) {
  const AbstractKnowledge k = load_abstract_knowledge(PUSHPLAN_DATA_DIR "/room_car.knowledge.json");
  const AbstractKnowledge again = parse_abstract_knowledge(serialize_abstract_knowledge(k));
  EXPECT_EQ(serialize_abstract_knowledge(again), serialize_abstract_knowledge(k));
  ASSERT_EQ(again.objects.size(), k.objects.size());
  EXPECT_EQ(again.goal.radius, k.goal.radius);
}

TEST(Classification, CarWallCrate) {
  const RoomCarWithCrate s({3, 2});
  const KnowledgeBase kb(s.k, s.world, s.room);
  EXPECT_EQ(kb.object_classification("car"), (Classification{DeclaredType::manipulatable, ManipType::constraint_oriented}));
  EXPECT_EQ(kb.object_classification("wall_north"), (Classification{DeclaredType::fixed, ManipType::none}));
  EXPECT_EQ(kb.object_classification("crate"), (Classification{DeclaredType::manipulatable, ManipType::free}));
  EXPECT_THROW(kb.object_classification("ghost"), KnowledgeError);
}

TEST(Classification, DirectionalRegionWithoutWheelDrive) {
  const AbstractKnowledge k = parse_abstract_knowledge(with_objects(R"([{"id": "cart", "type": "manipulatable",
      "elements": [{"name": "rear", "action": "push", "region": {"offset": [-1, 0], "half": [0.3, 0.3]},
                    "push_direction": [1, 0]}]}])"));
  EXPECT_TRUE(constraint_of(*k.find("cart")).has_value());
}

TEST(ActionType, Pairs) {
  const RoomCarWithCrate s({3, 2});
  const KnowledgeBase kb(s.k, s.world, s.room);
  const auto car = kb.action_type("car");
  ASSERT_EQ(car.size(), 2u);
  EXPECT_EQ(car[0], (std::pair<std::string, std::string>{"rear", "push"}));
  EXPECT_EQ(car[1], (std::pair<std::string, std::string>{"front", "push"}));
  EXPECT_TRUE(kb.action_type("wall_east").empty());
  EXPECT_TRUE(kb.action_type("crate").empty());
}

TEST(GoalRegion, CarParkedOnGoal) {
  const RoomCar s;
  EXPECT_EQ(s.kb.determine_goal_region(s.initial()), std::optional<std::size_t>(s.car()));
}

TEST(GoalRegion, EmptyRoomHasNoOccupant) {
  const LoadedScene e = load_scene(PUSHPLAN_DATA_DIR "/empty_room.scene");
  const KnowledgeBase kb(e.knowledge, e.scene.world, e.scene.room);
  EXPECT_FALSE(kb.determine_goal_region(capture_state(e.scene.world)).has_value());
}

TEST(GoalRegion, TieBreakPrefersCentredBody) {
  Aabb room{{-3, -3}, {3, 3}};
  AbstractKnowledge k;
  k.actions = {"push"};
  k.goal = {{0, 0}, 0.5};
  k.objects = {{"a", DeclaredType::manipulatable, false, std::nullopt, "", {}, {}},
               {"b", DeclaredType::manipulatable, false, std::nullopt, "", {}, {}}};
  const World w = make_world({make_body("robot", Circle{0.1}, 1, Category::free_manipulatable, {{2, 2}, 0}, {}, true),
                              make_body("a", Box{{0.3, 0.3}}, 1, Category::free_manipulatable, {{0.6, 0}, 0}),
                              make_body("b", Box{{0.3, 0.3}}, 1, Category::free_manipulatable, {{0, 0}, 0})});
  const KnowledgeBase kb(k, w, room);
  const WorldState q = capture_state(w);
  std::vector<oracle::Candidate> cands{{"a", {w.body(1).shape, w.body(1).state.pose()}},
                                       {"b", {w.body(2).shape, w.body(2).state.pose()}}};
  const auto expect = oracle::goal_occupant(k.goal.center, k.goal.radius, cands);
  ASSERT_TRUE(expect.has_value());
  ASSERT_EQ(*expect, std::optional<std::size_t>(1));
  EXPECT_EQ(kb.determine_goal_region(q), std::optional<std::size_t>(2));
}

TEST(ValidRegion, UnobstructedCar) {
  const RoomCar s;
  EXPECT_TRUE(s.kb.valid_region(s.initial(), "car", "rear"));
  EXPECT_TRUE(s.kb.valid_region(s.initial(), "car", "front"));
  EXPECT_THROW(s.kb.valid_region(s.initial(), "car", "roof"), KnowledgeError);
  EXPECT_THROW(s.kb.valid_region(s.initial(), "wall_east", "rear"), KnowledgeError);
}

TEST(ValidRegion, CrateBlocksFront) {
  const RoomCar base;
  const Vec2 front = region_world_box(base.world().body(base.car()), base.part("front")).center;
  const RoomCarWithCrate s(front);
  const KnowledgeBase kb(s.k, s.world, s.room);
  const WorldState q = capture_state(s.world);
  EXPECT_FALSE(kb.valid_region(q, "car", "front"));
  EXPECT_TRUE(kb.valid_region(q, "car", "rear"));
}

TEST(ValidRegion, RearLeavesRoomAgainstWall) {
  const RoomCar s;
  WorldState q = s.initial();
  const Part& rear = s.part("rear");
  const double hx = std::get<Box>(s.world().body(s.car()).shape).half_extents.x;
  // Car backed up against the west wall: its rear region pokes past the room.
  const double wall_face = s.loaded.scene.room.min.x + 0.1;
  q.bodies[s.car()].position = {wall_face + hx + 0.01, 0.0};
  const OrientedBox r = region_world_box(q.bodies[s.car()], rear);
  std::vector<oracle::Obstacle> others;
  for (std::size_t j = 0; j < s.world().size(); ++j)
    if (j != s.car() && j != s.robot()) others.push_back({s.world().body(j).shape, q.bodies[j].pose()});
  const auto expect = oracle::region_valid(r, others, s.loaded.scene.room);
  ASSERT_TRUE(expect.has_value());
  EXPECT_FALSE(*expect);
  EXPECT_FALSE(s.kb.valid_region(q, "car", "rear"));
  EXPECT_TRUE(s.kb.valid_region(q, "car", "front"));
}

TEST(Instantiated, InitialRoomCarState) {
  const RoomCar s;
  const WorldState q = s.initial();
  const InstantiatedKnowledge kappa = s.kb.update_instantiated(q, 7);
  EXPECT_FALSE(kappa.collisionable[s.car()]);
  EXPECT_EQ(kappa.region_valid[s.car()], (std::vector<std::uint8_t>{1, 1}));
  EXPECT_EQ(kappa.goal_occupant, std::optional<std::size_t>(s.car()));
  const Vec2 rear = region_world_box(q.bodies[s.car()], s.part("rear")).center;
  const Vec2 front = region_world_box(q.bodies[s.car()], s.part("front")).center;
  EXPECT_TRUE(kappa.bias_target == rear || kappa.bias_target == front);
  EXPECT_FALSE(kappa.robot_in_occupant_region);

  bool saw_rear = false, saw_front = false;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const Vec2 t = s.kb.update_instantiated(q, seed).bias_target;
    saw_rear = saw_rear || t == rear;
    saw_front = saw_front || t == front;
  }
  EXPECT_TRUE(saw_rear && saw_front);
}

TEST(Instantiated, RobotInRearRegion) {
  const RoomCar s;
  WorldState q = s.initial();
  q.bodies[s.robot()].position = region_world_box(q.bodies[s.car()], s.part("rear")).center;
  const InstantiatedKnowledge kappa = s.kb.update_instantiated(q, 7);
  EXPECT_TRUE(kappa.collisionable[s.car()]);
  EXPECT_TRUE(kappa.robot_in_occupant_region);
  EXPECT_EQ(kappa.bias_target, s.kb.goal().center);
}

TEST(Instantiated, BothRegionsBlockedDemotesCar) {
  const RoomCar base;
  const Vec2 rear = region_world_box(base.world().body(base.car()), base.part("rear")).center;
  const Vec2 front = region_world_box(base.world().body(base.car()), base.part("front")).center;
  std::vector<RigidBody> bodies = base.world().bodies();
  bodies.push_back(make_body("crate0", Circle{0.2}, 1.0, Category::free_manipulatable, {rear, 0}));
  bodies.push_back(make_body("crate1", Circle{0.2}, 1.0, Category::free_manipulatable, {front, 0}));
  AbstractKnowledge k = base.loaded.knowledge;
  k.objects.push_back({"crate0", DeclaredType::manipulatable, false, std::nullopt, "", {}, {}});
  k.objects.push_back({"crate1", DeclaredType::manipulatable, false, std::nullopt, "", {}, {}});
  const World w = make_world(std::move(bodies), base.world().params());
  const KnowledgeBase kb(k, w, base.loaded.scene.room);
  const InstantiatedKnowledge kappa = kb.update_instantiated(capture_state(w), 1);
  EXPECT_EQ(kappa.effective_category[base.car()], Category::fixed);
  EXPECT_FALSE(kappa.collisionable[base.car()]);
  EXPECT_EQ(kappa.bias_target, kb.goal().center);
}

TEST(Instantiated, InertKnowledgeTreatsEverythingAsFree) {
  const RoomCar s;
  const InstantiatedKnowledge kappa = s.kb.inert(s.initial());
  EXPECT_TRUE(kappa.collisionable[s.car()]);
  EXPECT_FALSE(kappa.collisionable[*s.world().find("wall_west")]);
  EXPECT_EQ(kappa.bias_target, s.kb.goal().center);
}

TEST(KnowledgeBase, RejectsObjectsWithoutBodies) {
  const RoomCar s;
  AbstractKnowledge k = s.loaded.knowledge;
  k.objects.push_back({"ghost", DeclaredType::fixed, false, std::nullopt, "", {}, {}});
  EXPECT_THROW(KnowledgeBase(k, s.world(), s.loaded.scene.room), KnowledgeError);
}

// --- properties ----------------------------------------------------------

TEST(KnowledgeProperty, UpdateIsPure) {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 100; ++i) {
    const auto sc = testing_support::random_scene(rng);
    const KnowledgeBase kb(sc.knowledge, sc.world, sc.room);
    const WorldState q = capture_state(sc.world);
    EXPECT_EQ(kb.update_instantiated(q, 99), kb.update_instantiated(q, 99));
  }
}

TEST(KnowledgeProperty, KappaRulesHoldOnRandomScenes) {
  std::mt19937_64 rng(67);
  int checked = 0;
  while (checked < 150) {
    const auto sc = testing_support::random_scene(rng);
    const KnowledgeBase kb(sc.knowledge, sc.world, sc.room);
    const InstantiatedKnowledge kappa = kb.update_instantiated(capture_state(sc.world), rng());
    bool ambiguous = false;
    const auto bad = testing_support::kappa_violations(sc.world, sc.room, kappa, ambiguous);
    if (ambiguous) continue;
    ++checked;
    for (const std::string& b : bad) ADD_FAILURE() << b;
  }
}

TEST(KnowledgeProperty, ValidRegionMatchesSampledOracle) {
  std::mt19937_64 rng(71);
  int checked = 0;
  while (checked < 150) {
    const auto sc = testing_support::random_scene(rng);
    const KnowledgeBase kb(sc.knowledge, sc.world, sc.room);
    const WorldState q = capture_state(sc.world);
    for (std::size_t i = 0; i < sc.world.size(); ++i) {
      const auto* c = sc.world.constraint(i);
      if (!c) continue;
      for (const Part& p : c->parts) {
        const auto expect = oracle::region_valid(oracle::region_box(q.bodies[i].pose(), p),
                                                 testing_support::others_than(sc.world, i), sc.room);
        if (!expect) continue;
        ++checked;
        EXPECT_EQ(kb.valid_region(q, sc.world.body(i).id, p.name), *expect);
      }
    }
  }
}

TEST(KnowledgeProperty, GoalOccupantMatchesDiscSampling) {
  std::mt19937_64 rng(73);
  int checked = 0;
  while (checked < 300) {
    const auto sc = testing_support::random_scene(rng);
    const KnowledgeBase kb(sc.knowledge, sc.world, sc.room);
    std::vector<oracle::Candidate> cands;
    std::vector<std::size_t> index;
    for (std::size_t j = 0; j < sc.world.size(); ++j) {
      if (j == sc.world.robot_index()) continue;
      cands.push_back({sc.world.body(j).id, {sc.world.body(j).shape, sc.world.body(j).state.pose()}});
      index.push_back(j);
    }
    const auto expect = oracle::goal_occupant(sc.knowledge.goal.center, sc.knowledge.goal.radius, cands);
    if (!expect) continue;
    ++checked;
    const auto got = kb.determine_goal_region(capture_state(sc.world));
    ASSERT_EQ(got.has_value(), expect->has_value());
    if (got) EXPECT_EQ(*got, index[**expect]);
  }
}

TEST(KnowledgeProperty, AddingAnObstacleNeverRevalidates) {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto sc = testing_support::random_scene(rng);
    const KnowledgeBase before(sc.knowledge, sc.world, sc.room);
    std::vector<RigidBody> bodies = sc.world.bodies();
    const RigidBody& car = sc.world.body(0);
    const Vec2 near = region_world_box(car, car.constraint->parts[0]).center + Vec2{u(rng) * 0.4, u(rng) * 0.4};
    bodies.push_back(make_body("intruder", Circle{0.2}, 1.0, Category::free_manipulatable, {near, 0}));
    AbstractKnowledge k = sc.knowledge;
    k.objects.push_back({"intruder", DeclaredType::manipulatable, false, std::nullopt, "", {}, {}});
    const World w = make_world(std::move(bodies));
    const KnowledgeBase after(k, w, sc.room);
    const WorldState q0 = capture_state(sc.world);
    const WorldState q1 = capture_state(w);
    for (const Part& p : car.constraint->parts)
      if (!before.valid_region(q0, car.id, p.name)) EXPECT_FALSE(after.valid_region(q1, car.id, p.name));
  }
}
