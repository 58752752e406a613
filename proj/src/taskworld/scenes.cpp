#include <algorithm>
#include <numeric>

#include "vlasteer/error.hpp"
#include "vlasteer/taskworld.hpp"

namespace vlasteer {
namespace {

struct TaskDef {
  std::vector<Subgoal> subgoals;
  std::vector<std::string_view> companions;  // non-target objects in the scene
};

Subgoal in(std::string_view o, std::string_view f) { return {Predicate::In, std::string(o), std::string(f)}; }
Subgoal on(std::string_view o, std::string_view f) { return {Predicate::On, std::string(o), std::string(f)}; }
Subgoal closed(std::string_view f) { return {Predicate::Closed, "", std::string(f)}; }
Subgoal activated(std::string_view f) { return {Predicate::Activated, "", std::string(f)}; }

// Ten long-horizon tasks following the LIBERO-10 instruction patterns.
const std::vector<TaskDef>& id_tasks() {
  static const std::vector<TaskDef> tasks = {
      {{in("soup", "basket"), in("sauce", "basket")}, {"cheese", "butter"}},
      {{in("cheese", "basket"), in("butter", "basket")}, {"soup", "milk"}},
      {{activated("stove"), on("moka", "stove")}, {"bowl", "mug_white"}},
      {{in("bowl", "drawer"), closed("drawer")}, {"book", "mug_white"}},
      {{on("mug_white", "plate_left"), on("mug_yw", "plate_right")}, {"pudding"}},
      {{in("book", "drawer")}, {"bowl", "mug_red"}},
      {{on("mug_white", "plate_left"), on("pudding", "plate_right")}, {"mug_yw"}},
      {{in("soup", "basket"), in("cheese", "basket")}, {"sauce", "butter"}},
      {{on("moka", "stove"), on("moka2", "stove")}, {"bowl"}},
      {{in("mug_yw", "microwave"), closed("microwave")}, {"mug_white", "pudding"}},
  };
  return tasks;
}

// Unseen recombinations of trained subgoals.
const std::vector<TaskDef>& compose_tasks() {
  static const std::vector<TaskDef> tasks = {
      {{in("cheese", "basket"), in("sauce", "basket")}, {"soup", "butter", "milk"}},
      {{in("soup", "basket"), in("butter", "basket")}, {"sauce", "cheese", "juice"}},
      {{in("juice", "basket"), in("sauce", "basket")}, {"milk", "butter", "ketchup"}},
      {{in("milk", "basket"), in("sauce", "basket")}, {"juice", "cheese", "soup"}},
      {{in("juice", "basket"), in("butter", "basket")}, {"soup", "milk", "cheese"}},
      {{in("sauce", "basket"), in("butter", "basket")}, {"cheese", "ketchup", "milk"}},
      {{in("milk", "basket"), in("butter", "basket")}, {"juice", "soup", "sauce"}},
      {{in("ketchup", "basket"), in("cheese", "basket")}, {"sauce", "milk", "butter"}},
      {{on("mug_red", "plate_left"), on("mug_yw", "plate_right")}, {"mug_white", "pudding", "bowl"}},
      {{in("wine", "drawer"), closed("drawer")}, {"bowl", "book", "ketchup"}},
  };
  return tasks;
}

constexpr std::array<std::string_view, 7> kDistractors = {"ketchup", "wine",    "juice", "milk",
                                                          "mug_red", "pudding", "book"};

WorldState build_state(const TaskDef& def, std::uint64_t placement_seed) {
  WorldState s;
  std::vector<std::string> fixture_names;
  std::vector<std::string> object_names;
  for (const auto& g : def.subgoals) {
    if (std::find(fixture_names.begin(), fixture_names.end(), g.fixture) == fixture_names.end())
      fixture_names.push_back(g.fixture);
    if (!g.object.empty() &&
        std::find(object_names.begin(), object_names.end(), g.object) == object_names.end())
      object_names.push_back(g.object);
  }
  for (auto c : def.companions) object_names.emplace_back(c);

  std::vector<Cell> cells;
  for (int y = 0; y < s.grid_height; ++y)
    for (int x = 0; x < s.grid_width; ++x) cells.push_back({x, y});
  Rng rng(placement_seed);
  for (std::size_t i = cells.size() - 1; i > 0; --i) std::swap(cells[i], cells[rng.index(i + 1)]);

  std::size_t next = 0;
  for (const auto& name : fixture_names) {
    Fixture f;
    f.id = static_cast<FixtureId>(s.fixtures.size());
    f.kind = fixture_kind(name);
    f.name = name;
    f.pos = cells[next++];
    if (is_openable(f.kind)) f.open = false;
    if (f.kind == FixtureKind::stove) f.active = false;
    s.fixtures.push_back(f);
  }
  for (const auto& name : object_names) {
    Object o;
    o.id = static_cast<ObjectId>(s.objects.size());
    o.name = name;
    o.pos = cells[next++];
    s.objects.push_back(o);
  }
  s.gripper.pos = cells[next];
  return s;
}

void add_distractor(WorldState& s, std::uint64_t seed, int task_index) {
  Rng rng = make_stream(seed, Stream::scene, 2, static_cast<std::uint64_t>(task_index));
  std::vector<std::string_view> absent;
  for (auto d : kDistractors)
    if (s.find_object(d) == nullptr) absent.push_back(d);
  std::vector<Cell> free;
  for (int y = 0; y < s.grid_height; ++y)
    for (int x = 0; x < s.grid_width; ++x) {
      Cell c{x, y};
      if (s.is_free_cell(c) && c != s.gripper.pos) free.push_back(c);
    }
  Object o;
  o.id = static_cast<ObjectId>(s.objects.size());
  o.name = std::string(absent[rng.index(absent.size())]);
  o.pos = free[rng.index(free.size())];
  s.objects.push_back(o);
}

}  // namespace

int suite_size(SuiteTag suite) {
  return static_cast<int>(suite == SuiteTag::compose ? compose_tasks().size() : id_tasks().size());
}

Scene sample_scene(SuiteTag suite, int task_index, std::uint64_t seed) {
  if (task_index < 0 || task_index >= suite_size(suite))
    throw InvalidArgument("task index " + std::to_string(task_index) + " out of range for suite " +
                          std::string(to_string(suite)));
  const bool compose = suite == SuiteTag::compose;
  const TaskDef& def = compose ? compose_tasks()[static_cast<std::size_t>(task_index)]
                               : id_tasks()[static_cast<std::size_t>(task_index)];
  Scene scene;
  scene.state = build_state(def, derive_seed({seed, static_cast<std::uint64_t>(Stream::scene),
                                              compose ? 1u : 0u,
                                              static_cast<std::uint64_t>(task_index)}));
  if (suite == SuiteTag::visual_scene) add_distractor(scene.state, seed, task_index);

  Surface surface = Surface::canonical;
  if (suite == SuiteTag::lang_rephrase) surface = Surface::rephrase;
  if (suite == SuiteTag::lang_object_property) surface = Surface::object_property;
  scene.task.instruction = render_instruction(def.subgoals, surface);
  scene.task.subgoals = def.subgoals;
  scene.task.suite = suite;
  return scene;
}

std::vector<std::vector<Subgoal>> training_task_subgoals() {
  std::vector<std::vector<Subgoal>> out;
  for (const auto& t : id_tasks()) out.push_back(t.subgoals);
  return out;
}

}  // namespace vlasteer
