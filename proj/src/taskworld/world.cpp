#include <algorithm>
#include <map>

#include "vlasteer/error.hpp"
#include "vlasteer/taskworld.hpp"

namespace vlasteer {

const Object* WorldState::find_object(std::string_view name) const {
  for (const auto& o : objects)
    if (o.name == name) return &o;
  return nullptr;
}

const Fixture* WorldState::find_fixture(std::string_view name) const {
  for (const auto& f : fixtures)
    if (f.name == name) return &f;
  return nullptr;
}

const Fixture* WorldState::fixture_at(Cell c) const {
  for (const auto& f : fixtures)
    if (f.pos == c) return &f;
  return nullptr;
}

bool WorldState::is_free_cell(Cell c) const {
  if (fixture_at(c) != nullptr) return false;
  for (const auto& o : objects) {
    if (gripper.held == o.id) continue;
    if (!o.container && o.pos == c) return false;
  }
  return true;
}

bool is_openable(FixtureKind kind) {
  return kind == FixtureKind::drawer || kind == FixtureKind::microwave;
}

std::vector<std::string> check_invariants(const WorldState& s) {
  std::vector<std::string> out;
  auto bad = [&](std::string msg) { out.push_back(std::move(msg)); };

  if (s.grid_width <= 0 || s.grid_height <= 0) bad("non-positive grid size");
  if (!s.in_bounds(s.gripper.pos)) bad("gripper out of bounds");

  for (std::size_t i = 0; i < s.fixtures.size(); ++i) {
    const auto& f = s.fixtures[i];
    if (f.id != i) bad("fixture id/index mismatch: " + f.name);
    if (!s.in_bounds(f.pos)) bad("fixture out of bounds: " + f.name);
    if (f.open.has_value() != is_openable(f.kind)) bad("open flag mismatch: " + f.name);
    if (f.active.has_value() != (f.kind == FixtureKind::stove))
      bad("active flag mismatch: " + f.name);
    for (std::size_t j = i + 1; j < s.fixtures.size(); ++j)
      if (s.fixtures[j].pos == f.pos) bad("two fixtures share a cell");
  }

  std::map<Cell, std::vector<const Object*>> by_cell;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const auto& o = s.objects[i];
    if (o.id != i) bad("object id/index mismatch: " + o.name);
    if (!s.in_bounds(o.pos)) bad("object out of bounds: " + o.name);
    if (o.container) {
      if (*o.container >= s.fixtures.size()) {
        bad("object in unknown fixture: " + o.name);
        continue;
      }
      if (s.fixtures[*o.container].pos != o.pos) bad("contained object off its fixture: " + o.name);
    }
    if (s.gripper.held == o.id) {
      if (o.pos != s.gripper.pos) bad("held object not at gripper: " + o.name);
      if (o.container) bad("held object inside a fixture: " + o.name);
      continue;  // carried objects do not occupy a cell
    }
    if (!o.container && s.fixture_at(o.pos) != nullptr) bad("loose object on a fixture cell: " + o.name);
    by_cell[o.pos].push_back(&o);
  }
  if (s.gripper.held && *s.gripper.held >= s.objects.size()) bad("held id out of range");

  for (const auto& [cell, objs] : by_cell) {
    if (objs.size() < 2) continue;
    const auto c0 = objs.front()->container;
    bool same_fixture = c0.has_value();
    for (const auto* o : objs) same_fixture = same_fixture && o->container == c0;
    if (!same_fixture) bad("two movable objects share a cell outside a fixture");
  }
  return out;
}

WorldState step(const WorldState& state, Action action) {
  if (action == Action::Think) throw InvalidArgument("step: Think is not a motor action");
  WorldState s = state;
  s.tick += 1;
  auto& g = s.gripper;

  auto move = [&](int dx, int dy) {
    Cell next{std::clamp(g.pos.x + dx, 0, s.grid_width - 1),
              std::clamp(g.pos.y + dy, 0, s.grid_height - 1)};
    g.pos = next;
    if (g.held) s.objects[*g.held].pos = next;
  };

  switch (action) {
    case Action::MoveN: move(0, -1); break;
    case Action::MoveS: move(0, 1); break;
    case Action::MoveE: move(1, 0); break;
    case Action::MoveW: move(-1, 0); break;
    case Action::Grasp: {
      if (g.held) break;
      for (auto& o : s.objects) {
        if (o.pos != g.pos) continue;
        if (o.container && s.fixtures[*o.container].open == false) continue;
        o.container.reset();
        g.held = o.id;
        break;
      }
      break;
    }
    case Action::Release: {
      if (!g.held) break;
      auto& o = s.objects[*g.held];
      if (const Fixture* f = s.fixture_at(g.pos)) {
        if (f->open == false) break;
        o.container = f->id;
        o.pos = f->pos;
        g.held.reset();
      } else if (s.is_free_cell(g.pos)) {
        o.container.reset();
        g.held.reset();
      }
      break;
    }
    case Action::Open:
    case Action::Close: {
      const Fixture* f = s.fixture_at(g.pos);
      if (f && is_openable(f->kind)) s.fixtures[f->id].open = (action == Action::Open);
      break;
    }
    case Action::Activate: {
      const Fixture* f = s.fixture_at(g.pos);
      if (f && f->kind == FixtureKind::stove) s.fixtures[f->id].active = true;
      break;
    }
    case Action::Think: break;
  }
  return s;
}

bool eval_predicate(const WorldState& state, const Subgoal& goal) {
  const Fixture* f = state.find_fixture(goal.fixture);
  if (f == nullptr) throw PlanningError("unknown fixture '" + goal.fixture + "'");
  switch (goal.predicate) {
    case Predicate::In:
    case Predicate::On: {
      const Object* o = state.find_object(goal.object);
      if (o == nullptr) throw PlanningError("unknown object '" + goal.object + "'");
      return o->container == f->id;
    }
    case Predicate::Closed: return f->open == false;
    case Predicate::Activated: return f->active == true;
  }
  return false;
}

bool all_satisfied(const WorldState& state, std::span<const Subgoal> goals) {
  return !first_unmet(state, goals).has_value();
}

std::optional<std::size_t> first_unmet(const WorldState& state, std::span<const Subgoal> goals) {
  for (std::size_t i = 0; i < goals.size(); ++i)
    if (!eval_predicate(state, goals[i])) return i;
  return std::nullopt;
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::MoveN: return "MoveN";
    case Action::MoveS: return "MoveS";
    case Action::MoveE: return "MoveE";
    case Action::MoveW: return "MoveW";
    case Action::Grasp: return "Grasp";
    case Action::Release: return "Release";
    case Action::Open: return "Open";
    case Action::Close: return "Close";
    case Action::Activate: return "Activate";
    case Action::Think: return "Think";
  }
  return "?";
}

std::optional<Action> parse_action(std::string_view s) {
  for (Action a : kMotorActions)
    if (to_string(a) == s) return a;
  if (s == "Think") return Action::Think;
  return std::nullopt;
}

std::string_view to_string(FixtureKind k) {
  switch (k) {
    case FixtureKind::basket: return "basket";
    case FixtureKind::stove: return "stove";
    case FixtureKind::drawer: return "drawer";
    case FixtureKind::plate: return "plate";
    case FixtureKind::microwave: return "microwave";
  }
  return "?";
}

std::string_view to_string(Predicate p) {
  switch (p) {
    case Predicate::In: return "In";
    case Predicate::On: return "On";
    case Predicate::Closed: return "Closed";
    case Predicate::Activated: return "Activated";
  }
  return "?";
}

std::string_view to_string(SuiteTag s) {
  switch (s) {
    case SuiteTag::id: return "id";
    case SuiteTag::lang_rephrase: return "lang_rephrase";
    case SuiteTag::lang_object_property: return "lang_object_property";
    case SuiteTag::visual_scene: return "visual_scene";
    case SuiteTag::visual_viewpoint: return "visual_viewpoint";
    case SuiteTag::compose: return "compose";
  }
  return "?";
}

std::optional<SuiteTag> parse_suite(std::string_view s) {
  for (SuiteTag t : kAllSuites)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::string to_string(const Subgoal& g) {
  std::string out(to_string(g.predicate));
  out += '(';
  if (!g.object.empty()) {
    out += g.object;
    out += ',';
  }
  out += g.fixture;
  out += ')';
  return out;
}

}  // namespace vlasteer
