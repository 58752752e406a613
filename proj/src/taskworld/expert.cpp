#include <deque>
#include <vector>

#include "vlasteer/error.hpp"
#include "vlasteer/taskworld.hpp"

namespace vlasteer {
namespace {

// First move in E, W, N, S order that shortens the Manhattan distance.
Action move_toward(Cell from, Cell to, Rng* rng, double jitter) {
  const bool horizontal = from.x != to.x;
  const bool vertical = from.y != to.y;
  bool vertical_first = false;
  if (horizontal && vertical && rng != nullptr && jitter > 0.0) vertical_first = rng->bernoulli(jitter);
  if (horizontal && !vertical_first) return to.x > from.x ? Action::MoveE : Action::MoveW;
  return to.y < from.y ? Action::MoveN : Action::MoveS;
}

// Nearest cell where a held object can be set down, BFS expanding E, W, N, S.
std::optional<Cell> nearest_free_cell(const WorldState& s) {
  std::vector<char> seen(static_cast<std::size_t>(s.grid_width * s.grid_height), 0);
  std::deque<Cell> q{s.gripper.pos};
  seen[static_cast<std::size_t>(s.gripper.pos.y * s.grid_width + s.gripper.pos.x)] = 1;
  constexpr std::array<Cell, 4> kDirs = {{{1, 0}, {-1, 0}, {0, -1}, {0, 1}}};
  while (!q.empty()) {
    Cell c = q.front();
    q.pop_front();
    if (s.is_free_cell(c)) return c;
    for (Cell d : kDirs) {
      Cell n{c.x + d.x, c.y + d.y};
      if (!s.in_bounds(n)) continue;
      auto& flag = seen[static_cast<std::size_t>(n.y * s.grid_width + n.x)];
      if (flag) continue;
      flag = 1;
      q.push_back(n);
    }
  }
  return std::nullopt;
}

Action set_down_held(const WorldState& s, Rng* rng, double jitter) {
  auto free = nearest_free_cell(s);
  if (!free) throw PlanningError("no free cell to set down the held object");
  if (*free == s.gripper.pos) return Action::Release;
  return move_toward(s.gripper.pos, *free, rng, jitter);
}

}  // namespace

Action expert_action(const WorldState& s, const Subgoal& goal, Rng* rng, ExpertOptions options) {
  if (eval_predicate(s, goal)) return Action::Think;
  const Fixture& fx = *s.find_fixture(goal.fixture);
  const Cell here = s.gripper.pos;
  const double jitter = options.jitter;

  switch (goal.predicate) {
    case Predicate::Closed:
      if (!is_openable(fx.kind)) throw PlanningError("cannot close " + goal.fixture);
      return here == fx.pos ? Action::Close : move_toward(here, fx.pos, rng, jitter);
    case Predicate::Activated:
      if (fx.kind != FixtureKind::stove) throw PlanningError("cannot activate " + goal.fixture);
      return here == fx.pos ? Action::Activate : move_toward(here, fx.pos, rng, jitter);
    case Predicate::In:
    case Predicate::On: break;
  }

  const Object& target = *s.find_object(goal.object);
  if (s.gripper.held == target.id) {
    if (here != fx.pos) return move_toward(here, fx.pos, rng, jitter);
    if (fx.open == false) return Action::Open;
    return Action::Release;
  }
  if (s.gripper.held) return set_down_held(s, rng, jitter);
  if (here != target.pos) return move_toward(here, target.pos, rng, jitter);
  if (target.container && s.fixtures[*target.container].open == false) return Action::Open;
  return Action::Grasp;
}

}  // namespace vlasteer
