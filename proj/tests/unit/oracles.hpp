#pragma once

#include <cmath>
#include <deque>
#include <unordered_set>

#include "vlasteer/taskworld.hpp"

namespace vlasteer::oracle {

inline WorldState tiny_state() {
  WorldState s;
  s.fixtures.push_back({0, FixtureKind::basket, "basket", {4, 4}, std::nullopt, std::nullopt});
  s.fixtures.push_back({1, FixtureKind::microwave, "microwave", {1, 4}, false, std::nullopt});
  s.fixtures.push_back({2, FixtureKind::stove, "stove", {5, 0}, std::nullopt, false});
  s.fixtures.push_back({3, FixtureKind::drawer, "drawer", {0, 5}, true, std::nullopt});
  s.objects.push_back({0, "soup", {2, 2}, std::nullopt});
  s.objects.push_back({1, "sauce", {3, 1}, std::nullopt});
  s.gripper.pos = {2, 2};
  return s;
}

// Shortest number of motor actions that makes `goal` true, by BFS over the
// full state space.
inline int bfs_distance(const WorldState& start, const Subgoal& goal, int limit = 40) {
  if (eval_predicate(start, goal)) return 0;
  std::unordered_set<std::uint64_t> seen;
  auto key = [](WorldState s) {
    s.tick = 0;
    return state_hash(s);
  };
  std::deque<std::pair<WorldState, int>> q{{start, 0}};
  seen.insert(key(start));
  while (!q.empty()) {
    auto [s, d] = q.front();
    q.pop_front();
    if (d >= limit) continue;
    for (Action a : kMotorActions) {
      WorldState n = step(s, a);
      if (!seen.insert(key(n)).second) continue;
      if (eval_predicate(n, goal)) return d + 1;
      q.push_back({std::move(n), d + 1});
    }
  }
  return -1;
}

// True when p lies inside the 99% Wilson band of successes/trials.
inline bool in_wilson99(long successes, long trials, double p) {
  const double z = 2.5758293035489;
  const double n = static_cast<double>(trials);
  const double ph = successes / n;
  const double c = (ph + z * z / (2 * n)) / (1 + z * z / n);
  const double h = z / (1 + z * z / n) * std::sqrt(ph * (1 - ph) / n + z * z / (4 * n * n));
  return p >= c - h - 1e-12 && p <= c + h + 1e-12;
}

}  // namespace vlasteer::oracle
