#pragma once

// Symbolic tabletop-manipulation world: state, deterministic dynamics,
// subgoal predicates, the instruction grammar, scene suites and a scripted
// expert controller.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlasteer/rng.hpp"

namespace vlasteer {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

inline int manhattan(Cell a, Cell b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

enum class FixtureKind : std::uint8_t { basket, stove, drawer, plate, microwave };

/// Row 0 is the north edge: MoveN decreases y, MoveS increases it.
enum class Action : std::uint8_t {
  MoveN,
  MoveS,
  MoveE,
  MoveW,
  Grasp,
  Release,
  Open,
  Close,
  Activate,
  Think,  // control token, never applied to dynamics
};

inline constexpr std::array<Action, 9> kMotorActions = {
    Action::MoveN, Action::MoveS, Action::MoveE,  Action::MoveW,   Action::Grasp,
    Action::Release, Action::Open, Action::Close, Action::Activate};

using ObjectId = std::uint16_t;
using FixtureId = std::uint16_t;

struct Object {
  ObjectId id = 0;
  std::string name;  // canonical key, e.g. "soup"
  Cell pos;
  std::optional<FixtureId> container;
  bool operator==(const Object&) const = default;
};

struct Fixture {
  FixtureId id = 0;
  FixtureKind kind = FixtureKind::basket;
  std::string name;  // canonical key, e.g. "plate_left"
  Cell pos;
  std::optional<bool> open;    // drawer, microwave
  std::optional<bool> active;  // stove
  bool operator==(const Fixture&) const = default;
};

struct Gripper {
  Cell pos;
  std::optional<ObjectId> held;
  bool operator==(const Gripper&) const = default;
};

/// Full world configuration. Objects and fixtures are stored sorted by id,
/// with id equal to the vector index.
struct WorldState {
  int grid_width = 6;
  int grid_height = 6;
  std::vector<Object> objects;
  std::vector<Fixture> fixtures;
  Gripper gripper;
  std::uint64_t tick = 0;

  bool operator==(const WorldState&) const = default;

  const Object* find_object(std::string_view name) const;
  const Fixture* find_fixture(std::string_view name) const;
  const Fixture* fixture_at(Cell c) const;
  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < grid_width && c.y < grid_height;
  }
  /// A cell that holds no fixture and no loose (uncontained, unheld) object.
  bool is_free_cell(Cell c) const;
};

bool is_openable(FixtureKind kind);

/// Returns a description of every violated structural invariant (empty if
/// the state is well formed).
std::vector<std::string> check_invariants(const WorldState& state);

enum class Predicate : std::uint8_t { In, On, Closed, Activated };

/// A ground predicate over canonical object/fixture keys. `object` is empty
/// for Closed and Activated.
struct Subgoal {
  Predicate predicate = Predicate::In;
  std::string object;
  std::string fixture;

  bool operator==(const Subgoal&) const = default;
  auto operator<=>(const Subgoal&) const = default;
};

enum class SuiteTag : std::uint8_t {
  id,
  lang_rephrase,
  lang_object_property,
  visual_scene,
  visual_viewpoint,
  compose,
};

inline constexpr std::array<SuiteTag, 6> kAllSuites = {
    SuiteTag::id,           SuiteTag::lang_rephrase,    SuiteTag::lang_object_property,
    SuiteTag::visual_scene, SuiteTag::visual_viewpoint, SuiteTag::compose};

struct TaskSpec {
  std::string instruction;
  std::vector<Subgoal> subgoals;
  SuiteTag suite = SuiteTag::id;
  bool operator==(const TaskSpec&) const = default;
};

std::string_view to_string(Action a);
std::string_view to_string(FixtureKind k);
std::string_view to_string(Predicate p);
std::string_view to_string(SuiteTag s);
std::optional<SuiteTag> parse_suite(std::string_view s);
std::optional<Action> parse_action(std::string_view s);
std::string to_string(const Subgoal& g);

// ---------------------------------------------------------------------------
// Dynamics and predicates

/// One deterministic transition. Inapplicable actions are no-ops; tick always
/// advances. Throws InvalidArgument for Think.
WorldState step(const WorldState& state, Action action);

/// Throws PlanningError when the subgoal references an unknown key.
bool eval_predicate(const WorldState& state, const Subgoal& goal);

/// True iff every subgoal holds.
bool all_satisfied(const WorldState& state, std::span<const Subgoal> goals);

/// Index of the first subgoal that does not hold, or nullopt when all do.
std::optional<std::size_t> first_unmet(const WorldState& state,
                                       std::span<const Subgoal> goals);

// ---------------------------------------------------------------------------
// Vocabulary and grammar

/// Surface name used in instructions and plan sentences ("alphabet soup").
std::string display_name(std::string_view key);

/// Resolves a surface phrase (display name or alias) to a canonical key.
std::optional<std::string> resolve_object(std::string_view phrase);
std::optional<std::string> resolve_fixture(std::string_view phrase);

/// Every canonical object key and fixture key known to the vocabulary.
std::span<const std::string_view> object_keys();
std::span<const std::string_view> fixture_keys();
FixtureKind fixture_kind(std::string_view fixture_key);

enum class Surface : std::uint8_t {
  canonical,        // "put both the alphabet soup and the tomato sauce in the basket"
  rephrase,         // alternate verbs, same object descriptions
  object_property,  // alternate object descriptions from the alias table
};

/// Compiles an instruction into its ordered subgoal list. The returned spec
/// carries the input text and SuiteTag::id. Throws ParseError naming the
/// nearest production when the text is outside the grammar.
TaskSpec compile_instruction(std::string_view text);

/// Renders an instruction for a subgoal list of one of the five grammar
/// shapes. Throws InvalidArgument for other shapes.
std::string render_instruction(std::span<const Subgoal> subgoals,
                               Surface surface = Surface::canonical);

/// One-sentence plan text for a subgoal ("put the alphabet soup in the basket").
std::string plan_sentence(const Subgoal& goal);

/// Inverse of plan_sentence. Throws ParseError on unknown text.
Subgoal parse_plan_sentence(std::string_view sentence);

// ---------------------------------------------------------------------------
// Scripted expert

struct ExpertOptions {
  /// Probability of swapping the axis order on a diagonal move. Needs an rng.
  double jitter = 0.0;
};

/// One step of a shortest-path-then-manipulate controller toward `goal`.
/// Returns Think when the goal already holds. Ties between equally short
/// moves are broken in the order E, W, N, S.
Action expert_action(const WorldState& state, const Subgoal& goal, Rng* rng = nullptr,
                     ExpertOptions options = {});

// ---------------------------------------------------------------------------
// Scenes

int suite_size(SuiteTag suite);

struct Scene {
  WorldState state;
  TaskSpec task;
};

/// Deterministic in (suite, task_index, seed).
Scene sample_scene(SuiteTag suite, int task_index, std::uint64_t seed);

/// Subgoal lists of every in-distribution task (for composition checks).
std::vector<std::vector<Subgoal>> training_task_subgoals();

// ---------------------------------------------------------------------------
// Canonical encoding

using StateBlob = std::vector<std::uint8_t>;

/// Little-endian fixed-width encoding; layout documented in README.md.
StateBlob snapshot(const WorldState& state);
/// Throws BlobError on malformed input.
WorldState restore(std::span<const std::uint8_t> blob);
/// FNV-1a 64 over the canonical encoding.
std::uint64_t state_hash(const WorldState& state);

}  // namespace vlasteer
