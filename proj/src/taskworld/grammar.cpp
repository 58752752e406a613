#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <limits>
#include <sstream>

#include "vlasteer/error.hpp"
#include "vlasteer/taskworld.hpp"

namespace vlasteer {
namespace {

struct Entry {
  std::string_view key;
  std::string_view display;
  std::array<std::string_view, 3> aliases;  // first alias is the object-property surface
};

constexpr std::array<Entry, 16> kObjects = {{
    {"soup", "alphabet soup", {"can of soup", "soup", ""}},
    {"sauce", "tomato sauce", {"can of sauce", "sauce", ""}},
    {"cheese", "cream cheese box", {"box of cheese", "cream cheese", ""}},
    {"butter", "butter", {"box of butter", "", ""}},
    {"moka", "moka pot", {"moka machine", "moka coffee maker", ""}},
    {"moka2", "second moka pot", {"second moka machine", "other moka pot", ""}},
    {"bowl", "black bowl", {"middle bowl", "bowl", ""}},
    {"mug_white", "white mug", {"pure white cup", "", ""}},
    {"mug_yw", "yellow and white mug", {"middle mug", "cup with the yellow handle", ""}},
    {"mug_red", "red mug", {"red cup", "", ""}},
    {"book", "book", {"standing book", "right book", ""}},
    {"pudding", "chocolate pudding", {"brown chocolate", "", ""}},
    {"juice", "orange juice", {"carton of juice", "", ""}},
    {"milk", "milk", {"carton of milk", "", ""}},
    {"ketchup", "ketchup", {"ketchup bottle", "", ""}},
    {"wine", "wine bottle", {"bottle of wine", "", ""}},
}};

struct FixtureEntry {
  std::string_view key;
  FixtureKind kind;
  std::string_view display;
  std::array<std::string_view, 3> aliases;
};

constexpr std::array<FixtureEntry, 7> kFixtures = {{
    {"basket", FixtureKind::basket, "basket", {"wicker basket", "", ""}},
    {"stove", FixtureKind::stove, "stove", {"cooktop", "", ""}},
    {"drawer", FixtureKind::drawer, "drawer", {"lowest drawer", "bottom drawer", "bottom drawer of the cabinet"}},
    {"microwave", FixtureKind::microwave, "microwave", {"microwave oven", "", ""}},
    {"plate", FixtureKind::plate, "plate", {"middle plate", "", ""}},
    {"plate_left", FixtureKind::plate, "left plate", {"plate on the left", "", ""}},
    {"plate_right", FixtureKind::plate, "right plate", {"plate on the right", "", ""}},
}};

constexpr std::array<std::string_view, 16> kObjectKeys = {
    "soup", "sauce", "cheese", "butter", "moka", "moka2", "bowl", "mug_white",
    "mug_yw", "mug_red", "book", "pudding", "juice", "milk", "ketchup", "wine"};
constexpr std::array<std::string_view, 7> kFixtureKeys = {
    "basket", "stove", "drawer", "microwave", "plate", "plate_left", "plate_right"};

const Entry* object_entry(std::string_view key) {
  for (const auto& e : kObjects)
    if (e.key == key) return &e;
  return nullptr;
}

const FixtureEntry* fixture_entry(std::string_view key) {
  for (const auto& e : kFixtures)
    if (e.key == key) return &e;
  return nullptr;
}

using Tokens = std::vector<std::string>;

Tokens tokenize(std::string_view text) {
  std::string norm;
  norm.reserve(text.size());
  for (char c : text) {
    if (c == '.' || c == ',') {
      norm += ' ';
    } else {
      norm += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  Tokens out;
  std::istringstream in(norm);
  for (std::string w; in >> w;) out.push_back(std::move(w));
  return out;
}

bool match_phrase(const Tokens& toks, std::size_t at, std::string_view phrase, std::size_t& len) {
  Tokens words = tokenize(phrase);
  if (words.empty() || at + words.size() > toks.size()) return false;
  for (std::size_t i = 0; i < words.size(); ++i)
    if (toks[at + i] != words[i]) return false;
  len = words.size();
  return true;
}

unsigned kind_bit(FixtureKind k) { return 1u << static_cast<unsigned>(k); }

constexpr unsigned kAnyFixture = 0x1f;
const unsigned kInKinds = kind_bit(FixtureKind::basket) | kind_bit(FixtureKind::drawer) |
                          kind_bit(FixtureKind::microwave);
const unsigned kOnKinds = kind_bit(FixtureKind::stove) | kind_bit(FixtureKind::plate);
const unsigned kOpenableKinds = kind_bit(FixtureKind::drawer) | kind_bit(FixtureKind::microwave);

struct Elem {
  enum Kind { Word, OptWord, Obj, Fix } kind;
  std::vector<std::string_view> words{};
  unsigned fix_mask = kAnyFixture;
};

Elem word(std::initializer_list<std::string_view> w) { return {Elem::Word, w}; }
Elem opt(std::string_view w) { return {Elem::OptWord, {w}}; }
Elem obj() { return {Elem::Obj}; }
Elem fix(unsigned mask = kAnyFixture) { return {Elem::Fix, {}, mask}; }

struct Bindings {
  std::vector<std::string> objects;
  std::vector<std::string> fixtures;
};

// Backtracking matcher: tries every alias span for object/fixture slots.
bool match(const std::vector<Elem>& pat, std::size_t pi, const Tokens& toks, std::size_t ti,
           Bindings& b) {
  if (pi == pat.size()) return ti == toks.size();
  const Elem& e = pat[pi];
  switch (e.kind) {
    case Elem::Word:
      if (ti < toks.size() &&
          std::find(e.words.begin(), e.words.end(), toks[ti]) != e.words.end())
        return match(pat, pi + 1, toks, ti + 1, b);
      return false;
    case Elem::OptWord:
      if (ti < toks.size() && toks[ti] == e.words[0] && match(pat, pi + 1, toks, ti + 1, b))
        return true;
      return match(pat, pi + 1, toks, ti, b);
    case Elem::Obj:
      for (const auto& ent : kObjects) {
        std::array<std::string_view, 4> names = {ent.display, ent.aliases[0], ent.aliases[1],
                                                 ent.aliases[2]};
        for (auto n : names) {
          std::size_t len = 0;
          if (n.empty() || !match_phrase(toks, ti, n, len)) continue;
          b.objects.emplace_back(ent.key);
          if (match(pat, pi + 1, toks, ti + len, b)) return true;
          b.objects.pop_back();
        }
      }
      return false;
    case Elem::Fix:
      for (const auto& ent : kFixtures) {
        if ((e.fix_mask & kind_bit(ent.kind)) == 0) continue;
        std::array<std::string_view, 4> names = {ent.display, ent.aliases[0], ent.aliases[1],
                                                 ent.aliases[2]};
        for (auto n : names) {
          std::size_t len = 0;
          if (n.empty() || !match_phrase(toks, ti, n, len)) continue;
          b.fixtures.emplace_back(ent.key);
          if (match(pat, pi + 1, toks, ti + len, b)) return true;
          b.fixtures.pop_back();
        }
      }
      return false;
  }
  return false;
}

const std::initializer_list<std::string_view> kVerbs = {"put", "place", "set", "move"};
const std::initializer_list<std::string_view> kInPreps = {"in", "inside", "into"};
const std::initializer_list<std::string_view> kOnPreps = {"on", "onto"};

struct Production {
  std::string_view shape;  // shown in parse errors
  std::vector<Elem> pattern;
  std::function<std::vector<Subgoal>(const Bindings&)> build;
};

const std::vector<Production>& productions() {
  static const std::vector<Production> prods = [] {
    std::vector<Production> p;
    p.push_back({"put both the <A> and the <B> in the basket",
                 {word(kVerbs), word({"both"}), opt("the"), obj(), word({"and"}), opt("the"), obj(),
                  word(kInPreps), word({"the"}), fix(kind_bit(FixtureKind::basket))},
                 [](const Bindings& b) {
                   return std::vector<Subgoal>{{Predicate::In, b.objects[0], b.fixtures[0]},
                                               {Predicate::In, b.objects[1], b.fixtures[0]}};
                 }});
    p.push_back({"put the <A> in the <F>",
                 {word(kVerbs), opt("the"), obj(), word(kInPreps), word({"the"}), fix(kInKinds)},
                 [](const Bindings& b) {
                   return std::vector<Subgoal>{{Predicate::In, b.objects[0], b.fixtures[0]}};
                 }});
    p.push_back({"put the <A> on the <F>",
                 {word(kVerbs), opt("the"), obj(), word(kOnPreps), word({"the"}), fix(kOnKinds)},
                 [](const Bindings& b) {
                   return std::vector<Subgoal>{{Predicate::On, b.objects[0], b.fixtures[0]}};
                 }});
    p.push_back({"put the <A> in the <F> and close it",
                 {word(kVerbs), opt("the"), obj(), word(kInPreps), word({"the"}), fix(kOpenableKinds),
                  word({"and"}), word({"close", "shut"}), word({"it"})},
                 [](const Bindings& b) {
                   return std::vector<Subgoal>{{Predicate::In, b.objects[0], b.fixtures[0]},
                                               {Predicate::Closed, "", b.fixtures[0]}};
                 }});
    p.push_back({"turn on the stove and put the <A> on it",
                 {word({"turn", "switch"}), word({"on"}), word({"the"}),
                  fix(kind_bit(FixtureKind::stove)), word({"and"}), word(kVerbs), opt("the"), obj(),
                  word(kOnPreps), word({"it"})},
                 [](const Bindings& b) {
                   return std::vector<Subgoal>{{Predicate::Activated, "", b.fixtures[0]},
                                               {Predicate::On, b.objects[0], b.fixtures[0]}};
                 }});
    p.push_back({"put the <A> on the <F1> and the <B> on the <F2>",
                 {word(kVerbs), opt("the"), obj(), word(kOnPreps), word({"the"}), fix(kOnKinds),
                  word({"and"}), opt("the"), obj(), word(kOnPreps), word({"the"}), fix(kOnKinds)},
                 [](const Bindings& b) {
                   return std::vector<Subgoal>{{Predicate::On, b.objects[0], b.fixtures[0]},
                                               {Predicate::On, b.objects[1], b.fixtures[1]}};
                 }});
    return p;
  }();
  return prods;
}

// Word-level edit distance where <slot> tokens match any single word for free.
std::size_t template_distance(const Tokens& toks, std::string_view shape) {
  Tokens tpl = tokenize(shape);
  std::vector<std::size_t> prev(tpl.size() + 1), cur(tpl.size() + 1);
  for (std::size_t j = 0; j <= tpl.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= toks.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= tpl.size(); ++j) {
      const bool wildcard = tpl[j - 1].front() == '<';
      const std::size_t sub = (wildcard || tpl[j - 1] == toks[i - 1]) ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + sub});
      if (wildcard) cur[j] = std::min(cur[j], prev[j]);  // slot absorbs extra words
    }
    std::swap(prev, cur);
  }
  return prev[tpl.size()];
}

std::string object_surface(std::string_view key, Surface surface) {
  const Entry* e = object_entry(key);
  if (e == nullptr) throw InvalidArgument("unknown object key '" + std::string(key) + "'");
  if (surface == Surface::object_property && !e->aliases[0].empty())
    return std::string(e->aliases[0]);
  return std::string(e->display);
}

std::string fixture_surface(std::string_view key, Surface surface) {
  const FixtureEntry* e = fixture_entry(key);
  if (e == nullptr) throw InvalidArgument("unknown fixture key '" + std::string(key) + "'");
  if (surface == Surface::object_property && !e->aliases[0].empty())
    return std::string(e->aliases[0]);
  return std::string(e->display);
}

}  // namespace

std::string display_name(std::string_view key) {
  if (const Entry* e = object_entry(key)) return std::string(e->display);
  if (const FixtureEntry* f = fixture_entry(key)) return std::string(f->display);
  return std::string(key);
}

std::optional<std::string> resolve_object(std::string_view phrase) {
  Tokens toks = tokenize(phrase);
  for (const auto& e : kObjects) {
    std::array<std::string_view, 5> names = {e.key, e.display, e.aliases[0], e.aliases[1],
                                             e.aliases[2]};
    for (auto n : names) {
      std::size_t len = 0;
      if (!n.empty() && match_phrase(toks, 0, n, len) && len == toks.size())
        return std::string(e.key);
    }
  }
  return std::nullopt;
}

std::optional<std::string> resolve_fixture(std::string_view phrase) {
  Tokens toks = tokenize(phrase);
  for (const auto& e : kFixtures) {
    std::array<std::string_view, 5> names = {e.key, e.display, e.aliases[0], e.aliases[1],
                                             e.aliases[2]};
    for (auto n : names) {
      std::size_t len = 0;
      if (!n.empty() && match_phrase(toks, 0, n, len) && len == toks.size())
        return std::string(e.key);
    }
  }
  return std::nullopt;
}

std::span<const std::string_view> object_keys() { return kObjectKeys; }
std::span<const std::string_view> fixture_keys() { return kFixtureKeys; }

FixtureKind fixture_kind(std::string_view key) {
  const FixtureEntry* e = fixture_entry(key);
  if (e == nullptr) throw InvalidArgument("unknown fixture key '" + std::string(key) + "'");
  return e->kind;
}

TaskSpec compile_instruction(std::string_view text) {
  const Tokens toks = tokenize(text);
  for (const auto& prod : productions()) {
    Bindings b;
    if (match(prod.pattern, 0, toks, 0, b)) {
      TaskSpec spec;
      spec.instruction = std::string(text);
      spec.subgoals = prod.build(b);
      return spec;
    }
  }
  const Production* nearest = nullptr;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& prod : productions()) {
    const std::size_t d = template_distance(toks, prod.shape);
    if (d < best) {
      best = d;
      nearest = &prod;
    }
  }
  throw ParseError("instruction not in grammar: '" + std::string(text) +
                   "'; nearest production: '" + std::string(nearest->shape) + "'");
}

std::string render_instruction(std::span<const Subgoal> g, Surface surface) {
  const bool re = surface == Surface::rephrase;
  auto o = [&](std::size_t i) { return object_surface(g[i].object, surface); };
  auto f = [&](std::size_t i) { return fixture_surface(g[i].fixture, surface); };
  auto in_kind = [](const Subgoal& s) { return (kInKinds & kind_bit(fixture_kind(s.fixture))) != 0; };

  if (g.size() == 1 && g[0].predicate == Predicate::In && in_kind(g[0]))
    return std::string(re ? "place the " : "put the ") + o(0) + " in the " + f(0);
  if (g.size() == 1 && g[0].predicate == Predicate::On && !in_kind(g[0]))
    return std::string(re ? "set the " : "put the ") + o(0) + " on the " + f(0);
  if (g.size() == 2) {
    const auto p0 = g[0].predicate, p1 = g[1].predicate;
    if (p0 == Predicate::In && p1 == Predicate::In && g[0].fixture == g[1].fixture &&
        fixture_kind(g[0].fixture) == FixtureKind::basket && g[0].object != g[1].object)
      return std::string(re ? "place both the " : "put both the ") + o(0) + " and the " + o(1) +
             " in the " + f(0);
    if (p0 == Predicate::In && p1 == Predicate::Closed && g[0].fixture == g[1].fixture &&
        is_openable(fixture_kind(g[0].fixture)))
      return re ? "place the " + o(0) + " inside the " + f(0) + " and shut it"
                : "put the " + o(0) + " in the " + f(0) + " and close it";
    if (p0 == Predicate::Activated && p1 == Predicate::On && g[0].fixture == g[1].fixture &&
        fixture_kind(g[0].fixture) == FixtureKind::stove)
      return re ? "switch on the " + f(0) + " and set the " + o(1) + " on it"
                : "turn on the " + f(0) + " and put the " + o(1) + " on it";
    if (p0 == Predicate::On && p1 == Predicate::On && !in_kind(g[0]) && !in_kind(g[1]))
      return std::string(re ? "set the " : "put the ") + o(0) + " on the " + f(0) + " and the " +
             o(1) + " on the " + f(1);
  }
  std::string shape;
  for (const auto& s : g) shape += to_string(s) + " ";
  throw InvalidArgument("no grammar production renders subgoals: " + shape);
}

std::string plan_sentence(const Subgoal& g) {
  switch (g.predicate) {
    case Predicate::In: return "put the " + display_name(g.object) + " in the " + display_name(g.fixture);
    case Predicate::On: return "put the " + display_name(g.object) + " on the " + display_name(g.fixture);
    case Predicate::Closed: return "close the " + display_name(g.fixture);
    case Predicate::Activated: return "turn on the " + display_name(g.fixture);
  }
  return {};
}

Subgoal parse_plan_sentence(std::string_view sentence) {
  const Tokens toks = tokenize(sentence);
  Bindings b;
  if (match({word({"put"}), word({"the"}), obj(), word({"in"}), word({"the"}), fix()}, 0, toks, 0, b))
    return {Predicate::In, b.objects[0], b.fixtures[0]};
  b = {};
  if (match({word({"put"}), word({"the"}), obj(), word({"on"}), word({"the"}), fix()}, 0, toks, 0, b))
    return {Predicate::On, b.objects[0], b.fixtures[0]};
  b = {};
  if (match({word({"close"}), word({"the"}), fix()}, 0, toks, 0, b))
    return {Predicate::Closed, "", b.fixtures[0]};
  b = {};
  if (match({word({"turn"}), word({"on"}), word({"the"}), fix()}, 0, toks, 0, b))
    return {Predicate::Activated, "", b.fixtures[0]};
  throw ParseError("unrecognized plan sentence: '" + std::string(sentence) + "'");
}

}  // namespace vlasteer
