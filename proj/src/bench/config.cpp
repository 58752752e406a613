#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vlasteer/bench.hpp"
#include "vlasteer/error.hpp"

namespace vlasteer {
namespace {

using nlohmann::json;

// Typed access to one JSON object; every key must be consumed.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ~Fields() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string at(const std::string& key) const { return path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError(at(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void integer(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) throw ConfigError(at(key) + ": expected an integer");
      out = v->get<int>();
    }
  }
  void string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(at(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

SuiteTag suite_of(const std::string& name, const std::string& where) {
  if (auto s = parse_suite(name)) return *s;
  throw ConfigError(where + ": unknown suite '" + name + "'");
}

CorruptionFactors parse_factors(const json& j, const std::string& path, CorruptionFactors f) {
  Fields r(j, path);
  r.number("plan", f.plan);
  r.number("wrong", f.wrong);
  r.number("noise", f.noise);
  r.number("ground", f.ground);
  return f;
}

PolicyConfig parse_policy(const json& j, const std::string& path) {
  PolicyConfig p;
  Fields r(j, path);
  r.number("p_plan_err", p.p_plan_err);
  r.number("p_wrong", p.p_wrong);
  r.number("p_noise", p.p_noise);
  r.integer("h_max", p.h_max);
  r.number("t_act", p.t_act);
  r.number("dynamics_noise", p.dynamics_noise);
  if (const json* c = r.get("corruption")) {
    if (!c->is_object()) throw ConfigError(r.at("corruption") + ": expected an object");
    for (const auto& [name, f] : c->items()) {
      const std::string where = r.at("corruption") + "." + name;
      const SuiteTag s = suite_of(name, where);
      p.corruption[s] = parse_factors(f, where, p.corruption[s]);
    }
  }
  return p;
}

SteerVariant parse_variant(const json& j, const std::string& path) {
  SteerVariant v;
  Fields r(j, path);
  const json* sj = r.get("strategy");
  if (sj == nullptr || !sj->is_string()) throw ConfigError(r.at("strategy") + ": expected a strategy name");
  const std::string name = sj->get<std::string>();
  auto strategy = parse_strategy(name);
  if (!strategy) throw ConfigError(r.at("strategy") + ": unknown strategy '" + name + "'");
  v.steer.strategy = *strategy;
  if (r.get("k") != nullptr) {
    int k = 0;
    r.integer("k", k);
    v.k = k;
    v.steer.k = k;
  }
  std::string fb = std::string(to_string(v.steer.fallback));
  r.string("fallback", fb);
  auto fallback = parse_fallback(fb);
  if (!fallback) throw ConfigError(r.at("fallback") + ": unknown fallback '" + fb + "'");
  v.steer.fallback = *fallback;
  if (const json* m = r.get("value_miscalibration")) {
    if (!m->is_object()) throw ConfigError(r.at("value_miscalibration") + ": expected an object");
    for (const auto& [name2, w] : m->items()) {
      const std::string where = r.at("value_miscalibration") + "." + name2;
      if (!w.is_number()) throw ConfigError(where + ": expected a number");
      v.steer.value_miscalibration[suite_of(name2, where)] = w.get<double>();
    }
  }
  r.integer("chunk_len", v.steer.chunk_len);
  return v;
}

ServiceTime parse_service(const json& j, const std::string& path) {
  ServiceTime st;
  Fields r(j, path);
  std::string kind = "uniform";
  r.string("kind", kind);
  if (kind == "uniform") {
    st.kind = ServiceTime::Kind::uniform;
    r.number("lo", st.lo);
    r.number("hi", st.hi);
  } else if (kind == "constant") {
    st.kind = ServiceTime::Kind::constant;
    r.number("c", st.c);
  } else {
    throw ConfigError(r.at("kind") + ": unknown service time kind '" + kind + "'");
  }
  return st;
}

LatencyModel parse_latency(const json& j, const std::string& path) {
  LatencyModel lat;
  Fields r(j, path);
  r.number("sample_c0", lat.sample_c0);
  r.number("sample_c1", lat.sample_c1);
  r.integer("control_steps_per_action", lat.control_steps_per_action);
  if (const json* v = r.get("verifier")) {
    const std::string vp = r.at("verifier");
    Fields vr(*v, vp);
    vr.number("alpha", lat.verifier.alpha);
    vr.number("beta", lat.verifier.beta);
    vr.integer("pool_limit", lat.verifier.pool_limit);
    if (const json* s = vr.get("service_time")) lat.verifier.service_time = parse_service(*s, vr.at("service_time"));
  }
  return lat;
}

}  // namespace

void BenchConfig::validate() const {
  if (suites.empty()) throw ConfigError("suites must be nonempty");
  if (trials_per_task < 1) throw ConfigError("trials_per_task must be >= 1");
  if (k_sweep.empty()) throw ConfigError("k_sweep must be nonempty");
  for (int k : k_sweep)
    if (k < 1) throw ConfigError("k_sweep entries must be >= 1");
  for (SuiteTag s : suites)
    for (int t : tasks)
      if (t < 0 || t >= suite_size(s))
        throw ConfigError("task index " + std::to_string(t) + " out of range for " + std::string(to_string(s)));
  if (steer.empty()) throw ConfigError("steer must list at least one strategy");
  std::set<Strategy> seen;
  for (const auto& v : steer) {
    v.steer.validate();
    if (!seen.insert(v.steer.strategy).second)
      throw ConfigError("duplicate steer strategy '" + std::string(to_string(v.steer.strategy)) + "'");
  }
  policy.validate();
  latency.validate();
}

BenchConfig parse_bench_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  BenchConfig cfg;
  {
    Fields r(j, "config");
    if (const json* s = r.get("suites")) {
      if (!s->is_array()) throw ConfigError("config.suites: expected an array");
      cfg.suites.clear();
      for (const auto& e : *s) {
        if (!e.is_string()) throw ConfigError("config.suites: expected suite names");
        cfg.suites.push_back(suite_of(e.get<std::string>(), "config.suites"));
      }
    }
    if (const json* t = r.get("tasks")) {
      if (t->is_string() && t->get<std::string>() == "all") {
        cfg.tasks.clear();
      } else if (t->is_array()) {
        for (const auto& e : *t) {
          if (!e.is_number_integer()) throw ConfigError("config.tasks: expected integers or \"all\"");
          cfg.tasks.push_back(e.get<int>());
        }
      } else {
        throw ConfigError("config.tasks: expected a list of indices or \"all\"");
      }
    }
    r.integer("trials_per_task", cfg.trials_per_task);
    if (const json* k = r.get("k_sweep")) {
      if (!k->is_array()) throw ConfigError("config.k_sweep: expected an array");
      cfg.k_sweep.clear();
      for (const auto& e : *k) {
        if (!e.is_number_integer()) throw ConfigError("config.k_sweep: expected integers");
        cfg.k_sweep.push_back(e.get<int>());
      }
    }
    if (const json* s = r.get("seed0")) {
      if (!s->is_number_unsigned()) throw ConfigError("config.seed0: expected a non-negative integer");
      cfg.seed0 = s->get<std::uint64_t>();
    }
    if (const json* p = r.get("policy")) cfg.policy = parse_policy(*p, "config.policy");
    if (const json* s = r.get("steer")) {
      if (!s->is_array()) throw ConfigError("config.steer: expected an array");
      cfg.steer.clear();
      for (std::size_t i = 0; i < s->size(); ++i)
        cfg.steer.push_back(parse_variant((*s)[i], "config.steer[" + std::to_string(i) + "]"));
    }
    if (const json* l = r.get("latency")) cfg.latency = parse_latency(*l, "config.latency");
    std::string out = cfg.output_dir.string();
    r.string("output_dir", out);
    cfg.output_dir = out;
  }
  cfg.validate();
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_bench_config(ss.str());
}

}  // namespace vlasteer
