#include "pnet/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pnet/errors.hpp"

namespace pnet {
namespace {

using json = nlohmann::json;

/// Maps JSON pointers to the source line where the value (or its key) starts.
/// nlohmann's DOM keeps no positions, so this is a small scan of the text.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) {
    struct Frame {
      bool object;
      std::string key;
      std::size_t next_index = 0;
    };
    std::vector<Frame> stack;
    std::size_t line = 1;
    bool expect_key = false;
    std::string pending_key;
    auto path = [&](const std::string& last) {
      std::string p;
      for (const auto& f : stack) {
        if (&f == &stack.back()) break;
        p += "/" + f.key;
      }
      return stack.empty() ? p : p + "/" + last;
    };
    auto mark_value = [&] {
      if (stack.empty()) {
        lines_.emplace("", line);
        return;
      }
      Frame& top = stack.back();
      if (!top.object) {
        top.key = std::to_string(top.next_index++);
        lines_.emplace(path(top.key), line);
      }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (c == '\n') {
        ++line;
        continue;
      }
      if (c == '"') {
        std::string s;
        for (++i; i < text.size() && text[i] != '"'; ++i) {
          if (text[i] == '\\' && i + 1 < text.size()) ++i;
          if (text[i] == '\n') ++line;
          s += text[i];
        }
        if (expect_key) {
          stack.back().key = s;
          lines_.emplace(path(s), line);
          expect_key = false;
        } else {
          mark_value();
        }
        continue;
      }
      if (c == '{' || c == '[') {
        mark_value();
        stack.push_back({c == '{', "", 0});
        expect_key = c == '{';
        continue;
      }
      if (c == '}' || c == ']') {
        if (!stack.empty()) stack.pop_back();
        if (!stack.empty() && stack.back().object) expect_key = false;
        continue;
      }
      if (c == ',') {
        if (!stack.empty() && stack.back().object) expect_key = true;
        continue;
      }
      if (c == ':' || std::isspace(static_cast<unsigned char>(c))) continue;
      // Scalar literal: mark once at its first character.
      if (!stack.empty() && !stack.back().object) mark_value();
      while (i + 1 < text.size() && !std::strchr(",]}\n \t\r", text[i + 1])) ++i;
    }
  }

  std::size_t line_of(std::string pointer) const {
    for (;;) {
      const auto it = lines_.find(pointer);
      if (it != lines_.end()) return it->second;
      const auto slash = pointer.rfind('/');
      if (slash == std::string::npos) return 1;
      pointer.resize(slash);
    }
  }

 private:
  std::map<std::string, std::size_t> lines_;
};

class Reader {
 public:
  Reader(const LineIndex& index, std::string source) : index_(index), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    throw ValidationError(fmt::format("{}:{}: {}: {}", source_, index_.line_of(pointer), pointer.empty() ? "/" : pointer, what));
  }

  void only_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
      if (!ok.count(k)) fail(ptr + "/" + k, fmt::format("unknown key '{}'", k));
  }

  double number(const json& obj, const std::string& ptr, const char* key, double fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(ptr + "/" + key, "expected a number");
    return v.get<double>();
  }

  std::uint64_t count(const json& obj, const std::string& ptr, const char* key, std::uint64_t fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) fail(ptr + "/" + key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::string text(const json& obj, const std::string& ptr, const char* key, const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(ptr + "/" + key, "expected a string");
    return v.get<std::string>();
  }

  bool flag(const json& obj, const std::string& ptr, const char* key, bool fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(ptr + "/" + key, "expected true or false");
    return v.get<bool>();
  }

  template <class Fn>
  auto guarded(const std::string& ptr, Fn&& fn) const {
    try {
      return fn();
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (what.rfind(source_ + ":", 0) == 0) throw;
      fail(ptr, what);
    }
  }

 private:
  const LineIndex& index_;
  std::string source_;
};

ConnectednessDist read_dist(const Reader& r, const json& v, const std::string& ptr) {
  if (!v.is_array()) r.fail(ptr, "expected an array of {lambda, prob}");
  ConnectednessDist f;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = fmt::format("{}/{}", ptr, i);
    r.only_keys(v[i], p, {"lambda", "prob"});
    if (!v[i].contains("lambda") || !v[i].contains("prob")) r.fail(p, "needs both lambda and prob");
    f.push_back({r.number(v[i], p, "lambda", 0.0), r.number(v[i], p, "prob", 0.0)});
  }
  return f;
}

ModelParams read_model(const Reader& r, const json& m) {
  const std::string ptr = "/model";
  r.only_keys(m, ptr, {"gamma_h", "mu_h1", "mu_l1", "mu_s1", "q", "f_h", "f_l", "payoff"});
  ModelParams p;
  p.gamma_h = r.number(m, ptr, "gamma_h", p.gamma_h);
  p.mu_h1 = r.number(m, ptr, "mu_h1", p.mu_h1);
  p.mu_l1 = r.number(m, ptr, "mu_l1", p.mu_l1);
  p.mu_s1 = r.number(m, ptr, "mu_s1", p.mu_s1);
  p.q = r.number(m, ptr, "q", p.q);
  if (m.contains("f_h")) p.f_h = read_dist(r, m.at("f_h"), ptr + "/f_h");
  if (m.contains("f_l")) p.f_l = read_dist(r, m.at("f_l"), ptr + "/f_l");
  if (m.contains("payoff")) {
    const json& v = m.at("payoff");
    const std::string pp = ptr + "/payoff";
    r.only_keys(v, pp, {"kind", "param"});
    p.payoff.kind = r.guarded(pp + "/kind", [&] { return payoff_kind_from_name(r.text(v, pp, "kind", "linear")); });
    p.payoff.param = r.number(v, pp, "param", 0.0);
  }
  r.guarded(ptr, [&] {
    p.validate();
    return 0;
  });
  return p;
}

EngineConfig read_engine(const Reader& r, const json& e) {
  const std::string ptr = "/engine";
  r.only_keys(e, ptr,
              {"n", "reps", "pilot_reps", "seed", "rng", "tail_cutoff", "tol", "max_iter", "d_max_floor", "grid_n",
               "refine_iters", "seed_exponent", "edge_budget", "sharing"});
  EngineConfig c;
  c.n = r.count(e, ptr, "n", c.n);
  c.reps = r.count(e, ptr, "reps", c.reps);
  c.pilot_reps = r.count(e, ptr, "pilot_reps", c.pilot_reps);
  c.seed = r.count(e, ptr, "seed", c.seed);
  c.rng = r.text(e, ptr, "rng", c.rng);
  if (c.rng != kRngName) r.fail(ptr + "/rng", fmt::format("unsupported generator '{}' (only {})", c.rng, kRngName));
  c.tail_cutoff = r.number(e, ptr, "tail_cutoff", c.tail_cutoff);
  c.tol = r.number(e, ptr, "tol", c.tol);
  c.max_iter = r.count(e, ptr, "max_iter", c.max_iter);
  c.d_max_floor = r.count(e, ptr, "d_max_floor", c.d_max_floor);
  c.grid_n = r.count(e, ptr, "grid_n", c.grid_n);
  c.refine_iters = r.count(e, ptr, "refine_iters", c.refine_iters);
  c.seed_exponent = r.number(e, ptr, "seed_exponent", c.seed_exponent);
  c.edge_budget = r.number(e, ptr, "edge_budget", c.edge_budget);
  c.sharing = r.guarded(ptr + "/sharing", [&] { return sharing_rule_from_name(r.text(e, ptr, "sharing", "persuaded")); });
  if (c.n < 2) r.fail(ptr + "/n", "must be >= 2");
  if (c.reps < 1) r.fail(ptr + "/reps", "must be >= 1");
  if (c.pilot_reps < 1) r.fail(ptr + "/pilot_reps", "must be >= 1");
  if (!(c.tail_cutoff > 0.0 && c.tail_cutoff <= 1e-3)) r.fail(ptr + "/tail_cutoff", "must lie in (0, 1e-3]");
  if (!(c.tol > 0.0)) r.fail(ptr + "/tol", "must be positive");
  if (c.grid_n < 2) r.fail(ptr + "/grid_n", "must be >= 2");
  if (!(c.seed_exponent > 0.0 && c.seed_exponent < 1.0)) r.fail(ptr + "/seed_exponent", "must lie in (0,1)");
  if (!(c.edge_budget > 0.0)) r.fail(ptr + "/edge_budget", "must be positive");
  return c;
}

SenderStrategy read_strategy(const Reader& r, const json& s) {
  const std::string ptr = "/strategy";
  r.only_keys(s, ptr, {"signals"});
  SenderStrategy st;
  if (!s.contains("signals")) return st;
  const json& arr = s.at("signals");
  if (!arr.is_array()) r.fail(ptr + "/signals", "expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = fmt::format("{}/signals/{}", ptr, i);
    r.only_keys(arr[i], p, {"label", "pi1", "pi0", "seeding", "count"});
    Signal sig;
    sig.label = r.text(arr[i], p, "label", fmt::format("s{}", i));
    sig.pi1 = r.number(arr[i], p, "pi1", 0.0);
    sig.pi0 = r.number(arr[i], p, "pi0", 0.0);
    sig.seeding.kind = r.guarded(p + "/seeding", [&] { return seed_kind_from_name(r.text(arr[i], p, "seeding", "on_l1")); });
    sig.seeding.count = r.count(arr[i], p, "count", 1);
    st.signals.push_back(sig);
  }
  return st;
}

ScenarioConfig read_scenario(const Reader& r, const json& s) {
  const std::string ptr = "/scenario";
  r.only_keys(s, ptr, {"degree_bound", "crra_r", "crra_b", "monte_carlo"});
  ScenarioConfig c;
  c.degree_bound = r.number(s, ptr, "degree_bound", c.degree_bound);
  c.crra_r = r.number(s, ptr, "crra_r", c.crra_r);
  c.monte_carlo = r.flag(s, ptr, "monte_carlo", c.monte_carlo);
  if (s.contains("crra_b")) {
    const json& arr = s.at("crra_b");
    if (!arr.is_array()) r.fail(ptr + "/crra_b", "expected an array of numbers");
    c.crra_b.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) r.fail(fmt::format("{}/crra_b/{}", ptr, i), "expected a number");
      c.crra_b.push_back(arr[i].get<double>());
    }
  }
  return c;
}

json dist_json(const ConnectednessDist& f) {
  json a = json::array();
  for (const auto& m : f) a.push_back({{"lambda", m.lambda}, {"prob", m.prob}});
  return a;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ValidationError(fmt::format("{}:{}: malformed JSON ({})", source, line, e.what()));
  }
  const LineIndex index(text);
  const Reader r(index, source);
  r.only_keys(doc, "", {"model", "engine", "strategy", "scenario"});
  RunConfig cfg;
  if (doc.contains("model")) cfg.model = read_model(r, doc.at("model"));
  if (doc.contains("engine")) cfg.engine = read_engine(r, doc.at("engine"));
  if (doc.contains("strategy")) cfg.strategy = read_strategy(r, doc.at("strategy"));
  if (doc.contains("scenario")) cfg.scenario = read_scenario(r, doc.at("scenario"));
  cfg.strategy.seed_exponent = cfg.engine.seed_exponent;
  r.guarded("/strategy", [&] {
    cfg.strategy.validate();
    return 0;
  });
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError(fmt::format("{}: cannot open", path.string()));
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

json to_json(const ModelParams& p) {
  return {{"gamma_h", p.gamma_h},
          {"mu_h1", p.mu_h1},
          {"mu_l1", p.mu_l1},
          {"mu_s1", p.mu_s1},
          {"q", p.q},
          {"f_h", dist_json(p.f_h)},
          {"f_l", dist_json(p.f_l)},
          {"payoff", {{"kind", std::string(kind_name(p.payoff.kind))}, {"param", p.payoff.param}}}};
}

json to_json(const RunConfig& c) {
  const auto& e = c.engine;
  json signals = json::array();
  for (const auto& s : c.strategy.signals)
    signals.push_back({{"label", s.label},
                       {"pi1", s.pi1},
                       {"pi0", s.pi0},
                       {"seeding", std::string(seed_kind_name(s.seeding.kind))},
                       {"count", s.seeding.count}});
  return {{"model", to_json(c.model)},
          {"engine",
           {{"n", e.n},
            {"reps", e.reps},
            {"pilot_reps", e.pilot_reps},
            {"seed", e.seed},
            {"rng", e.rng},
            {"tail_cutoff", e.tail_cutoff},
            {"tol", e.tol},
            {"max_iter", e.max_iter},
            {"d_max_floor", e.d_max_floor},
            {"grid_n", e.grid_n},
            {"refine_iters", e.refine_iters},
            {"seed_exponent", e.seed_exponent},
            {"edge_budget", e.edge_budget},
            {"sharing", std::string(sharing_rule_name(e.sharing))}}},
          {"strategy", {{"signals", signals}}},
          {"scenario",
           {{"degree_bound", c.scenario.degree_bound},
            {"crra_r", c.scenario.crra_r},
            {"crra_b", c.scenario.crra_b},
            {"monte_carlo", c.scenario.monte_carlo}}}};
}

std::string dump_config(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

LimitOptions limit_options(const RunConfig& c) {
  return {c.engine.tail_cutoff, c.engine.d_max_floor, c.engine.tol, c.engine.max_iter};
}

OptimizeOptions optimize_options(const RunConfig& c, std::size_t threads) {
  return {c.engine.grid_n, c.engine.refine_iters, threads};
}

SimOptions sim_options(const RunConfig& c, std::size_t threads) {
  return {c.engine.n, c.engine.reps, c.engine.pilot_reps, threads, c.engine.edge_budget, c.engine.sharing};
}

ScenarioOptions scenario_options(const RunConfig& c, std::size_t threads) {
  ScenarioOptions o;
  o.limits = limit_options(c);
  o.optimize = optimize_options(c, threads);
  if (c.scenario.monte_carlo) o.sim = sim_options(c, threads);
  o.seed = c.engine.seed;
  o.degree_bound = c.scenario.degree_bound;
  o.crra_r = c.scenario.crra_r;
  o.crra_b = c.scenario.crra_b;
  return o;
}

}  // namespace pnet
