#include "doctest.h"

#include <string>

#include "pnet/config.hpp"
#include "pnet/errors.hpp"

using namespace pnet;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults and overrides") {
    const RunConfig d = parse_config("{}");
    CHECK(d.engine.n == 10000);
    CHECK(d.engine.seed_exponent == 0.5);
    const RunConfig c = parse_config(R"({"model": {"q": 0.5, "payoff": {"kind": "step", "param": 0.6}},
      "engine": {"seed": 7, "sharing": "sceptics_relay_int", "seed_exponent": 0.4},
      "strategy": {"signals": [{"label": "s", "pi1": 1, "pi0": 0.5, "seeding": "on_lhat1"}]}})");
    CHECK(c.model.q == 0.5);
    CHECK(c.model.payoff == PayoffFn::step(0.6));
    CHECK(c.engine.seed == 7);
    CHECK(c.engine.sharing == SharingRule::ScepticsRelayInt);
    CHECK(c.strategy.seed_exponent == 0.4);
    REQUIRE(c.strategy.signals.size() == 1);
    CHECK(c.strategy.signals[0].seeding.kind == SeedKind::OnLhat1);
  }

  TEST_CASE("round trip") {
    RunConfig c;
    c.model.gamma_h = 0.3;
    c.model.f_h = {{0.1, 0.25}, {2.0 / 3.0, 0.75}};
    c.model.payoff = PayoffFn::crra(0.05);
    c.engine.n = 12345;
    c.scenario.crra_b = {0.3, 0.1};
    c.strategy.signals.push_back({"int", 0.2, 0.3, {SeedKind::UniformRandom, 4}});
    CHECK(parse_config(dump_config(c)) == c);
  }

  TEST_CASE("errors are anchored to the offending line") {
    CHECK(error_of("{\n  \"model\": {\n    \"qq\": 1\n  }\n}") .rfind("cfg.json:3:", 0) == 0);
    CHECK(error_of("{\n  \"engine\": {\n    \"n\": -4\n  }\n}").rfind("cfg.json:3:", 0) == 0);
    CHECK(error_of("{\n  \"engine\": {\"n\": 100},\n  \"model\": {\n    \"f_l\": [\n      {\"lambda\": 1, \"prob\": 0.5}\n    ]\n  }\n}")
              .rfind("cfg.json:3:", 0) == 0);
    CHECK(error_of("{\n\n  \"model\": [1,\n}").rfind("cfg.json:4:", 0) == 0);
    CHECK(error_of("{\"strategy\": {\"signals\": [{\"pi1\": 0.9, \"pi0\": 0.2}, {\"pi1\": 0.5}]}}").find("sum") !=
          std::string::npos);
    CHECK(error_of(R"({"engine": {"rng": "mt19937"}})").find("unsupported generator") != std::string::npos);
    CHECK(error_of(R"({"extra": 1})").find("unknown key 'extra'") != std::string::npos);
    CHECK(error_of(R"({"model": {"payoff": {"kind": "cubic"}}})").find("cubic") != std::string::npos);
  }
}
