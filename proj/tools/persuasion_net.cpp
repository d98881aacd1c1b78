// persuasion-net: limits, sampling, simulation, optimization and scenario runs.
//
// Exit codes: 0 success, 1 invalid input, 2 a checked verdict or assertion failed.

#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "pnet/config.hpp"
#include "pnet/errors.hpp"
#include "pnet/report.hpp"
#include "pnet/selftest.hpp"

namespace fs = std::filesystem;
using namespace pnet;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kVerdict = 2;

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::size_t threads = 0;
};

struct Loaded {
  RunConfig config;
  bool has_model = false;
};

Loaded load(const Common& c) {
  Loaded l;
  if (c.config_path.empty()) return l;
  std::ifstream is(c.config_path);
  if (!is) throw ValidationError(fmt::format("{}: cannot open", c.config_path));
  std::stringstream ss;
  ss << is.rdbuf();
  l.config = parse_config(ss.str(), c.config_path);
  l.has_model = nlohmann::json::parse(ss.str()).contains("model");
  return l;
}

std::size_t resolve_threads(std::size_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("PERSUASION_NET_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
      throw ValidationError(fmt::format("PERSUASION_NET_THREADS must be a positive integer, got '{}'", env));
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void print_scenario(const ScenarioResult& r) {
  fmt::print("{}: {}\n", r.name, r.verdict ? "pass" : "fail");
  if (r.network_value) fmt::print("  network {:.10g}\n", *r.network_value);
  if (r.public_value) fmt::print("  public  {:.10g}\n", *r.public_value);
  for (const auto& [k, ok] : r.checks) fmt::print("  [{}] {}\n", ok ? "ok" : "FAIL", k);
  if (r.monte_carlo)
    fmt::print("  monte carlo {:.6g} +- {:.3g} (limit {:.6g}, n={}, reps={})\n", r.monte_carlo->mean,
               r.monte_carlo->std_err, r.monte_carlo->limit, r.monte_carlo->n, r.monte_carlo->reps);
  for (const auto& n : r.notes) fmt::print("  note: {}\n", n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limit analysis and simulation of persuasion through network-shared signals"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", common.threads, "worker cap (default: PERSUASION_NET_THREADS, then all cores)");
  };

  auto* limits_cmd = app.add_subcommand("limits", "degree laws, giant fractions and observation curves");
  auto* sample_cmd = app.add_subcommand("sample", "sample one network and report empirical statistics");
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo payoff of the configured strategy");
  auto* optimize_cmd = app.add_subcommand("optimize", "optimal strategy under network or public signals");
  bool want_public = false, want_network = false;
  optimize_cmd->add_flag("--public", want_public, "public signals");
  optimize_cmd->add_flag("--network", want_network, "network signals (default)");
  auto* compare_cmd = app.add_subcommand("compare", "network versus public optimum with proposition verdicts");
  auto* scenario_cmd = app.add_subcommand("scenario", "run a named scenario, or 'all'");
  std::string scenario_name;
  scenario_cmd->add_option("name", scenario_name, "baseline|homophily|sceptics|crra|voting|all")->required();
  auto* selftest_cmd = app.add_subcommand("selftest", "run the invariant suite");
  for (auto* sub : {limits_cmd, sample_cmd, simulate_cmd, optimize_cmd, compare_cmd, scenario_cmd, selftest_cmd})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    const std::size_t threads = resolve_threads(common.threads);
    const Loaded loaded = load(common);
    RunConfig cfg = loaded.config;
    const fs::path out = common.out_dir;
    fs::create_directories(out);

    if (selftest_cmd->parsed()) {
      bool all = true;
      for (const auto& item : run_selftest()) {
        fmt::print("{} {}{}\n", item.ok ? "ok  " : "FAIL", item.name, item.detail.empty() ? "" : " (" + item.detail + ")");
        all = all && item.ok;
      }
      return all ? kOk : kVerdict;
    }

    if (scenario_cmd->parsed()) {
      std::vector<std::string> names;
      if (scenario_name == "all") {
        if (loaded.has_model) throw ValidationError("scenario all uses each scenario's defaults; drop the model section");
        names = scenario_names();
      } else {
        names = {scenario_name};
      }
      std::vector<ScenarioResult> results;
      for (const auto& name : names) {
        RunConfig run = cfg;
        if (!loaded.has_model) run.model = scenario_defaults(name);
        results.push_back(run_scenario(name, run.model, scenario_options(run, threads)));
        write_scenario(out, results.back());
        print_scenario(results.back());
        if (names.size() == 1) cfg = run;
      }
      write_report_csv(out, results);
      write_resolved_config(out, cfg);
      const bool pass = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.verdict; });
      return pass ? kOk : kVerdict;
    }

    write_resolved_config(out, cfg);
    const LimitStats limits = compute_limits(cfg.model, limit_options(cfg));

    if (limits_cmd->parsed()) {
      write_limits(out, limits);
      fmt::print("c={:.12g} c_hat={:.12g} q_h={:.12g} q_l={:.12g} d_vote={}\n", limits.c, limits.c_hat, limits.laws.q[0],
                 limits.laws.q[1], limits.d_vote ? std::to_string(*limits.d_vote) : "inf");
      return kOk;
    }
    if (sample_cmd->parsed()) {
      const NetworkInstance net = sample_network(cfg.model, cfg.engine.n, RngSpec{cfg.engine.seed},
                                                 {cfg.engine.edge_budget, threads});
      write_sample(out, net, limits);
      fmt::print("n={} edges={}\n", net.size(), net.edge_count());
      return kOk;
    }
    if (simulate_cmd->parsed()) {
      if (cfg.strategy.signals.empty()) fmt::print("note: strategy has no signals; every replicate observes nothing\n");
      const SimReport sim = simulate_payoff(cfg.model, cfg.strategy, sim_options(cfg, threads), RngSpec{cfg.engine.seed});
      write_simulation(out, sim, cfg.strategy, limits);
      fmt::print("mean payoff {:.10g} +- {:.3g} over {} replicates\n", sim.mean, sim.std_err, cfg.engine.reps);
      return kOk;
    }
    if (optimize_cmd->parsed()) {
      if (want_public && want_network) throw ValidationError("choose one of --public and --network");
      const PayoffReport r = want_public ? optimize_public(cfg.model, optimize_options(cfg, threads))
                                         : optimize_network(cfg.model, limits, optimize_options(cfg, threads));
      write_optimum(out, r);
      fmt::print("{} optimum {:.12g} at ({:.9g}, {:.9g}, {:.9g}, {:.9g})\n", r.regime, r.value, r.strategy.pi_s1,
                 r.strategy.pi_s0, r.strategy.pi_sp1, r.strategy.pi_sp0);
      return kOk;
    }
    if (compare_cmd->parsed()) {
      const Comparison c = compare(cfg.model, limit_options(cfg), optimize_options(cfg, threads));
      write_compare(out, c);
      fmt::print("network {:.12g} public {:.12g} gap {:.3g} ({}: {})\n", c.network.value, c.public_.value, c.gap,
                 c.applicable, c.predicted);
      if (c.holds && !*c.holds) {
        fmt::print(stderr, "verdict failure: prediction '{}' does not hold\n", c.predicted);
        return kVerdict;
      }
      return kOk;
    }
  } catch (const ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInvalid;
  } catch (const VerdictFailure& e) {
    fmt::print(stderr, "verdict failure: {}\n", e.what());
    return kVerdict;
  } catch (const SolverError& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kVerdict;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInvalid;
  }
  return kOk;
}
