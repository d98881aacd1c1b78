#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "pnet/config.hpp"
#include "pnet/diffusion.hpp"
#include "pnet/limits.hpp"
#include "pnet/network.hpp"
#include "pnet/optimizer.hpp"
#include "pnet/scenarios.hpp"

namespace pnet {

/// Writers for the on-disk artifacts. CSV numbers use 17 significant digits;
/// JSON numbers use the shortest text that parses back to the same double.

std::string format_double(double x);

void write_text(const std::filesystem::path& path, const std::string& text);

nlohmann::json limits_json(const LimitStats& limits);
/// limits.csv and limits.json.
void write_limits(const std::filesystem::path& dir, const LimitStats& limits);

/// sim.csv and obsfrac.csv. The prediction column is ζ for OnL1 seeding,
/// ζ̂ for OnLhat1, and empty otherwise.
void write_simulation(const std::filesystem::path& dir, const SimReport& report, const SenderStrategy& strategy,
                      const LimitStats& limits);

/// edges.txt, nodes.txt and sample.json with per-type empirical statistics.
void write_sample(const std::filesystem::path& dir, const NetworkInstance& net, const LimitStats& limits);

nlohmann::json payoff_json(const PayoffReport& report);
void write_optimum(const std::filesystem::path& dir, const PayoffReport& report);
nlohmann::json comparison_json(const Comparison& c);
void write_compare(const std::filesystem::path& dir, const Comparison& c);

nlohmann::json scenario_json(const ScenarioResult& r);
void write_scenario(const std::filesystem::path& dir, const ScenarioResult& r);
/// One row per scenario: name, verdict, network, public, gap, Monte Carlo mean and SE.
void write_report_csv(const std::filesystem::path& dir, const std::vector<ScenarioResult>& results);

/// config.json: the fully resolved configuration of this run.
void write_resolved_config(const std::filesystem::path& dir, const RunConfig& config);

}  // namespace pnet
