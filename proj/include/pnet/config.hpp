#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "pnet/diffusion.hpp"
#include "pnet/limits.hpp"
#include "pnet/model.hpp"
#include "pnet/optimizer.hpp"
#include "pnet/scenarios.hpp"

namespace pnet {

inline constexpr const char* kRngName = "philox4x32-10";

struct EngineConfig {
  std::size_t n = 10000;
  std::size_t reps = 100;
  std::size_t pilot_reps = 200;
  std::uint64_t seed = 1;
  std::string rng = kRngName;
  double tail_cutoff = 1e-9;
  double tol = 1e-12;
  std::size_t max_iter = 200000;
  std::size_t d_max_floor = 64;
  std::size_t grid_n = 201;
  std::size_t refine_iters = 3;
  double seed_exponent = 0.5;
  double edge_budget = 5e7;
  SharingRule sharing = SharingRule::Persuaded;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

struct ScenarioConfig {
  double degree_bound = 2.0;
  double crra_r = 1.01;
  std::vector<double> crra_b{1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
  bool monte_carlo = false;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct RunConfig {
  ModelParams model;
  EngineConfig engine;
  SenderStrategy strategy;  // seed_exponent mirrors engine.seed_exponent
  ScenarioConfig scenario;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates; errors carry "<source>:<line>:" prefixes.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ModelParams& params);
std::string dump_config(const RunConfig& config);

LimitOptions limit_options(const RunConfig& config);
OptimizeOptions optimize_options(const RunConfig& config, std::size_t threads);
SimOptions sim_options(const RunConfig& config, std::size_t threads);
/// Monte Carlo runs only when scenario.monte_carlo is set, at engine.n and engine.reps.
ScenarioOptions scenario_options(const RunConfig& config, std::size_t threads);

}  // namespace pnet
