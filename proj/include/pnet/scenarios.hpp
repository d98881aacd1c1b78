#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pnet/diffusion.hpp"
#include "pnet/optimizer.hpp"

namespace pnet {

struct MonteCarloCheck {
  double mean = 0.0;
  double std_err = 0.0;
  double limit = 0.0;
  std::size_t n = 0;
  std::size_t reps = 0;
  bool within = false;  // |mean − limit| ≤ 3 standard errors
};

struct ScenarioResult {
  std::string name;
  std::vector<std::pair<std::string, bool>> hypotheses;
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<std::pair<std::string, double>> values;
  std::optional<double> network_value;
  std::optional<double> public_value;
  std::optional<MonteCarloCheck> monte_carlo;
  std::vector<std::string> notes;
  bool verdict = false;

  void check(std::string label, bool ok) { checks.emplace_back(std::move(label), ok); }
  void value(std::string label, double v) { values.emplace_back(std::move(label), v); }
  /// False when the check is missing.
  bool check_passed(const std::string& label) const {
    for (const auto& [k, ok] : checks)
      if (k == label) return ok;
    return false;
  }
};

struct ScenarioOptions {
  LimitOptions limits;
  OptimizeOptions optimize;
  /// Monte Carlo cross-check; skipped when sim.reps == 0.
  SimOptions sim{.n = 0, .reps = 0};
  std::uint64_t seed = 1;
  /// Sceptics: expected degree of sceptics must reach this and believers' stay below its reciprocal.
  double degree_bound = 2.0;
  /// CRRA: r > 1 in the Int-signal construction, and the b values swept downward.
  double crra_r = 1.01;
  std::vector<double> crra_b{1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
};

inline constexpr double kBaselineTol = 1e-10;

ScenarioResult scenario_baseline(const ModelParams& params, const ScenarioOptions& options = {});
ScenarioResult scenario_homophily(const ModelParams& params, const ScenarioOptions& options = {});
ScenarioResult scenario_sceptics(const ModelParams& params, const ScenarioOptions& options = {});
ScenarioResult scenario_crra(const ModelParams& params, const ScenarioOptions& options = {});
ScenarioResult scenario_voting(const ModelParams& params, const ScenarioOptions& options = {});

ScenarioResult run_scenario(const std::string& name, const ModelParams& params, const ScenarioOptions& options = {});
const std::vector<std::string>& scenario_names();

/// Default desk-scale configuration for a named scenario.
ModelParams scenario_defaults(const std::string& name);

/// κ = (R_h − 1)/(R_h − R_l) with R_t the prior odds of state 1.
double crra_kappa(const ModelParams& params);
/// π(s'|1) = r(1−κ), π(s'|0) = R_h r(1−κ): believer-indifferent Int signal.
ReducedStrategy crra_strategy(const ModelParams& params, double r);
/// π(s|1) = 1, π(s|0) = R_l: Good signal at sceptic indifference.
ReducedStrategy sceptics_strategy(const ModelParams& params);
/// π(s'|1) = μ_h0/μ_h1, π(s'|0) = 1.
ReducedStrategy voting_strategy(const ModelParams& params);

}  // namespace pnet
