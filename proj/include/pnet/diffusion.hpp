#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pnet/components.hpp"
#include "pnet/model.hpp"
#include "pnet/network.hpp"
#include "pnet/rng.hpp"

namespace pnet {

enum class SeedKind : std::uint8_t { OnL1, OnLhat1, UniformRandom, None };

struct SeedPolicy {
  SeedKind kind = SeedKind::OnL1;
  std::size_t count = 1;  // UniformRandom only
  friend bool operator==(const SeedPolicy&, const SeedPolicy&) = default;
};

std::string_view seed_kind_name(SeedKind k);
SeedKind seed_kind_from_name(std::string_view name);

struct Signal {
  std::string label;
  double pi1 = 0.0;  // probability of sending in state 1
  double pi0 = 0.0;  // probability of sending in state 0
  SeedPolicy seeding;
  friend bool operator==(const Signal&, const Signal&) = default;
};

struct SenderStrategy {
  std::vector<Signal> signals;  // the rest of the mass is ∅
  double seed_exponent = 0.5;

  double sent(int state, std::size_t s) const { return state == 1 ? signals[s].pi1 : signals[s].pi0; }
  double empty_prob(int state) const;
  void validate() const;
  friend bool operator==(const SenderStrategy&, const SenderStrategy&) = default;
};

/// Who relays an observed signal.
enum class SharingRule : std::uint8_t {
  Persuaded,         // receivers who take action 1 on it
  AgreeWithContent,  // receivers whose action equals the state the signal favours
  ScepticsRelayInt,  // as Persuaded, except signals that persuade only believers are relayed by sceptics
};

std::string_view sharing_rule_name(SharingRule r);
SharingRule sharing_rule_from_name(std::string_view name);

/// (a_h, a_l) per signal.
using SignalActions = std::array<int, 2>;

std::vector<SignalActions> actions_on_signals(const SenderStrategy& strategy, const ModelParams& params);

/// Sharer flag per type for one signal.
std::array<bool, 2> sharers_for(const Signal& signal, const SignalActions& actions, SharingRule rule);

/// Best response upon ∅ given the chances (per state) that ∅ is what the
/// receiver ends up seeing. Ties and the never-in-state-0 case go to 1.
int empty_action(double prior1, double empty1, double empty0);

std::size_t seed_budget(std::size_t n, double alpha);

struct SeedSelection {
  std::vector<NodeId> nodes;
  bool fallback = false;
};

SeedSelection select_seeds(const NetworkInstance& net, const ComponentDecomposition& full,
                           const BelieverDecomposition& believers, const SeedPolicy& policy, std::size_t budget,
                           Philox& g);

/// Nodes reached from the seeds through sharer nodes; 1 marks an observer.
std::vector<char> spread(const NetworkInstance& net, const std::vector<NodeId>& seeds,
                         const std::function<bool(NodeId)>& sharer);

/// P(observe s | s sent, t, d), tabulated per signal and type.
struct ObservationTable {
  std::vector<std::array<std::vector<double>, 2>> prob;
  std::vector<std::array<std::vector<double>, 2>> observed;  // pooled counts, for reporting
  std::array<std::vector<double>, 2> nodes;                  // pooled N_{t,d}

  /// Beyond the table the last tabulated degree is reused.
  double at(std::size_t s, Type t, std::size_t d) const;
};

struct EquilibriumActions {
  std::vector<SignalActions> on_signal;
  std::array<std::vector<int>, 2> on_empty;
  std::vector<std::string> log;

  int empty_at(Type t, std::size_t d) const;
};

EquilibriumActions equilibrium(const SenderStrategy& strategy, const ModelParams& params, const ObservationTable& obs);

struct SimOptions {
  std::size_t n = 10000;
  std::size_t reps = 100;
  std::size_t pilot_reps = 200;
  std::size_t threads = 1;
  double edge_budget = 5e7;
  SharingRule sharing = SharingRule::Persuaded;
};

struct ReplicateRow {
  std::size_t rep = 0;
  int state = 0;
  int signal = -1;  // -1 for ∅
  std::size_t n_observed = 0;
  double fraction_action1 = 0.0;
  double payoff = 0.0;
};

struct SimReport {
  double mean = 0.0;
  double std_err = 0.0;
  std::vector<ReplicateRow> rows;
  ObservationTable pilot;
  EquilibriumActions actions;
  std::size_t seed_fallbacks = 0;
};

/// Ensemble estimate of the observation table over `reps` fresh networks.
ObservationTable estimate_observation(const ModelParams& params, const SenderStrategy& strategy,
                                      const SimOptions& options, std::size_t reps, const RngSpec& rng,
                                      std::string_view purpose, std::size_t* fallbacks = nullptr);

SimReport simulate_payoff(const ModelParams& params, const SenderStrategy& strategy, const SimOptions& options,
                          const RngSpec& rng);

}  // namespace pnet
