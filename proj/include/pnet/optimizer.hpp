#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pnet/limits.hpp"
#include "pnet/model.hpp"

namespace pnet {

/// Two-signal strategy: a Good signal s (persuades both types) and an Int
/// signal s' (persuades believers only), both seeded on their giant structure.
struct ReducedStrategy {
  double pi_s1 = 0.0;
  double pi_s0 = 0.0;
  double pi_sp1 = 0.0;
  double pi_sp0 = 0.0;

  std::array<double, 4> as_array() const { return {pi_s1, pi_s0, pi_sp1, pi_sp0}; }
  static ReducedStrategy from_array(const std::array<double, 4>& x) { return {x[0], x[1], x[2], x[3]}; }

  /// Strict class check; throws ValidationError naming the broken constraint.
  void validate(const ModelParams& params) const;
  /// The same constraints with the Int strict inequality relaxed to its closure.
  bool feasible_closure(const ModelParams& params, double slack = 1e-12) const;

  friend bool operator==(const ReducedStrategy&, const ReducedStrategy&) = default;
};

/// Population cells (type, degree) with their weight and the chance each
/// signal reaches them. The tail beyond d_max is one extra cell per type.
struct Exposure {
  struct Cell {
    Type type;
    std::size_t degree;
    double weight;
    double good;  // chance of observing the Good signal
    double mid;   // chance of observing the Int signal
  };
  std::vector<Cell> cells;
  double tail_weight = 0.0;
};

Exposure network_exposure(const ModelParams& params, const LimitStats& limits);
/// Everyone observes every signal.
Exposure public_exposure(const ModelParams& params);

struct Evaluation {
  double value = 0.0;
  double x_good = 0.0;
  double x_mid = 0.0;
  double x_empty = 0.0;
};

/// Limit payoff under the given exposure. Uses the closure of the class
/// constraints; only the per-state sums are checked.
Evaluation evaluate(const ModelParams& params, const Exposure& exposure, const ReducedStrategy& strategy);

/// a*(∅; t, d) per cell of the exposure.
std::vector<int> empty_actions(const ModelParams& params, const Exposure& exposure, const ReducedStrategy& strategy);

double limit_payoff_network(const ModelParams& params, const LimitStats& limits, const ReducedStrategy& strategy);
double limit_payoff_public(const ModelParams& params, const ReducedStrategy& strategy);

struct OptimizeOptions {
  std::size_t grid_n = 201;
  std::size_t refine_iters = 3;
  std::size_t threads = 1;
};

struct PayoffReport {
  std::string regime;
  ReducedStrategy strategy;
  double value = 0.0;
  std::optional<double> restricted_value;  // network only
  std::optional<double> full_value;        // network only
  double regime_gap = 0.0;                 // full − restricted
  std::optional<double> closed_form;       // public Step payoff only
  double tail_error_bound = 0.0;
  bool condition_a1 = true;
  std::vector<std::size_t> a1_offending;
  std::vector<std::string> flags;
  std::vector<Exposure::Cell> cells;
  std::vector<int> empty_action;
  std::size_t evaluations = 0;
};

PayoffReport optimize_network(const ModelParams& params, const LimitStats& limits, const OptimizeOptions& options = {});
PayoffReport optimize_public(const ModelParams& params, const OptimizeOptions& options = {});

/// μ_s1 + μ_s0 μ_l1/μ_l0: public optimum when only unanimous-enough action pays.
double voting_public_value(const ModelParams& params);

struct VotingConditions {
  std::optional<std::size_t> d_vote;
  double margin = 0.0;          // x̄ − γ_h
  double necessary_sum = 0.0;   // Σ_{d ≥ d_vote} γ_l p_d^l
  double sufficient_sum = 0.0;  // Σ_{d > d_vote} γ_l p_d^l (1 − ζ̂(l,d))
  bool necessary = false;
  bool sufficient = false;
};

VotingConditions voting_conditions(const ModelParams& params, const LimitStats& limits);

struct Hypotheses {
  bool baseline = false;        // f_h = f_l and q = 1
  bool homophily_order = false; // believers more connected and q_h ≥ 1 − q_l
  bool convex_payoff = false;
  bool believer_giant = false;  // ĉ > 0
  bool voting = false;          // Step payoff with x̄ > γ_h
};

Hypotheses check_hypotheses(const ModelParams& params, const LimitStats& limits);

struct Comparison {
  PayoffReport network;
  PayoffReport public_;
  double gap = 0.0;  // network − public
  Hypotheses hypotheses;
  std::optional<VotingConditions> voting;
  std::string applicable;  // which result predicts the sign, or "none"
  std::string predicted;   // "public_weakly_better", "network_strictly_better", "none"
  std::optional<bool> holds;
};

inline constexpr double kGapTol = 1e-6;

Comparison compare(const ModelParams& params, const LimitOptions& limit_options = {},
                   const OptimizeOptions& options = {});

}  // namespace pnet
