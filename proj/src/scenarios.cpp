#include "pnet/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "pnet/errors.hpp"

namespace pnet {
namespace {

double max_gap(const ZetaCurve& z, std::size_t d_max) {
  double g = 0.0;
  for (std::size_t d = 0; d <= d_max; ++d) g = std::max(g, std::abs(z.at(Type::H, d) - z.at(Type::L, d)));
  return g;
}

void require(ScenarioResult& r, const std::string& label, bool ok, const std::string& why) {
  r.hypotheses.emplace_back(label, ok);
  if (!ok) throw ValidationError(fmt::format("{}: hypothesis fails: {}", r.name, why));
}

void finish(ScenarioResult& r) {
  r.verdict = std::all_of(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.second; });
  if (r.monte_carlo) r.verdict = r.verdict && r.monte_carlo->within;
}

MonteCarloCheck monte_carlo(const ModelParams& params, const SenderStrategy& strategy, double limit,
                            const ScenarioOptions& options, std::string_view tag) {
  const SimReport sim = simulate_payoff(params, strategy, options.sim, RngSpec{splitmix64(options.seed ^ fnv1a(tag))});
  MonteCarloCheck mc;
  mc.mean = sim.mean;
  mc.std_err = sim.std_err;
  mc.limit = limit;
  mc.n = options.sim.n;
  mc.reps = options.sim.reps;
  mc.within = std::abs(sim.mean - limit) <= 3.0 * sim.std_err;
  return mc;
}

/// The public-versus-network comparison shared by the convex-payoff results.
ScenarioResult convex_comparison(const std::string& name, const ModelParams& params, const ScenarioOptions& options,
                                 bool homophily) {
  ScenarioResult r;
  r.name = name;
  const LimitStats limits = compute_limits(params, options.limits);
  const Hypotheses h = check_hypotheses(params, limits);
  require(r, "convex_payoff", h.convex_payoff, "payoff is not linear or power-convex");
  if (homophily) {
    require(r, "believers_weakly_more_connected_and_qh_ge_1_minus_ql", h.homophily_order,
            fmt::format("verdict {}, q_h={:.6g}, 1-q_l={:.6g}", connectedness_name(limits.connectedness), limits.laws.q[0],
                        1.0 - limits.laws.q[1]));
  } else {
    require(r, "identical_connectedness_and_no_homophily", h.baseline, "f_h differs from f_l or q < 1");
  }

  const PayoffReport pub = optimize_public(params, options.optimize);
  const PayoffReport net = optimize_network(params, limits, options.optimize);
  r.public_value = pub.value;
  r.network_value = net.value;
  r.value("gap", net.value - pub.value);
  r.value("c", limits.c);
  r.value("c_hat", limits.c_hat);
  r.value("regime_gap", net.regime_gap);
  r.check("network_le_public", net.value <= pub.value + kGapTol);
  if (!net.condition_a1) r.notes.push_back("condition A1 violated at some degree");

  if (!homophily) {
    const double gz = max_gap(limits.zeta, limits.d_max);
    const double gzh = max_gap(limits.zeta_hat.curve, limits.d_max);
    r.value("max_zeta_type_gap", gz);
    r.value("max_zeta_hat_type_gap", gzh);
    r.check("zeta_equal_across_types", gz < kBaselineTol);
    r.check("zeta_hat_equal_across_types", gzh < kBaselineTol);
  } else if (params.q < 1.0 && limits.c_hat > 0.0) {
    bool strict = true, weak = true;
    for (std::size_t d = 1; d <= limits.d_max; ++d) {
      const double diff = limits.zeta_hat.curve.at(Type::H, d) - limits.zeta_hat.curve.at(Type::L, d);
      if (d <= 20 && !(diff > 0.0)) strict = false;
      if (diff < 0.0) weak = false;
    }
    r.check("zeta_hat_h_above_l_for_d_1_to_20", strict);
    r.check("zeta_hat_h_ge_l_all_d", weak);
  }
  finish(r);
  return r;
}

double mean_expected_degree(const ModelParams& params, const LimitStats& limits, Type t) {
  const auto& f = params.f(t);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i].prob * limits.laws.expected_degree[index(t)][i];
  return s;
}

}  // namespace

double crra_kappa(const ModelParams& params) {
  const double rh = params.mu_h1 / params.prior0(Type::H);
  const double rl = params.mu_l1 / params.prior0(Type::L);
  return (rh - 1.0) / (rh - rl);
}

ReducedStrategy crra_strategy(const ModelParams& params, double r) {
  const double rh = params.mu_h1 / params.prior0(Type::H);
  const double base = r * (1.0 - crra_kappa(params));
  return {0.0, 0.0, base, rh * base};
}

ReducedStrategy sceptics_strategy(const ModelParams& params) {
  return {1.0, params.mu_l1 / params.prior0(Type::L), 0.0, 0.0};
}

ReducedStrategy voting_strategy(const ModelParams& params) {
  return {0.0, 0.0, params.prior0(Type::H) / params.mu_h1, 1.0};
}

ScenarioResult scenario_baseline(const ModelParams& params, const ScenarioOptions& options) {
  return convex_comparison("baseline", params, options, false);
}

ScenarioResult scenario_homophily(const ModelParams& params, const ScenarioOptions& options) {
  return convex_comparison("homophily", params, options, true);
}

ScenarioResult scenario_sceptics(const ModelParams& params, const ScenarioOptions& options) {
  ScenarioResult r;
  r.name = "sceptics";
  params.validate();
  const LimitStats limits = compute_limits(params, options.limits);
  const double dl = mean_expected_degree(params, limits, Type::L);
  const double dh = mean_expected_degree(params, limits, Type::H);
  r.value("sceptic_expected_degree", dl);
  r.value("believer_expected_degree", dh);
  r.value("degree_bound", options.degree_bound);
  require(r, "sceptic_degree_above_bound", dl >= options.degree_bound,
          fmt::format("sceptic expected degree {:.6g} < bound {:.6g}", dl, options.degree_bound));
  require(r, "believer_degree_below_reciprocal", dh <= 1.0 / options.degree_bound,
          fmt::format("believer expected degree {:.6g} > 1/bound {:.6g}", dh, 1.0 / options.degree_bound));
  const bool min_lambda_positive =
      std::all_of(params.f_l.begin(), params.f_l.end(), [](const Mass& m) { return m.prob == 0.0 || m.lambda > 0.0; });
  require(r, "sceptic_connectedness_bounded_away_from_zero", min_lambda_positive, "some sceptics have lambda = 0");

  const ReducedStrategy s = sceptics_strategy(params);
  const double net = limit_payoff_network(params, limits, s);
  const PayoffReport pub = optimize_public(params, options.optimize);
  r.network_value = net;
  r.public_value = pub.value;
  r.value("margin", net - pub.value);

  // Lower bound from sceptics on L1 plus isolated believers.
  double on_giant = 0.0;
  for (std::size_t i = 0; i < params.f_l.size(); ++i) on_giant += params.f_l[i].prob * limits.rho.at(Type::L, i);
  const double x_hi = params.gamma(Type::L) * on_giant + params.gamma_h * limits.p(Type::H).at(0);
  const double x_lo = params.gamma_h * limits.p(Type::H).at(0);
  const double rl = params.mu_l1 / params.prior0(Type::L);
  const double bound = params.mu_s1 * params.payoff(x_hi) +
                       (1.0 - params.mu_s1) * (rl * params.payoff(x_hi) + (1.0 - rl) * params.payoff(x_lo));
  r.value("proof_lower_bound", bound);
  r.check("network_at_least_lower_bound", net >= bound - 1e-12);
  r.check("network_strictly_above_public", net - pub.value > kGapTol);

  if (options.sim.reps > 0) {
    SenderStrategy st;
    st.signals.push_back({"s", s.pi_s1, s.pi_s0, {SeedKind::OnL1, 1}});
    r.monte_carlo = monte_carlo(params, st, net, options, "sceptics");
  }
  finish(r);
  return r;
}

ScenarioResult scenario_crra(const ModelParams& params, const ScenarioOptions& options) {
  ScenarioResult r;
  r.name = "crra";
  params.validate();
  const LimitStats limits = compute_limits(params, options.limits);
  r.value("c_hat", limits.c_hat);
  require(r, "believer_giant", limits.c_hat > 0.0, "c_hat = 0");
  if (!(options.crra_r > 1.0)) throw ValidationError("crra: r must exceed 1");
  const ReducedStrategy s = crra_strategy(params, options.crra_r);
  require(r, "strategy_feasible", s.pi_sp0 <= 1.0 && s.pi_sp1 <= 1.0,
          fmt::format("pi(s'|0) = {:.6g} exceeds 1 for r = {}", s.pi_sp0, options.crra_r));
  r.value("kappa", crra_kappa(params));
  r.value("r", options.crra_r);
  r.value("pi_sp1", s.pi_sp1);
  r.value("pi_sp0", s.pi_sp0);

  std::optional<double> b_star;
  bool reverses_at_one = true;
  for (double b : options.crra_b) {
    ModelParams p = params;
    p.payoff = PayoffFn::crra(b);
    const double net = evaluate(p, network_exposure(p, limits), s).value;
    const double pub = optimize_public(p, options.optimize).value;
    r.value(fmt::format("network_b_{}", b), net);
    r.value(fmt::format("public_b_{}", b), pub);
    if (net > pub + kGapTol) {
      if (!b_star || b > *b_star) b_star = b;
    }
    if (b == 1.0) {
      reverses_at_one = pub >= net - kGapTol;
      r.network_value = net;
      r.public_value = pub;
    }
  }
  if (b_star) r.value("b_star", *b_star);
  r.check("network_beats_public_for_some_b", b_star.has_value());
  r.check("public_weakly_better_at_b_1", reverses_at_one);
  finish(r);
  return r;
}

ScenarioResult scenario_voting(const ModelParams& params, const ScenarioOptions& options) {
  ScenarioResult r;
  r.name = "voting";
  params.validate();
  if (params.payoff.kind != PayoffFn::Kind::Step) throw ValidationError("voting: payoff must be a step function");
  const double x_bar = params.payoff.param;
  if (!(x_bar > params.gamma_h))
    throw ValidationError(fmt::format("voting: trivial threshold (x_bar {} <= gamma_h {})", x_bar, params.gamma_h));
  r.hypotheses.emplace_back("threshold_above_believer_share", true);

  const LimitStats limits = compute_limits(params, options.limits);
  const VotingConditions vc = voting_conditions(params, limits);
  const double v_pub = voting_public_value(params);
  const PayoffReport pub = optimize_public(params, options.optimize);
  const PayoffReport net = optimize_network(params, limits, options.optimize);
  r.public_value = v_pub;
  r.network_value = net.value;
  r.value("d_vote", vc.d_vote ? static_cast<double>(*vc.d_vote) : std::numeric_limits<double>::infinity());
  r.value("c_hat", limits.c_hat);
  r.value("margin_x_bar_minus_gamma_h", vc.margin);
  r.value("necessary_sum", vc.necessary_sum);
  r.value("sufficient_sum", vc.sufficient_sum);
  r.value("public_numeric", pub.value);
  r.check("public_matches_closed_form", std::abs(pub.value - v_pub) <= 1e-9);

  if (vc.sufficient) {
    const double proof = limit_payoff_network(params, limits, voting_strategy(params));
    r.value("proof_strategy_value", proof);
    r.check("sufficient_strategy_attains_one", proof >= 1.0 - 1e-12);
    r.check("network_beats_public", proof > v_pub);
  }
  if (!vc.necessary) r.check("necessary_fails_public_weakly_better", net.value <= v_pub + kGapTol);
  if (!(limits.c_hat > 0.0)) r.check("no_believer_giant_public_weakly_better", net.value <= v_pub + kGapTol);
  // A network advantage can only appear when the necessary condition holds.
  r.check("necessary_condition_consistent", !(net.value > v_pub + kGapTol) || vc.necessary);
  r.notes.push_back(fmt::format("necessary {}, sufficient {}", vc.necessary, vc.sufficient));
  finish(r);
  return r;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"baseline", "homophily", "sceptics", "crra", "voting"};
  return names;
}

ScenarioResult run_scenario(const std::string& name, const ModelParams& params, const ScenarioOptions& options) {
  if (name == "baseline") return scenario_baseline(params, options);
  if (name == "homophily") return scenario_homophily(params, options);
  if (name == "sceptics") return scenario_sceptics(params, options);
  if (name == "crra") return scenario_crra(params, options);
  if (name == "voting") return scenario_voting(params, options);
  throw ValidationError(fmt::format("unknown scenario '{}'", name));
}

ModelParams scenario_defaults(const std::string& name) {
  ModelParams p;
  p.gamma_h = 0.5;
  p.mu_h1 = 0.6;
  p.mu_l1 = 0.4;
  p.mu_s1 = 0.5;
  if (name == "baseline") {
    p.f_h = p.f_l = {{2.0, 1.0}};
  } else if (name == "homophily") {
    p.f_h = p.f_l = {{2.0, 1.0}};
    p.q = 0.5;
  } else if (name == "sceptics") {
    p.f_h = {{std::sqrt(0.02), 1.0}};
    p.f_l = {{std::sqrt(30.0), 1.0}};
    p.payoff = PayoffFn::capped_linear(0.9);
  } else if (name == "crra") {
    p.f_h = p.f_l = {{std::sqrt(3.0), 1.0}};
    p.payoff = PayoffFn::crra(0.05);
  } else if (name == "voting") {
    p.f_h = p.f_l = {{std::sqrt(3.0), 1.0}};
    p.payoff = PayoffFn::step(0.52);
  } else {
    throw ValidationError(fmt::format("unknown scenario '{}'", name));
  }
  return p;
}

}  // namespace pnet
