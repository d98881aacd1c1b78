#include "pnet/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fmt/format.h>

#include "pnet/errors.hpp"
#include "pnet/parallel.hpp"

namespace pnet {
namespace {

constexpr double kProbSlack = 1e-12;

struct Counts {
  std::vector<std::array<std::vector<double>, 2>> observed;
  std::array<std::vector<double>, 2> nodes;
  std::size_t fallbacks = 0;
};

void bump(std::vector<double>& v, std::size_t d, double by = 1.0) {
  if (v.size() <= d) v.resize(d + 1, 0.0);
  v[d] += by;
}

bool needs_believers(const SenderStrategy& strategy) {
  return std::any_of(strategy.signals.begin(), strategy.signals.end(),
                     [](const Signal& s) { return s.seeding.kind == SeedKind::OnLhat1; });
}

std::vector<std::array<bool, 2>> sharer_table(const SenderStrategy& strategy, const std::vector<SignalActions>& acts,
                                              SharingRule rule) {
  std::vector<std::array<bool, 2>> out;
  for (std::size_t s = 0; s < strategy.signals.size(); ++s) out.push_back(sharers_for(strategy.signals[s], acts[s], rule));
  return out;
}

}  // namespace

std::string_view seed_kind_name(SeedKind k) {
  switch (k) {
    case SeedKind::OnL1: return "on_l1";
    case SeedKind::OnLhat1: return "on_lhat1";
    case SeedKind::UniformRandom: return "uniform";
    case SeedKind::None: return "none";
  }
  return "?";
}

SeedKind seed_kind_from_name(std::string_view name) {
  for (SeedKind k : {SeedKind::OnL1, SeedKind::OnLhat1, SeedKind::UniformRandom, SeedKind::None})
    if (seed_kind_name(k) == name) return k;
  throw ValidationError(fmt::format("unknown seeding policy '{}'", name));
}

std::string_view sharing_rule_name(SharingRule r) {
  switch (r) {
    case SharingRule::Persuaded: return "persuaded";
    case SharingRule::AgreeWithContent: return "agree_with_content";
    case SharingRule::ScepticsRelayInt: return "sceptics_relay_int";
  }
  return "?";
}

SharingRule sharing_rule_from_name(std::string_view name) {
  for (SharingRule r : {SharingRule::Persuaded, SharingRule::AgreeWithContent, SharingRule::ScepticsRelayInt})
    if (sharing_rule_name(r) == name) return r;
  throw ValidationError(fmt::format("unknown sharing rule '{}'", name));
}

double SenderStrategy::empty_prob(int state) const {
  double s = 0.0;
  for (std::size_t i = 0; i < signals.size(); ++i) s += sent(state, i);
  return std::max(0.0, 1.0 - s);
}

void SenderStrategy::validate() const {
  if (!(seed_exponent > 0.0 && seed_exponent < 1.0))
    throw ValidationError(fmt::format("seed_exponent must lie in (0,1) (got {})", seed_exponent));
  double s1 = 0.0, s0 = 0.0;
  for (const auto& s : signals) {
    if (!(s.pi1 >= 0.0 && s.pi1 <= 1.0 && s.pi0 >= 0.0 && s.pi0 <= 1.0))
      throw ValidationError(fmt::format("signal '{}': probabilities must lie in [0,1]", s.label));
    if (s.pi1 == 0.0 && s.pi0 == 0.0) throw ValidationError(fmt::format("signal '{}' is never sent", s.label));
    if (s.seeding.kind == SeedKind::UniformRandom && s.seeding.count == 0)
      throw ValidationError(fmt::format("signal '{}': uniform seeding needs count >= 1", s.label));
    s1 += s.pi1;
    s0 += s.pi0;
  }
  if (s1 > 1.0 + kProbSlack || s0 > 1.0 + kProbSlack)
    throw ValidationError(fmt::format("signal probabilities sum above 1 (state 1: {}, state 0: {})", s1, s0));
}

std::vector<SignalActions> actions_on_signals(const SenderStrategy& strategy, const ModelParams& params) {
  std::vector<SignalActions> out;
  for (const auto& s : strategy.signals) {
    switch (classify_signal(params, s.pi1, s.pi0)) {
      case SignalClass::Good: out.push_back({1, 1}); break;
      case SignalClass::Int: out.push_back({1, 0}); break;
      default: out.push_back({0, 0}); break;
    }
  }
  return out;
}

std::array<bool, 2> sharers_for(const Signal& signal, const SignalActions& actions, SharingRule rule) {
  switch (rule) {
    case SharingRule::Persuaded: return {actions[0] == 1, actions[1] == 1};
    case SharingRule::AgreeWithContent: {
      if (signal.pi1 == signal.pi0) return {false, false};
      const int favoured = signal.pi1 > signal.pi0 ? 1 : 0;
      return {actions[0] == favoured, actions[1] == favoured};
    }
    case SharingRule::ScepticsRelayInt:
      if (actions[0] == 1 && actions[1] == 0) return {false, true};
      return {actions[0] == 1, actions[1] == 1};
  }
  return {false, false};
}

int empty_action(double prior1, double empty1, double empty0) {
  return prior1 * empty1 >= (1.0 - prior1) * empty0 - kTieEps ? 1 : 0;
}

std::size_t seed_budget(std::size_t n, double alpha) {
  return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), alpha) + 1e-9));
}

SeedSelection select_seeds(const NetworkInstance& net, const ComponentDecomposition& full,
                           const BelieverDecomposition& believers, const SeedPolicy& policy, std::size_t budget,
                           Philox& g) {
  SeedSelection out;
  if (net.size() == 0 || budget == 0) return out;
  auto pick_in = [&](const std::vector<std::uint32_t>& label, std::size_t size) {
    // The k-th member of component 0 in id order.
    std::size_t k = uniform_index(g, size);
    for (NodeId i = 0; i < net.size(); ++i) {
      if (label[i] == 0 && k-- == 0) return i;
    }
    return NodeId{0};
  };
  switch (policy.kind) {
    case SeedKind::None: break;
    case SeedKind::OnL1:
      if (full.largest() < 2) out.fallback = true;
      out.nodes.push_back(pick_in(full.component, full.largest()));
      break;
    case SeedKind::OnLhat1:
      if (believers.believers.empty()) {
        out.fallback = true;
        break;
      }
      if (believers.believers.largest() < 2) out.fallback = true;
      out.nodes.push_back(pick_in(believers.believers.component, believers.believers.largest()));
      break;
    case SeedKind::UniformRandom: {
      const std::size_t k = std::min({policy.count, budget, net.size()});
      std::vector<char> taken(net.size(), 0);
      while (out.nodes.size() < k) {
        const auto i = static_cast<NodeId>(uniform_index(g, net.size()));
        if (!taken[i]) {
          taken[i] = 1;
          out.nodes.push_back(i);
        }
      }
      break;
    }
  }
  return out;
}

std::vector<char> spread(const NetworkInstance& net, const std::vector<NodeId>& seeds,
                         const std::function<bool(NodeId)>& sharer) {
  std::vector<char> seen(net.size(), 0);
  std::deque<NodeId> frontier;
  for (NodeId s : seeds) {
    if (!seen[s]) {
      seen[s] = 1;
      frontier.push_back(s);
    }
  }
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    if (!sharer(u)) continue;
    for (NodeId v : net.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        frontier.push_back(v);
      }
    }
  }
  return seen;
}

double ObservationTable::at(std::size_t s, Type t, std::size_t d) const {
  const auto& row = prob[s][index(t)];
  if (row.empty()) return 0.0;
  return row[std::min(d, row.size() - 1)];
}

int EquilibriumActions::empty_at(Type t, std::size_t d) const {
  const auto& row = on_empty[index(t)];
  return row[std::min(d, row.size() - 1)];
}

EquilibriumActions equilibrium(const SenderStrategy& strategy, const ModelParams& params, const ObservationTable& obs) {
  EquilibriumActions out;
  out.on_signal = actions_on_signals(strategy, params);
  for (Type t : kTypes) {
    std::size_t top = 0;
    for (std::size_t s = 0; s < strategy.signals.size(); ++s)
      top = std::max(top, obs.prob[s][index(t)].size());
    top = std::max<std::size_t>(top, 1);
    auto& row = out.on_empty[index(t)];
    row.resize(top);
    for (std::size_t d = 0; d < top; ++d) {
      double empty1 = 1.0, empty0 = 1.0;
      for (std::size_t s = 0; s < strategy.signals.size(); ++s) {
        const double p = obs.at(s, t, d);
        empty1 -= strategy.signals[s].pi1 * p;
        empty0 -= strategy.signals[s].pi0 * p;
      }
      empty1 = std::max(0.0, empty1);
      empty0 = std::max(0.0, empty0);
      if (empty0 <= 0.0)
        out.log.push_back(fmt::format("empty signal unseen in state 0 for ({}, d={}); action 1", type_char(t), d));
      row[d] = empty_action(params.prior1(t), empty1, empty0);
    }
  }
  return out;
}

ObservationTable estimate_observation(const ModelParams& params, const SenderStrategy& strategy,
                                      const SimOptions& options, std::size_t reps, const RngSpec& rng,
                                      std::string_view purpose, std::size_t* fallbacks) {
  strategy.validate();
  if (reps == 0) throw ValidationError("observation ensemble needs at least one network");
  const auto acts = actions_on_signals(strategy, params);
  const auto share = sharer_table(strategy, acts, options.sharing);
  const bool with_believers = needs_believers(strategy);
  const std::string net_tag = fmt::format("{}-net", purpose);
  const std::string seed_tag = fmt::format("{}-seed", purpose);
  const std::size_t budget = seed_budget(options.n, strategy.seed_exponent);
  const std::size_t k = strategy.signals.size();

  std::vector<Counts> parts(reps);
  parallel_for(reps, options.threads, [&](std::size_t r) {
    const NetworkInstance net = sample_network(params, options.n, RngSpec{rng.stream(net_tag, r)()}, {options.edge_budget, 1});
    const ComponentDecomposition full = components(net);
    const BelieverDecomposition bel = with_believers ? believer_components(net) : BelieverDecomposition{};
    Counts& c = parts[r];
    c.observed.resize(k);
    for (NodeId i = 0; i < net.size(); ++i) bump(c.nodes[index(net.type(i))], net.degree(i));
    for (std::size_t s = 0; s < k; ++s) {
      Philox g = rng.stream(seed_tag, r, s);
      const SeedSelection seeds = select_seeds(net, full, bel, strategy.signals[s].seeding, budget, g);
      c.fallbacks += seeds.fallback ? 1 : 0;
      const auto& sh = share[s];
      const auto seen = spread(net, seeds.nodes, [&](NodeId i) { return sh[index(net.type(i))]; });
      for (NodeId i = 0; i < net.size(); ++i)
        if (seen[i]) bump(c.observed[s][index(net.type(i))], net.degree(i));
    }
  });

  ObservationTable out;
  out.prob.resize(k);
  out.observed.resize(k);
  std::size_t total_fallbacks = 0;
  for (const Counts& c : parts) {
    total_fallbacks += c.fallbacks;
    for (Type t : kTypes) {
      const auto& nd = c.nodes[index(t)];
      for (std::size_t d = 0; d < nd.size(); ++d) bump(out.nodes[index(t)], d, nd[d]);
      for (std::size_t s = 0; s < k; ++s) {
        const auto& od = c.observed[s][index(t)];
        for (std::size_t d = 0; d < od.size(); ++d) bump(out.observed[s][index(t)], d, od[d]);
      }
    }
  }
  for (std::size_t s = 0; s < k; ++s) {
    for (Type t : kTypes) {
      const auto& nd = out.nodes[index(t)];
      auto& obs = out.observed[s][index(t)];
      obs.resize(nd.size(), 0.0);
      auto& prob = out.prob[s][index(t)];
      prob.assign(nd.size(), 0.0);
      // Unseen degrees inherit the nearest lower degree's estimate.
      double carry = 0.0;
      for (std::size_t d = 0; d < nd.size(); ++d) {
        if (nd[d] > 0.0) carry = obs[d] / nd[d];
        prob[d] = carry;
      }
    }
  }
  if (fallbacks) *fallbacks = total_fallbacks;
  return out;
}

SimReport simulate_payoff(const ModelParams& params, const SenderStrategy& strategy, const SimOptions& options,
                          const RngSpec& rng) {
  params.validate();
  strategy.validate();
  if (options.n < 2) throw ValidationError("n must be >= 2");
  if (options.reps == 0) throw ValidationError("reps must be >= 1");

  SimReport report;
  report.pilot = estimate_observation(params, strategy, options, options.pilot_reps, rng, "pilot", &report.seed_fallbacks);
  report.actions = equilibrium(strategy, params, report.pilot);
  const auto share = sharer_table(strategy, report.actions.on_signal, options.sharing);
  const bool with_believers = needs_believers(strategy);
  const std::size_t budget = seed_budget(options.n, strategy.seed_exponent);

  report.rows.resize(options.reps);
  std::vector<std::size_t> fallback(options.reps, 0);
  parallel_for(options.reps, options.threads, [&](std::size_t r) {
    const NetworkInstance net =
        sample_network(params, options.n, RngSpec{rng.stream("sim-net", r)()}, {options.edge_budget, 1});
    Philox g = rng.stream("sim-draw", r);
    ReplicateRow& row = report.rows[r];
    row.rep = r;
    row.state = uniform01(g) < params.mu_s1 ? 1 : 0;
    const double u = uniform01(g);
    double acc = 0.0;
    for (std::size_t s = 0; s < strategy.signals.size(); ++s) {
      acc += strategy.sent(row.state, s);
      if (u < acc) {
        row.signal = static_cast<int>(s);
        break;
      }
    }

    std::vector<char> seen(net.size(), 0);
    if (row.signal >= 0) {
      const auto s = static_cast<std::size_t>(row.signal);
      const ComponentDecomposition full = components(net);
      const BelieverDecomposition bel = with_believers ? believer_components(net) : BelieverDecomposition{};
      const SeedSelection seeds = select_seeds(net, full, bel, strategy.signals[s].seeding, budget, g);
      fallback[r] = seeds.fallback ? 1 : 0;
      const auto& sh = share[s];
      seen = spread(net, seeds.nodes, [&](NodeId i) { return sh[index(net.type(i))]; });
    }

    std::size_t acting = 0;
    for (NodeId i = 0; i < net.size(); ++i) {
      const Type t = net.type(i);
      int a;
      if (seen[i]) {
        ++row.n_observed;
        a = report.actions.on_signal[static_cast<std::size_t>(row.signal)][index(t)];
      } else {
        a = report.actions.empty_at(t, net.degree(i));
      }
      acting += static_cast<std::size_t>(a);
    }
    row.fraction_action1 = static_cast<double>(acting) / static_cast<double>(net.size());
    row.payoff = payoff_eval(params.payoff, row.fraction_action1);
  });

  // Kahan-summed moments in replicate order.
  double sum = 0.0, comp = 0.0;
  for (const auto& row : report.rows) {
    const double y = row.payoff - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double n = static_cast<double>(options.reps);
  report.mean = sum / n;
  double ss = 0.0;
  for (const auto& row : report.rows) ss += (row.payoff - report.mean) * (row.payoff - report.mean);
  report.std_err = options.reps > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  for (std::size_t f : fallback) report.seed_fallbacks += f;
  return report;
}

}  // namespace pnet
