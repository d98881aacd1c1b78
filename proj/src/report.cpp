#include "pnet/report.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>

#include "pnet/errors.hpp"

namespace pnet {

using json = nlohmann::json;

namespace {

// JSON has no infinities or NaN; encode them as strings so nothing is lost.
json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json strategy_json(const ReducedStrategy& s) {
  return {{"pi_s1", s.pi_s1}, {"pi_s0", s.pi_s0}, {"pi_sp1", s.pi_sp1}, {"pi_sp0", s.pi_sp0}};
}

json optional_number(const std::optional<double>& x) { return x ? number(*x) : json(nullptr); }

json labelled(const std::vector<std::pair<std::string, bool>>& items) {
  json o = json::object();
  for (const auto& [k, v] : items) o[k] = v;
  return o;
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError(fmt::format("{}: cannot write", path.string()));
  os << text;
  if (!os) throw ValidationError(fmt::format("{}: write failed", path.string()));
}

json limits_json(const LimitStats& limits) {
  json a1 = {{"holds", limits.condition_a1.holds},
             {"offending", limits.condition_a1.offending},
             {"excluded", limits.condition_a1.excluded}};
  return {{"q_h", limits.laws.q[0]},
          {"q_l", limits.laws.q[1]},
          {"c", limits.c},
          {"c_hat", limits.c_hat},
          {"d_vote", limits.d_vote ? json(*limits.d_vote) : json("inf")},
          {"condition_a1", a1},
          {"d_max", limits.d_max},
          {"connectedness", std::string(connectedness_name(limits.connectedness))},
          {"spectral_radius", limits.rho.spectral_radius},
          {"tail_mass", {limits.laws.p[0].tail_mass, limits.laws.p[1].tail_mass}}};
}

void write_limits(const std::filesystem::path& dir, const LimitStats& limits) {
  std::string csv = "type,d,p_d,forward_p_d,zeta,zeta_hat\n";
  for (Type t : kTypes) {
    const auto& fwd = limits.forward[index(t)];
    for (std::size_t d = 0; d <= limits.d_max; ++d) {
      csv += fmt::format("{},{},{},{},{},{}\n", type_char(t), d, format_double(limits.p(t).at(d)),
                         fwd ? format_double(fwd->at(d)) : std::string(), format_double(limits.zeta.at(t, d)),
                         format_double(limits.zeta_hat.curve.at(t, d)));
    }
  }
  write_text(dir / "limits.csv", csv);
  write_json(dir / "limits.json", limits_json(limits));
}

void write_simulation(const std::filesystem::path& dir, const SimReport& report, const SenderStrategy& strategy,
                      const LimitStats& limits) {
  std::string sim = "rep,state,signal,n_observed,fraction_action1,payoff\n";
  for (const auto& row : report.rows) {
    const std::string signal = row.signal < 0 ? "empty" : strategy.signals[static_cast<std::size_t>(row.signal)].label;
    sim += fmt::format("{},{},{},{},{},{}\n", row.rep, row.state, signal, row.n_observed,
                       format_double(row.fraction_action1), format_double(row.payoff));
  }
  write_text(dir / "sim.csv", sim);

  std::string obs = "type,d,signal,empirical_fraction,zeta_prediction\n";
  for (std::size_t s = 0; s < strategy.signals.size() && s < report.pilot.prob.size(); ++s) {
    const Signal& sig = strategy.signals[s];
    for (Type t : kTypes) {
      const auto& probs = report.pilot.prob[s][index(t)];
      for (std::size_t d = 0; d < probs.size(); ++d) {
        if (report.pilot.nodes[index(t)].size() <= d || report.pilot.nodes[index(t)][d] == 0.0) continue;
        std::string pred;
        if (sig.seeding.kind == SeedKind::OnL1) pred = format_double(limits.zeta.at(t, d));
        if (sig.seeding.kind == SeedKind::OnLhat1) pred = format_double(limits.zeta_hat.curve.at(t, d));
        obs += fmt::format("{},{},{},{},{}\n", type_char(t), d, sig.label, format_double(probs[d]), pred);
      }
    }
  }
  write_text(dir / "obsfrac.csv", obs);
}

void write_sample(const std::filesystem::path& dir, const NetworkInstance& net, const LimitStats& limits) {
  std::filesystem::create_directories(dir);
  net.write_edge_list(dir / "edges.txt");
  net.write_node_table(dir / "nodes.txt");
  const auto stats = empirical_stats(net);
  const auto comps = components(net);
  const auto believers = believer_components(net);
  const double n = static_cast<double>(net.size());
  json types = json::object();
  for (Type t : kTypes) {
    const TypeStats& s = stats[index(t)];
    double l1 = 0.0;
    for (std::size_t d = 0; d < std::max(s.degree_hist.size(), limits.d_max + 1); ++d)
      l1 += std::abs((d < s.degree_hist.size() ? s.degree_hist[d] : 0.0) - limits.p(t).at(d));
    types[std::string(1, type_char(t))] = {{"nodes", s.nodes},
                                           {"mean_degree", s.mean_degree},
                                           {"same_type_fraction", s.same_type_fraction},
                                           {"q_limit", limits.laws.q[index(t)]},
                                           {"degree_l1_distance", s.empty ? json(nullptr) : json(l1)},
                                           {"degree_hist", s.degree_hist}};
  }
  write_json(dir / "sample.json",
             {{"n", net.size()},
              {"edges", net.edge_count()},
              {"largest_fraction", static_cast<double>(comps.largest()) / n},
              {"second_fraction", static_cast<double>(comps.second()) / n},
              {"believer_largest_fraction", static_cast<double>(believers.believers.largest()) / n},
              {"c", limits.c},
              {"c_hat", limits.c_hat},
              {"types", types}});
}

json payoff_json(const PayoffReport& r) {
  json cells = json::array();
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const auto& c = r.cells[i];
    cells.push_back({{"type", std::string(1, type_char(c.type))},
                     {"d", c.degree},
                     {"weight", c.weight},
                     {"empty_action", i < r.empty_action.size() ? r.empty_action[i] : -1}});
  }
  return {{"regime", r.regime},
          {"strategy", strategy_json(r.strategy)},
          {"value", number(r.value)},
          {"restricted_value", optional_number(r.restricted_value)},
          {"full_value", optional_number(r.full_value)},
          {"regime_gap", number(r.regime_gap)},
          {"closed_form", optional_number(r.closed_form)},
          {"tail_error_bound", number(r.tail_error_bound)},
          {"condition_a1", r.condition_a1},
          {"a1_offending", r.a1_offending},
          {"flags", r.flags},
          {"evaluations", r.evaluations},
          {"empty_actions", cells}};
}

void write_optimum(const std::filesystem::path& dir, const PayoffReport& report) {
  write_json(dir / "optimum.json", payoff_json(report));
}

json comparison_json(const Comparison& c) {
  const Hypotheses& h = c.hypotheses;
  json j = {{"network_value", number(c.network.value)},
            {"public_value", number(c.public_.value)},
            {"gap", number(c.gap)},
            {"applicable", c.applicable},
            {"predicted", c.predicted},
            {"holds", c.holds ? json(*c.holds) : json(nullptr)},
            {"hypotheses",
             {{"baseline", h.baseline},
              {"homophily_order", h.homophily_order},
              {"convex_payoff", h.convex_payoff},
              {"believer_giant", h.believer_giant},
              {"voting", h.voting}}},
            {"network", payoff_json(c.network)},
            {"public", payoff_json(c.public_)}};
  if (c.voting) {
    const auto& v = *c.voting;
    j["voting"] = {{"d_vote", v.d_vote ? json(*v.d_vote) : json("inf")},
                   {"margin", v.margin},
                   {"necessary_sum", v.necessary_sum},
                   {"sufficient_sum", v.sufficient_sum},
                   {"necessary", v.necessary},
                   {"sufficient", v.sufficient}};
  }
  return j;
}

void write_compare(const std::filesystem::path& dir, const Comparison& c) {
  write_json(dir / "compare.json", comparison_json(c));
}

json scenario_json(const ScenarioResult& r) {
  json values = json::object();
  for (const auto& [k, v] : r.values) values[k] = number(v);
  json j = {{"name", r.name},
            {"verdict", r.verdict ? "pass" : "fail"},
            {"hypotheses", labelled(r.hypotheses)},
            {"checks", labelled(r.checks)},
            {"values", values},
            {"network_value", optional_number(r.network_value)},
            {"public_value", optional_number(r.public_value)},
            {"notes", r.notes}};
  if (r.monte_carlo) {
    const auto& m = *r.monte_carlo;
    j["monte_carlo"] = {{"mean", m.mean},   {"std_err", m.std_err}, {"limit", m.limit},
                        {"n", m.n},         {"reps", m.reps},       {"within_3se", m.within}};
  }
  return j;
}

void write_scenario(const std::filesystem::path& dir, const ScenarioResult& r) {
  write_json(dir / fmt::format("scenario_{}.json", r.name), scenario_json(r));
}

void write_report_csv(const std::filesystem::path& dir, const std::vector<ScenarioResult>& results) {
  auto cell = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  std::string csv = "scenario,verdict,network_value,public_value,gap,mc_mean,mc_std_err\n";
  for (const auto& r : results) {
    std::optional<double> gap;
    if (r.network_value && r.public_value) gap = *r.network_value - *r.public_value;
    std::optional<double> mean, se;
    if (r.monte_carlo) {
      mean = r.monte_carlo->mean;
      se = r.monte_carlo->std_err;
    }
    csv += fmt::format("{},{},{},{},{},{},{}\n", r.name, r.verdict ? "pass" : "fail", cell(r.network_value),
                       cell(r.public_value), cell(gap), cell(mean), cell(se));
  }
  write_text(dir / "report.csv", csv);
}

void write_resolved_config(const std::filesystem::path& dir, const RunConfig& config) {
  write_text(dir / "config.json", dump_config(config));
}

}  // namespace pnet
