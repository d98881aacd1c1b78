#include "pnet/selftest.hpp"

#include <cmath>
#include <fmt/format.h>

#include "pnet/config.hpp"
#include "pnet/diffusion.hpp"
#include "pnet/limits.hpp"
#include "pnet/optimizer.hpp"

namespace pnet {
namespace {

ModelParams island(double lambda, double q = 1.0) {
  ModelParams p;
  p.f_h = p.f_l = {{lambda, 1.0}};
  p.q = q;
  return p;
}

std::vector<char> path_spread(std::vector<Type> types, bool h_shares, bool l_shares) {
  const auto net = NetworkInstance::from_edges(types, std::vector<double>(3, 1.0), {{0, 1}, {1, 2}});
  return spread(net, {0}, [&](NodeId i) { return net.type(i) == Type::H ? h_shares : l_shares; });
}

}  // namespace

std::vector<SelftestItem> run_selftest() {
  std::vector<SelftestItem> out;
  auto add = [&](std::string name, bool ok, std::string detail = {}) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  {
    const LimitStats l = compute_limits(island(std::sqrt(2.0)));
    double lo = 0.5, hi = 1.0;  // ρ = 1 − e^{−2ρ} on its positive root
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mid - (1.0 - std::exp(-2.0 * mid)) < 0.0 ? lo : hi) = mid;
    }
    add("giant_fraction_matches_bisection", std::abs(l.c - lo) < 1e-10, fmt::format("c={:.12f} oracle={:.12f}", l.c, lo));
    bool zero = true, mono = true, below = true;
    for (Type t : kTypes) {
      zero = zero && l.zeta.at(t, 0) == 0.0 && l.zeta_hat.curve.at(t, 0) == 0.0;
      for (std::size_t d = 1; d <= l.d_max; ++d) {
        mono = mono && l.zeta.at(t, d) >= l.zeta.at(t, d - 1) && l.zeta_hat.curve.at(t, d) >= l.zeta_hat.curve.at(t, d - 1);
        below = below && l.zeta_hat.curve.at(t, d) <= l.zeta.at(t, d) + 1e-15;
      }
    }
    add("zeta_zero_at_degree_zero", zero);
    add("zeta_monotone_in_degree", mono);
    add("zeta_hat_below_zeta", below);
    double gap = 0.0;
    for (std::size_t d = 0; d <= 30; ++d) gap = std::max(gap, std::abs(l.zeta.at(Type::H, d) - l.zeta.at(Type::L, d)));
    add("baseline_types_observe_alike", gap < 1e-10, fmt::format("max gap {:.3g}", gap));
  }
  {
    ModelParams p = island(std::sqrt(3.0));
    p.payoff = PayoffFn::step(0.52);
    const double v = optimize_public(p).value;
    add("public_step_matches_closed_form", std::abs(v - 5.0 / 6.0) < 1e-9, fmt::format("{:.12f}", v));
    const ReducedStrategy s{0.3, 0.2, 0.4, 0.5};
    const Exposure pub = public_exposure(p);
    Exposure ones = network_exposure(p, compute_limits(p));
    for (auto& c : ones.cells) c.good = c.mid = 1.0;
    ModelParams lin = p;
    lin.payoff = PayoffFn::linear();
    add("public_equals_network_with_full_exposure",
        std::abs(evaluate(lin, pub, s).value - evaluate(lin, ones, s).value) < 1e-12);
  }
  {
    const auto a = path_spread({Type::H, Type::H, Type::L}, true, false);
    add("spread_hhl_all_observe", a == std::vector<char>{1, 1, 1});
    const auto b = path_spread({Type::H, Type::L, Type::H}, true, false);
    add("spread_hlh_stops_at_sceptic", b == std::vector<char>{1, 1, 0});
  }
  {
    RunConfig c;
    c.model = island(1.5, 0.7);
    c.strategy.signals.push_back({"s", 0.5, 0.25, {SeedKind::OnLhat1, 1}});
    add("config_round_trip", parse_config(dump_config(c)) == c);
  }
  {
    SenderStrategy none;
    ObservationTable obs;
    const ModelParams p = island(1.0);
    const EquilibriumActions eq = equilibrium(none, p, obs);
    add("no_signal_priors_decide", eq.empty_at(Type::H, 3) == 1 && eq.empty_at(Type::L, 3) == 0);
  }
  return out;
}

}  // namespace pnet
