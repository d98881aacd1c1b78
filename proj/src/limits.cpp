#include "pnet/limits.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace pnet {
namespace {

constexpr double kOrderTol = 1e-10;
constexpr std::size_t kDVoteSearchCap = 10'000'000;

double poisson_pmf(std::size_t d, double mu) {
  if (mu <= 0.0) return d == 0 ? 1.0 : 0.0;
  const double k = static_cast<double>(d);
  return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
}

double mixture_pmf(const ConnectednessDist& f, const std::vector<double>& intensity, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i].prob * poisson_pmf(d, intensity[i]);
  return s;
}

bool fosd(const DegreeDist& a, const DegreeDist& b) {
  const std::size_t top = std::max(a.d_max(), b.d_max());
  for (std::size_t d = 0; d <= top; ++d) {
    if (a.cdf(d) > b.cdf(d) + kOrderTol) return false;
  }
  return true;
}

bool same_law(const DegreeDist& a, const DegreeDist& b) {
  const std::size_t top = std::max(a.d_max(), b.d_max());
  for (std::size_t d = 0; d <= top; ++d) {
    if (std::abs(a.at(d) - b.at(d)) > kOrderTol) return false;
  }
  return true;
}

}  // namespace

double DegreeDist::mean() const {
  double s = 0.0;
  for (std::size_t d = 0; d < probs.size(); ++d) s += static_cast<double>(d) * probs[d];
  return s;
}

double DegreeDist::cdf(std::size_t d) const {
  double s = 0.0;
  for (std::size_t k = 0; k <= d && k < probs.size(); ++k) s += probs[k];
  return s;
}

double expected_degree(const ModelParams& params, Type t, double lambda) {
  const Type u = other(t);
  return lambda * (params.gamma(t) * mean_lambda(params.f(t)) + params.q * params.gamma(u) * mean_lambda(params.f(u)));
}

DegreeLaws compute_degree_dists(const ModelParams& params, double tail_cutoff, std::size_t d_max_floor) {
  params.validate();
  if (!(tail_cutoff > 0.0 && tail_cutoff <= 1e-3))
    throw ValidationError(fmt::format("tail_cutoff must lie in (0, 1e-3] (got {})", tail_cutoff));

  DegreeLaws laws;
  for (Type t : kTypes) {
    auto& intensity = laws.expected_degree[index(t)];
    for (const auto& m : params.f(t)) intensity.push_back(expected_degree(params, t, m.lambda));
  }
  laws.degenerate = mean_lambda(params.f_h) == 0.0 && mean_lambda(params.f_l) == 0.0;

  // Grow d_max until both tails fall below the cutoff.
  std::array<std::vector<double>, 2> pmf;
  std::array<double, 2> mass{0.0, 0.0};
  std::size_t d = 0;
  for (;; ++d) {
    for (Type t : kTypes) {
      const double p = mixture_pmf(params.f(t), laws.expected_degree[index(t)], d);
      pmf[index(t)].push_back(p);
      mass[index(t)] += p;
    }
    const bool small_tails = 1.0 - mass[0] < tail_cutoff && 1.0 - mass[1] < tail_cutoff;
    if (d + 1 >= d_max_floor && small_tails) break;
  }
  laws.d_max = d;
  for (Type t : kTypes) {
    auto& dist = laws.p[index(t)];
    dist.probs = std::move(pmf[index(t)]);
    dist.tail_mass = std::max(0.0, 1.0 - mass[index(t)]);
  }

  for (Type t : kTypes) {
    const Type u = other(t);
    const double own = mean_lambda(params.f(t)) * params.gamma(t);
    const double cross = mean_lambda(params.f(u)) * params.gamma(u) * params.q;
    laws.q[index(t)] = own + cross > 0.0 ? own / (own + cross) : params.gamma(t);
  }
  return laws;
}

DegreeDist forward_dist(const DegreeDist& p) {
  const double mean = p.mean();
  if (!(mean > 0.0)) throw ValidationError("forward distribution undefined");
  DegreeDist out;
  out.probs.reserve(p.probs.size());
  double total = 0.0;
  for (std::size_t d = 0; d + 1 < p.probs.size(); ++d) {
    const double v = p.probs[d + 1] * static_cast<double>(d + 1) / mean;
    out.probs.push_back(v);
    total += v;
  }
  if (out.probs.empty()) out.probs.push_back(0.0);
  out.tail_mass = std::max(0.0, 1.0 - total);
  return out;
}

double implied_homophily(const ModelParams& params, const DegreeLaws& laws) {
  (void)params;
  const double qh = laws.q[0];
  const double ql = laws.q[1];
  return std::sqrt((1.0 - qh) * (1.0 - ql) / (qh * ql));
}

std::string_view connectedness_name(Connectedness c) {
  switch (c) {
    case Connectedness::HMore: return "h_more";
    case Connectedness::LMore: return "l_more";
    case Connectedness::Equal: return "equal";
    case Connectedness::Incomparable: return "incomparable";
  }
  return "?";
}

Connectedness is_more_connected(const DegreeLaws& laws) {
  const DegreeDist& ph = laws.of(Type::H);
  const DegreeDist& pl = laws.of(Type::L);
  if (same_law(ph, pl)) return Connectedness::Equal;

  const bool needs_forward = std::abs(laws.q[0] - (1.0 - laws.q[1])) > kOrderTol;
  auto dominates = [&](const DegreeDist& a, const DegreeDist& b) {
    if (!fosd(a, b)) return false;
    if (!needs_forward) return true;
    if (!(a.mean() > 0.0) || !(b.mean() > 0.0)) return false;
    return fosd(forward_dist(a), forward_dist(b));
  };
  if (dominates(ph, pl)) return Connectedness::HMore;
  if (dominates(pl, ph)) return Connectedness::LMore;
  return Connectedness::Incomparable;
}

RhoNotConverged::RhoNotConverged(RhoTable last, double residual)
    : SolverError(fmt::format("rho fixed point did not converge (residual {:.3e})", residual)),
      last_(std::move(last)),
      residual_(residual) {}

double kernel_spectral_radius(const ModelParams& params) {
  // The kernel λλ'w(t,t') has rank two after factoring out λ, so its
  // spectrum reduces to K_{tt'} = w(t,t') γ_t' E_t'(λ²).
  const double a = params.gamma(Type::H) * mean_lambda_sq(params.f_h);
  const double b = params.q * params.gamma(Type::L) * mean_lambda_sq(params.f_l);
  const double c = params.q * params.gamma(Type::H) * mean_lambda_sq(params.f_h);
  const double d = params.gamma(Type::L) * mean_lambda_sq(params.f_l);
  const double tr = a + d;
  const double det = a * d - b * c;
  return 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
}

RhoTable solve_rho(const ModelParams& params, double tol, std::size_t max_iter) {
  RhoTable rho;
  for (Type t : kTypes) rho.value[index(t)].assign(params.f(t).size(), 0.0);
  rho.spectral_radius = kernel_spectral_radius(params);
  if (rho.spectral_radius <= 1.0 + 1e-12) {
    rho.subcritical = true;
    return rho;
  }

  for (Type t : kTypes) {
    for (std::size_t i = 0; i < params.f(t).size(); ++i) rho.value[index(t)][i] = params.f(t)[i].lambda > 0.0 ? 1.0 : 0.0;
  }
  auto weighted = [&](Type t) {
    double s = 0.0;
    const auto& f = params.f(t);
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i].prob * f[i].lambda * rho.value[index(t)][i];
    return s;
  };

  for (std::size_t it = 1; it <= max_iter; ++it) {
    const std::array<double, 2> s{weighted(Type::H), weighted(Type::L)};
    double change = 0.0;
    for (Type t : kTypes) {
      const Type u = other(t);
      const double pressure = params.gamma(t) * s[index(t)] + params.q * params.gamma(u) * s[index(u)];
      const auto& f = params.f(t);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double next = -std::expm1(-f[i].lambda * pressure);
        change = std::max(change, std::abs(next - rho.value[index(t)][i]));
        rho.value[index(t)][i] = next;
      }
    }
    rho.iterations = it;
    rho.residual = change;
    if (change < tol) return rho;
  }
  throw RhoNotConverged(rho, rho.residual);
}

double giant_fraction(const ModelParams& params, const RhoTable& rho) {
  double c = 0.0;
  for (Type t : kTypes) {
    const auto& f = params.f(t);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i].prob * rho.at(t, i);
    c += params.gamma(t) * s;
  }
  return std::clamp(c, 0.0, 1.0);
}

double ZetaCurve::at(Type t, std::size_t d) const {
  const auto& tab = table[index(t)];
  if (d < tab.size()) return tab[d];
  return 1.0 - std::pow(base[index(t)], static_cast<double>(d));
}

namespace {

void tabulate(ZetaCurve& curve, std::size_t d_max) {
  for (Type t : kTypes) {
    auto& tab = curve.table[index(t)];
    tab.resize(d_max + 1);
    const double b = curve.base[index(t)];
    double power = 1.0;
    for (std::size_t d = 0; d <= d_max; ++d) {
      tab[d] = 1.0 - power;
      power *= b;
    }
  }
}

}  // namespace

ZetaCurve compute_zeta(const ModelParams& params, const RhoTable& rho, std::size_t d_max) {
  ZetaCurve curve;
  for (Type t : kTypes) {
    const Type u = other(t);
    const double denom = params.gamma(t) * mean_lambda(params.f(t)) + params.q * params.gamma(u) * mean_lambda(params.f(u));
    if (!(denom > 0.0)) {
      curve.base[index(t)] = 1.0;
      continue;
    }
    double num = 0.0;
    const auto& ft = params.f(t);
    for (std::size_t i = 0; i < ft.size(); ++i) num += (1.0 - rho.at(t, i)) * params.gamma(t) * ft[i].prob * ft[i].lambda;
    const auto& fu = params.f(u);
    for (std::size_t i = 0; i < fu.size(); ++i)
      num += (1.0 - rho.at(u, i)) * params.q * params.gamma(u) * fu[i].prob * fu[i].lambda;
    curve.base[index(t)] = std::clamp(num / denom, 0.0, 1.0);
  }
  tabulate(curve, d_max);
  return curve;
}

ZetaHat solve_zeta_hat(const ModelParams& params, const DegreeLaws& laws, std::size_t d_max, double tol,
                       std::size_t max_iter) {
  // Deleting sceptics leaves the same law on believer links as zeroing their λ.
  ModelParams believers = params;
  believers.f_l = {{0.0, 1.0}};
  const RhoTable rho_hat = solve_rho(believers, tol, max_iter);

  ZetaHat out;
  out.rho_hat_h = rho_hat.value[index(Type::H)];
  const double e_h = mean_lambda(params.f_h);
  double survive = 0.0;
  for (std::size_t i = 0; i < params.f_h.size(); ++i) survive += params.f_h[i].lambda * params.f_h[i].prob * out.rho_hat_h[i];
  out.extinction_via_neighbour = e_h > 0.0 ? std::clamp(1.0 - survive / e_h, 0.0, 1.0) : 1.0;

  // Σ_k Binom(k; d, p) (1 − X̂^k) = 1 − (1 − p(1 − X̂))^d with p the chance a
  // neighbour is a believer.
  const double hit = 1.0 - out.extinction_via_neighbour;
  out.curve.base[index(Type::H)] = 1.0 - laws.q_of(Type::H) * hit;
  out.curve.base[index(Type::L)] = 1.0 - (1.0 - laws.q_of(Type::L)) * hit;
  tabulate(out.curve, d_max);

  double c_hat = 0.0;
  for (std::size_t i = 0; i < params.f_h.size(); ++i) c_hat += params.f_h[i].prob * out.rho_hat_h[i];
  out.c_hat = params.gamma_h * c_hat;
  return out;
}

double sceptic_empty_ratio(const ModelParams& params, double zeta_hat_l) {
  const double odds_l = params.mu_l1 / (1.0 - params.mu_l1);
  const double inv_odds_h = (1.0 - params.mu_h1) / params.mu_h1;
  return odds_l * (1.0 - zeta_hat_l * inv_odds_h) / (1.0 - zeta_hat_l);
}

ConditionA1 check_condition_a1(const ModelParams& params, const ZetaCurve& zeta_hat, std::size_t d_max) {
  ConditionA1 out;
  out.ratio.resize(d_max + 1, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t d = 0; d <= d_max; ++d) {
    const double z = zeta_hat.at(Type::L, d);
    if (z == 1.0) {
      out.excluded.push_back(d);
      continue;
    }
    out.ratio[d] = sceptic_empty_ratio(params, z);
    if (std::abs(out.ratio[d] - 1.0) <= kA1Tol) out.offending.push_back(d);
  }
  out.holds = out.offending.empty();
  return out;
}

std::optional<std::size_t> compute_d_vote(const ModelParams& params, const ZetaHat& zeta_hat) {
  if (!(zeta_hat.c_hat > 0.0) || zeta_hat.curve.base[index(Type::L)] >= 1.0) return std::nullopt;
  const double inv_odds_h = (1.0 - params.mu_h1) / params.mu_h1;
  for (std::size_t d = 0; d < kDVoteSearchCap; ++d) {
    const double z = zeta_hat.curve.at(Type::L, d);
    // ratio ≥ 1 written without the division so ζ̂ = 1 needs no special case.
    const double num = params.mu_l1 * (1.0 - inv_odds_h * z);
    const double den = (1.0 - params.mu_l1) * (1.0 - z);
    if (num >= den - kTieEps) return d;
  }
  throw SolverError("d_vote search exceeded its cap");
}

LimitStats compute_limits(const ModelParams& params, const LimitOptions& options) {
  LimitStats out;
  out.laws = compute_degree_dists(params, options.tail_cutoff, options.d_max_floor);
  out.d_max = out.laws.d_max;
  for (Type t : kTypes) {
    if (out.laws.of(t).mean() > 0.0) out.forward[index(t)] = forward_dist(out.laws.of(t));
  }
  out.connectedness = is_more_connected(out.laws);
  out.rho = solve_rho(params, options.tol, options.max_iter);
  out.c = giant_fraction(params, out.rho);
  out.zeta = compute_zeta(params, out.rho, out.d_max);
  out.zeta_hat = solve_zeta_hat(params, out.laws, out.d_max, options.tol, options.max_iter);
  out.c_hat = out.zeta_hat.c_hat;
  out.condition_a1 = check_condition_a1(params, out.zeta_hat.curve, out.d_max);
  out.d_vote = compute_d_vote(params, out.zeta_hat);
  return out;
}

}  // namespace pnet
