#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pnet/errors.hpp"
#include "pnet/model.hpp"
#include "pnet/rng.hpp"

namespace pnet {

struct LimitOptions {
  double tail_cutoff = 1e-9;
  std::size_t d_max_floor = 64;
  double tol = 1e-12;
  std::size_t max_iter = 200000;
};

/// Degree law truncated at d_max; tail_mass holds the probability beyond it.
struct DegreeDist {
  std::vector<double> probs;
  double tail_mass = 0.0;

  std::size_t d_max() const { return probs.empty() ? 0 : probs.size() - 1; }
  double at(std::size_t d) const { return d < probs.size() ? probs[d] : 0.0; }
  double mean() const;
  double cdf(std::size_t d) const;
};

struct DegreeLaws {
  std::array<DegreeDist, 2> p;
  std::array<double, 2> q{};  // same-type neighbour probability per type
  /// D(t, λ): expected degree per atom of f_t, same order as the atoms.
  std::array<std::vector<double>, 2> expected_degree;
  std::size_t d_max = 0;
  bool degenerate = false;  // no type has positive connectedness

  const DegreeDist& of(Type t) const { return p[index(t)]; }
  double q_of(Type t) const { return q[index(t)]; }
};

/// Edge intensity D(t, λ) = λ (γ_t E_t(λ) + q γ_t' E_t'(λ)).
double expected_degree(const ModelParams& params, Type t, double lambda);

DegreeLaws compute_degree_dists(const ModelParams& params, double tail_cutoff = 1e-9, std::size_t d_max_floor = 64);

/// Degree law of a uniformly chosen neighbour, minus the edge used to reach it.
DegreeDist forward_dist(const DegreeDist& p);

/// Recovers the homophily factor from the pair (q_h, q_l).
double implied_homophily(const ModelParams& params, const DegreeLaws& laws);

enum class Connectedness { HMore, LMore, Equal, Incomparable };
std::string_view connectedness_name(Connectedness c);

Connectedness is_more_connected(const DegreeLaws& laws);

/// Survival probabilities ρ(∞|t,λ) of the multi-type branching process.
struct RhoTable {
  std::array<std::vector<double>, 2> value;  // indexed like f_t
  double spectral_radius = 0.0;
  bool subcritical = false;
  std::size_t iterations = 0;
  double residual = 0.0;

  double at(Type t, std::size_t atom) const { return value[index(t)][atom]; }
};

class RhoNotConverged : public SolverError {
 public:
  RhoNotConverged(RhoTable last, double residual);
  const RhoTable& last_iterate() const { return last_; }
  double residual() const { return residual_; }

 private:
  RhoTable last_;
  double residual_;
};

/// Spectral radius of the mean-offspring operator; survival is possible iff > 1.
double kernel_spectral_radius(const ModelParams& params);

RhoTable solve_rho(const ModelParams& params, double tol = 1e-12, std::size_t max_iter = 200000);

double giant_fraction(const ModelParams& params, const RhoTable& rho);

/// A curve 1 - base_t^d per type, tabulated on 0..d_max.
struct ZetaCurve {
  std::array<double, 2> base{1.0, 1.0};
  std::array<std::vector<double>, 2> table;

  double at(Type t, std::size_t d) const;
  /// lim_{d→∞}: 1 when base < 1, otherwise 0.
  double limit(Type t) const { return base[index(t)] < 1.0 ? 1.0 : 0.0; }
};

ZetaCurve compute_zeta(const ModelParams& params, const RhoTable& rho, std::size_t d_max);

struct ZetaHat {
  std::vector<double> rho_hat_h;  // believer-subnetwork survival per atom of f_h
  double extinction_via_neighbour = 1.0;  // X̂: chance a believer neighbour is off L̂1
  ZetaCurve curve;
  double c_hat = 0.0;
};

ZetaHat solve_zeta_hat(const ModelParams& params, const DegreeLaws& laws, std::size_t d_max, double tol = 1e-12,
                       std::size_t max_iter = 200000);

/// Likelihood ratio of ∅ for a sceptic who would see the believer-only signal
/// at believer indifference: (μ_l1/μ_l0)(1 − ζ̂ μ_h0/μ_h1)/(1 − ζ̂).
double sceptic_empty_ratio(const ModelParams& params, double zeta_hat_l);

struct ConditionA1 {
  bool holds = true;
  std::vector<std::size_t> offending;
  std::vector<std::size_t> excluded;  // ζ̂(l,d) = 1, ratio undefined
  std::vector<double> ratio;          // NaN where excluded
};

inline constexpr double kA1Tol = 1e-9;

ConditionA1 check_condition_a1(const ModelParams& params, const ZetaCurve& zeta_hat, std::size_t d_max);

/// Smallest sceptic degree whose ∅-ratio reaches 1; nullopt encodes ∞.
std::optional<std::size_t> compute_d_vote(const ModelParams& params, const ZetaHat& zeta_hat);

struct LimitStats {
  DegreeLaws laws;
  std::array<std::optional<DegreeDist>, 2> forward;
  RhoTable rho;
  ZetaCurve zeta;
  ZetaHat zeta_hat;
  double c = 0.0;
  double c_hat = 0.0;
  std::size_t d_max = 0;
  Connectedness connectedness = Connectedness::Equal;
  ConditionA1 condition_a1;
  std::optional<std::size_t> d_vote;

  const DegreeDist& p(Type t) const { return laws.of(t); }
};

LimitStats compute_limits(const ModelParams& params, const LimitOptions& options = {});

/// Monte Carlo component-size law of the branching process rooted at (t, λ)
/// with exactly d children.
struct SizeDistribution {
  std::vector<double> prob;     // prob[m] = P(size = m), m = 0..m_max (prob[0] unused)
  std::vector<double> std_err;  // binomial standard errors
  double beyond = 0.0;          // P(size > m_max), includes survival
  std::size_t samples = 0;
};

SizeDistribution branching_size_dist(const ModelParams& params, Type t, std::size_t d, double lambda,
                                     std::size_t m_max, std::size_t samples, const RngSpec& rng,
                                     std::size_t threads = 1);

}  // namespace pnet
