#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "pnet/limits.hpp"

using namespace pnet;

namespace {

ModelParams island(double lambda, double gamma_h = 0.5, double q = 1.0) {
  ModelParams p;
  p.gamma_h = gamma_h;
  p.q = q;
  p.f_h = p.f_l = {{lambda, 1.0}};
  return p;
}

// Survival of a uniformly chosen child of a type-t parent, built from a rho table
// by weighting each (type, atom) by affinity·γ·f·λ.
double child_survival(const ModelParams& p, Type t, const std::array<std::vector<double>, 2>& rho) {
  double num = 0.0, den = 0.0;
  for (Type u : kTypes) {
    const auto& f = p.f(u);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double w = p.affinity(t, u) * p.gamma(u) * f[i].prob * f[i].lambda;
      num += w * rho[index(u)][i];
      den += w;
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

// The d-indexed survival equation summed term by term over Poisson offspring counts.
std::array<std::vector<double>, 2> rho_by_poisson_summation(const ModelParams& p) {
  std::array<std::vector<double>, 2> rho;
  for (Type t : kTypes) rho[index(t)].assign(p.f(t).size(), 1.0);
  for (int it = 0; it < 20000; ++it) {
    std::array<std::vector<double>, 2> next = rho;
    double change = 0.0;
    for (Type t : kTypes) {
      const double child = child_survival(p, t, rho);
      for (std::size_t i = 0; i < p.f(t).size(); ++i) {
        const double mean = expected_degree(p, t, p.f(t)[i].lambda);
        double ext = 0.0;
        for (std::size_t d = 0; d < 400; ++d) ext += (mean > 0 ? oracle::poisson_pmf(d, mean) : d == 0) * std::pow(1.0 - child, double(d));
        next[index(t)][i] = 1.0 - ext;
        change = std::max(change, std::abs(next[index(t)][i] - rho[index(t)][i]));
      }
    }
    rho = next;
    if (change < 1e-14) break;
  }
  return rho;
}

}  // namespace

TEST_SUITE("limits") {
  TEST_CASE("degree law of the island model is Poisson") {
    const DegreeLaws laws = compute_degree_dists(island(1.0));
    CHECK(laws.of(Type::H).at(0) == doctest::Approx(0.367879).epsilon(1e-6));
    for (std::size_t d = 0; d < 15; ++d) CHECK(laws.of(Type::L).at(d) == doctest::Approx(oracle::poisson_pmf(d, 1.0)));
    CHECK(laws.q_of(Type::H) == doctest::Approx(0.5));
    CHECK(laws.q_of(Type::L) == doctest::Approx(0.5));
  }

  TEST_CASE("same-type neighbour probability under homophily") {
    ModelParams p = island(std::sqrt(2.0), 0.3, 0.5);
    const DegreeLaws laws = compute_degree_dists(p);
    CHECK(laws.q_of(Type::H) == doctest::Approx(0.6 / 1.3));
    CHECK(implied_homophily(p, laws) == doctest::Approx(0.5));
  }

  TEST_CASE("forward distribution") {
    DegreeDist a{{0.0, 1.0}, 0.0};
    CHECK(forward_dist(a).at(0) == doctest::Approx(1.0));
    DegreeDist b{{0.0, 0.5, 0.5}, 0.0};
    const DegreeDist fb = forward_dist(b);
    CHECK(fb.at(0) == doctest::Approx(1.0 / 3.0));
    CHECK(fb.at(1) == doctest::Approx(2.0 / 3.0));
    const DegreeLaws laws = compute_degree_dists(island(std::sqrt(2.0)));
    const DegreeDist f = forward_dist(laws.of(Type::H));
    for (std::size_t d = 0; d < 15; ++d) CHECK(f.at(d) == doctest::Approx(laws.of(Type::H).at(d)).epsilon(1e-9));
  }

  TEST_CASE("connectedness order") {
    CHECK(is_more_connected(compute_degree_dists(island(1.0))) == Connectedness::Equal);
    CHECK(is_more_connected(compute_degree_dists(island(1.5, 0.7, 0.5))) == Connectedness::HMore);
    ModelParams lm = island(1.0);
    lm.f_l = {{2.0, 1.0}};
    CHECK(is_more_connected(compute_degree_dists(lm)) == Connectedness::LMore);
    // Believers: all near degree 2. Sceptics: mostly isolated, some with large degree. The CDFs cross.
    ModelParams cross = island(1.0);
    cross.f_h = {{1.4, 1.0}};
    cross.f_l = {{0.05, 0.8}, {5.0, 0.2}};
    CHECK(is_more_connected(compute_degree_dists(cross)) == Connectedness::Incomparable);
  }

  TEST_CASE("survival matches bisection and Poisson summation") {
    const RhoTable r = solve_rho(island(std::sqrt(2.0)));
    CHECK(std::abs(r.at(Type::H, 0) - oracle::poisson_survival(2.0)) < 1e-10);
    CHECK(std::abs(giant_fraction(island(std::sqrt(2.0)), r) - 0.796812130) < 1e-9);
    CHECK(solve_rho(island(std::sqrt(0.5))).at(Type::H, 0) == 0.0);
    CHECK(solve_rho(island(0.0)).at(Type::L, 0) == 0.0);

    // Two heterogeneous configurations against the term-by-term sum.
    ModelParams a = island(1.0, 0.4, 0.6);
    a.f_h = {{0.8, 0.3}, {2.1, 0.7}};
    a.f_l = {{1.3, 0.5}, {1.9, 0.5}};
    ModelParams b = island(1.0, 0.7, 0.3);
    b.f_h = {{2.5, 1.0}};
    b.f_l = {{0.5, 0.6}, {1.2, 0.4}};
    for (const ModelParams& p : {a, b}) {
      const RhoTable got = solve_rho(p);
      const auto want = rho_by_poisson_summation(p);
      for (Type t : kTypes)
        for (std::size_t i = 0; i < p.f(t).size(); ++i) CHECK(std::abs(got.at(t, i) - want[index(t)][i]) < 1e-9);
    }
  }

  TEST_CASE("observation curve for full sharing") {
    const LimitStats l = compute_limits(island(std::sqrt(2.0)));
    const double rho = oracle::poisson_survival(2.0);
    for (Type t : kTypes) {
      CHECK(l.zeta.at(t, 0) == 0.0);
      CHECK(l.zeta.at(t, 1) == doctest::Approx(rho).epsilon(1e-10));
      for (std::size_t d = 0; d < 30; ++d)
        CHECK(std::abs(l.zeta.at(t, d) - (1.0 - std::pow(1.0 - rho, double(d)))) < 1e-10);
    }
    CHECK(l.zeta.at(Type::H, 200) == doctest::Approx(1.0));
  }

  TEST_CASE("believer-subnetwork giant and its observation curve") {
    const LimitStats sub = compute_limits(island(1.0));
    CHECK(sub.c_hat == 0.0);
    for (std::size_t d = 0; d < 20; ++d) CHECK(sub.zeta_hat.curve.at(Type::L, d) == 0.0);

    const LimitStats l = compute_limits(island(std::sqrt(3.0)));
    const double x = oracle::poisson_survival(1.5);
    CHECK(std::abs(l.c_hat - 0.5 * x) < 1e-10);
    CHECK(l.c_hat == doctest::Approx(0.291406).epsilon(1e-6));

    // Binomial split of the d neighbours into believers, each on the believer giant w.p. x.
    for (ModelParams p : {island(std::sqrt(3.0)), island(2.0, 0.6, 0.4)}) {
      const LimitStats m = compute_limits(p);
      const double xh = oracle::poisson_survival(p.gamma_h * expected_degree(p, Type::H, p.f_h[0].lambda) /
                                                 (p.gamma_h + p.q * (1 - p.gamma_h)));
      for (std::size_t d = 0; d <= 25; ++d) {
        double zh = 0.0, zl = 0.0;
        for (std::size_t k = 0; k <= d; ++k) {
          const double hit = 1.0 - std::pow(1.0 - xh, double(k));
          zh += oracle::binom_pmf(k, d, m.laws.q_of(Type::H)) * hit;
          zl += oracle::binom_pmf(k, d, 1.0 - m.laws.q_of(Type::L)) * hit;
        }
        CHECK(std::abs(m.zeta_hat.curve.at(Type::H, d) - zh) < 1e-10);
        CHECK(std::abs(m.zeta_hat.curve.at(Type::L, d) - zl) < 1e-10);
      }
    }
  }

  TEST_CASE("condition A1 and the voting degree") {
    ModelParams p;
    CHECK(sceptic_empty_ratio(p, 0.6) == doctest::Approx(1.0));
    CHECK(sceptic_empty_ratio(p, 0.0) == doctest::Approx(2.0 / 3.0));

    ZetaCurve flat;
    flat.base = {1.0, 1.0};
    flat.table[0].assign(10, 0.0);
    flat.table[1].assign(10, 0.0);
    CHECK(check_condition_a1(p, flat, 9).holds);
    flat.table[1][4] = 0.6;
    const ConditionA1 a1 = check_condition_a1(p, flat, 9);
    CHECK_FALSE(a1.holds);
    REQUIRE(a1.offending.size() == 1);
    CHECK(a1.offending[0] == 4);

    CHECK_FALSE(compute_limits(island(1.0)).d_vote.has_value());
    const LimitStats l = compute_limits(island(std::sqrt(3.0)));
    REQUIRE(l.d_vote.has_value());
    CHECK(*l.d_vote == 3);
    // First degree where ζ̂(l,d) reaches 0.6.
    std::size_t first = 0;
    while (l.zeta_hat.curve.at(Type::L, first) < 0.6) ++first;
    CHECK(*l.d_vote == first);
  }

  TEST_CASE("branching size law against the Borel recursion") {
    const ModelParams p = island(std::sqrt(0.8));  // subcritical: every tree is finite
    const SizeDistribution d0 = branching_size_dist(p, Type::H, 0, p.f_h[0].lambda, 10, 500, RngSpec{3});
    CHECK(d0.prob[1] == 1.0);
    for (std::size_t d : {1u, 2u}) {
      const SizeDistribution est = branching_size_dist(p, Type::L, d, p.f_l[0].lambda, 10, 40000, RngSpec{5});
      const auto want = oracle::rooted_size_law(d, 0.8, 10);
      double total = est.beyond;
      for (std::size_t m = 1; m <= 10; ++m) {
        total += est.prob[m];
        CHECK(std::abs(est.prob[m] - want[m]) <= 4.0 * std::max(est.std_err[m], 1e-3));
      }
      CHECK(total == doctest::Approx(1.0));
    }
  }
}
