#include "pnet/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "pnet/diffusion.hpp"
#include "pnet/parallel.hpp"

namespace pnet {
namespace {

using Vec = std::array<double, 4>;

constexpr double kFeasTol = 1e-10;
constexpr double kSingular = 1e-13;
constexpr std::size_t kTopK = 8;
constexpr std::size_t kMaxSweeps = 200;

struct Plane {
  Vec a{};
  double b = 0.0;
};

double dot(const Vec& a, const Vec& x) { return a[0] * x[0] + a[1] * x[1] + a[2] * x[2] + a[3] * x[3]; }

/// Half-spaces a·x ≤ b describing the closure of the two-signal class.
std::vector<Plane> class_constraints(const ModelParams& p) {
  std::vector<Plane> out;
  for (std::size_t k = 0; k < 4; ++k) {
    Plane lo, hi;
    lo.a[k] = -1.0;
    hi.a[k] = 1.0;
    hi.b = 1.0;
    out.push_back(lo);
    out.push_back(hi);
  }
  out.push_back({{1, 0, 1, 0}, 1.0});
  out.push_back({{0, 1, 0, 1}, 1.0});
  out.push_back({{-p.mu_l1, 1.0 - p.mu_l1, 0, 0}, 0.0});  // Good persuades sceptics
  out.push_back({{0, 0, -p.mu_h1, 1.0 - p.mu_h1}, 0.0});  // Int persuades believers
  out.push_back({{0, 0, p.mu_l1, -(1.0 - p.mu_l1)}, 0.0});  // Int leaves sceptics unpersuaded
  return out;
}

/// Loci where a cell's ∅-likelihood ratio equals one.
std::vector<Plane> indifference_planes(const ModelParams& p, const Exposure& e) {
  std::vector<Plane> out;
  for (const auto& c : e.cells) {
    if (c.weight <= 0.0 || (c.good == 0.0 && c.mid == 0.0)) continue;
    const double m1 = p.prior1(c.type), m0 = p.prior0(c.type);
    Plane h{{-m1 * c.good, m0 * c.good, -m1 * c.mid, m0 * c.mid}, m0 - m1};
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Plane& o) { return o.a == h.a && o.b == h.b; });
    if (!dup) out.push_back(h);
  }
  return out;
}

bool satisfies(const std::vector<Plane>& cons, const Vec& x, double tol) {
  return std::all_of(cons.begin(), cons.end(), [&](const Plane& c) { return dot(c.a, x) <= c.b + tol; });
}

// Removes rounding residue left by a linear solve.
Vec snap(Vec x) {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  for (std::size_t k : {0, 1}) {
    const double over = x[k] + x[k + 2] - 1.0;
    if (over > 0.0) x[k + 2] = std::max(0.0, x[k + 2] - over);
    if (x[k] + x[k + 2] > 1.0) x[k] = 1.0 - x[k + 2];
  }
  return x;
}

/// Running maximum with a lexicographic tie-break.
struct Best {
  Vec x{};
  double value = -std::numeric_limits<double>::infinity();

  bool offer(const Vec& y, double v) {
    if (v > value || (v == value && y < x)) {
      x = y;
      value = v;
      return true;
    }
    return false;
  }
};

/// x = origin + Σ_j dirs[j] y_j for j < dim.
struct Affine {
  std::size_t dim = 4;
  Vec origin{};
  std::array<Vec, 4> dirs{};

  Vec at(const std::array<double, 4>& y) const {
    Vec x = origin;
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t i = 0; i < 4; ++i) x[i] += dirs[j][i] * y[j];
    return x;
  }
  // a·x = b pulled back to y coordinates.
  Plane pull(const Plane& p) const {
    Plane q;
    for (std::size_t j = 0; j < dim; ++j) q.a[j] = dot(p.a, dirs[j]);
    q.b = p.b - dot(p.a, origin);
    return q;
  }
};

bool solve(std::size_t k, std::array<Vec, 4> m, Vec rhs, Vec& out) {
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < kSingular) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < k; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t i = 0; i < k; ++i) out[i] = rhs[i] / m[i][i];
  return true;
}

class Search {
 public:
  Search(const ModelParams& params, const Exposure& exposure)
      : params_(params), exposure_(exposure), cons_(class_constraints(params)), planes_(indifference_planes(params, exposure)) {}

  double value(const Vec& x) {
    ++evaluations_;
    return evaluate(params_, exposure_, ReducedStrategy::from_array(x)).value;
  }

  /// Exact maximum over the image of `map`: the objective is linear on every
  /// cell of the arrangement and ties resolve upward, so a vertex attains it.
  void enumerate_vertices(const Affine& map, Best& best) {
    std::vector<Plane> cons, all;
    for (const auto& c : cons_) {
      const Plane q = map.pull(c);
      cons.push_back(q);
    }
    auto nonzero = [&](const Plane& q) {
      for (std::size_t j = 0; j < map.dim; ++j)
        if (std::abs(q.a[j]) > kSingular) return true;
      return false;
    };
    for (const auto& q : cons)
      if (nonzero(q)) all.push_back(q);
    for (const auto& h : planes_) {
      const Plane q = map.pull(h);
      if (nonzero(q)) all.push_back(q);
    }
    const std::size_t k = map.dim;
    std::array<std::size_t, 4> idx{};
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (all.size() < k) return;
    for (;;) {
      std::array<Vec, 4> m{};
      Vec rhs{}, y{};
      for (std::size_t r = 0; r < k; ++r) {
        m[r] = all[idx[r]].a;
        rhs[r] = all[idx[r]].b;
      }
      if (solve(k, m, rhs, y) && satisfies(cons, y, kFeasTol)) {
        const Vec x = snap(map.at(y));
        best.offer(x, value(x));
      }
      // Next k-combination of all.size() indices.
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == all.size() - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }

  /// Grid over the box [lo, hi]^4 with m points per axis; keeps the top points.
  void grid(const Vec& lo, const Vec& hi, std::size_t m, std::size_t threads, std::vector<std::pair<double, Vec>>& top) {
    auto coord = [&](std::size_t axis, std::size_t i) {
      return m == 1 ? lo[axis] : lo[axis] + (hi[axis] - lo[axis]) * static_cast<double>(i) / static_cast<double>(m - 1);
    };
    std::vector<std::vector<std::pair<double, Vec>>> parts(m);
    std::vector<std::size_t> counts(m, 0);
    parallel_for(m, threads, [&](std::size_t i0) {
      auto& local = parts[i0];
      for (std::size_t i1 = 0; i1 < m; ++i1)
        for (std::size_t i2 = 0; i2 < m; ++i2)
          for (std::size_t i3 = 0; i3 < m; ++i3) {
            const Vec x{coord(0, i0), coord(1, i1), coord(2, i2), coord(3, i3)};
            if (!satisfies(cons_, x, 1e-12)) continue;
            ++counts[i0];
            keep_top(local, {evaluate(params_, exposure_, ReducedStrategy::from_array(x)).value, x});
          }
    });
    for (std::size_t i = 0; i < m; ++i) {
      evaluations_ += counts[i];
      for (const auto& p : parts[i]) keep_top(top, p);
    }
  }

  /// Coordinate and pattern line search; each line is solved exactly by
  /// evaluating at its constraint ends and indifference crossings.
  void line_search(Vec x, Best& best) {
    const double rl = params_.mu_l1 / params_.prior0(Type::L);
    const double rh = params_.mu_h1 / params_.prior0(Type::H);
    const std::array<Vec, 10> dirs{{{1, 0, 0, 0},
                                    {0, 1, 0, 0},
                                    {0, 0, 1, 0},
                                    {0, 0, 0, 1},
                                    {1, rl, 0, 0},
                                    {0, 0, 1, rh},
                                    {0, 0, 1, rl},
                                    {1, 0, -1, 0},
                                    {0, 1, 0, -1},
                                    {1, rl, -1, -rh}}};
    double fx = value(x);
    best.offer(x, fx);
    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
      bool moved = false;
      for (const auto& d : dirs) {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (const auto& c : cons_) {
          const double ad = dot(c.a, d);
          if (std::abs(ad) < 1e-15) continue;
          const double t = (c.b - dot(c.a, x)) / ad;
          if (ad > 0) hi = std::min(hi, t);
          else lo = std::max(lo, t);
        }
        if (!(lo <= hi)) continue;
        std::vector<double> taus{lo, hi};
        for (const auto& h : planes_) {
          const double ad = dot(h.a, d);
          if (std::abs(ad) < 1e-15) continue;
          const double t = (h.b - dot(h.a, x)) / ad;
          if (t > lo && t < hi) taus.push_back(t);
        }
        Vec bx = x;
        double bf = fx;
        for (double t : taus) {
          Vec y;
          for (std::size_t i = 0; i < 4; ++i) y[i] = x[i] + t * d[i];
          y = snap(y);
          const double fy = value(y);
          if (fy > bf + 1e-14) {
            bf = fy;
            bx = y;
          }
        }
        if (bf > fx) {
          x = bx;
          fx = bf;
          moved = true;
          best.offer(x, fx);
        }
      }
      if (!moved) break;
    }
  }

  std::size_t evaluations() const { return evaluations_; }

  static void keep_top(std::vector<std::pair<double, Vec>>& top, const std::pair<double, Vec>& p) {
    top.push_back(p);
    std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    if (top.size() > kTopK) top.pop_back();
  }

 private:
  const ModelParams& params_;
  const Exposure& exposure_;
  std::vector<Plane> cons_;
  std::vector<Plane> planes_;
  std::size_t evaluations_ = 0;
};

double weight_total(const Exposure& e) {
  double s = 0.0;
  for (const auto& c : e.cells) s += c.weight;
  return s;
}

void fill_report(PayoffReport& r, const ModelParams& params, const Exposure& e) {
  r.cells = e.cells;
  r.empty_action = empty_actions(params, e, r.strategy);
  r.tail_error_bound = e.tail_weight * (params.payoff(1.0) - params.payoff(0.0));
}

}  // namespace

void ReducedStrategy::validate(const ModelParams& params) const {
  for (double v : as_array())
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("strategy probabilities must lie in [0,1]");
  if (pi_s1 + pi_sp1 > 1.0 + 1e-12 || pi_s0 + pi_sp0 > 1.0 + 1e-12)
    throw ValidationError("strategy probabilities sum above 1 in some state");
  if (pi_s1 + pi_s0 > 0.0 && pi_s1 * params.mu_l1 < pi_s0 * params.prior0(Type::L) - kTieEps)
    throw ValidationError("Good signal does not persuade sceptics");
  if (pi_sp1 + pi_sp0 > 0.0) {
    if (pi_sp1 * params.mu_h1 < pi_sp0 * params.prior0(Type::H) - kTieEps)
      throw ValidationError("Int signal does not persuade believers");
    if (!(pi_sp1 * params.mu_l1 < pi_sp0 * params.prior0(Type::L) - kTieEps))
      throw ValidationError("Int signal persuades sceptics");
  }
}

bool ReducedStrategy::feasible_closure(const ModelParams& params, double slack) const {
  return satisfies(class_constraints(params), as_array(), slack);
}

Exposure network_exposure(const ModelParams& params, const LimitStats& limits) {
  Exposure e;
  for (Type t : kTypes) {
    const auto& p = limits.p(t);
    for (std::size_t d = 0; d <= p.d_max(); ++d)
      e.cells.push_back({t, d, params.gamma(t) * p.at(d), limits.zeta.at(t, d), limits.zeta_hat.curve.at(t, d)});
    const double tail = params.gamma(t) * p.tail_mass;
    e.cells.push_back({t, p.d_max() + 1, tail, limits.zeta.limit(t), limits.zeta_hat.curve.limit(t)});
    e.tail_weight += tail;
  }
  return e;
}

Exposure public_exposure(const ModelParams& params) {
  Exposure e;
  for (Type t : kTypes) e.cells.push_back({t, 0, params.gamma(t), 1.0, 1.0});
  return e;
}

std::vector<int> empty_actions(const ModelParams& params, const Exposure& exposure, const ReducedStrategy& s) {
  std::vector<int> out;
  out.reserve(exposure.cells.size());
  for (const auto& c : exposure.cells) {
    const double miss1 = 1.0 - s.pi_s1 * c.good - s.pi_sp1 * c.mid;
    const double miss0 = 1.0 - s.pi_s0 * c.good - s.pi_sp0 * c.mid;
    out.push_back(empty_action(params.prior1(c.type), miss1, miss0));
  }
  return out;
}

Evaluation evaluate(const ModelParams& params, const Exposure& exposure, const ReducedStrategy& s) {
  const double e1 = 1.0 - s.pi_s1 - s.pi_sp1;
  const double e0 = 1.0 - s.pi_s0 - s.pi_sp0;
  if (e1 < -1e-12 || e0 < -1e-12) throw ValidationError("strategy probabilities sum above 1 in some state");
  Evaluation out;
  for (const auto& c : exposure.cells) {
    const double miss1 = 1.0 - s.pi_s1 * c.good - s.pi_sp1 * c.mid;
    const double miss0 = 1.0 - s.pi_s0 * c.good - s.pi_sp0 * c.mid;
    const double a = empty_action(params.prior1(c.type), miss1, miss0);
    out.x_good += c.weight * (c.good + (1.0 - c.good) * a);
    out.x_mid += c.weight * ((c.type == Type::H ? c.mid : 0.0) + (1.0 - c.mid) * a);
    out.x_empty += c.weight * a;
  }
  auto v = [&](double x) { return payoff_eval(params.payoff, std::min(x, 1.0)); };
  const double vg = v(out.x_good), vm = v(out.x_mid), ve = v(out.x_empty);
  const double state1 = s.pi_s1 * vg + s.pi_sp1 * vm + std::max(0.0, e1) * ve;
  const double state0 = s.pi_s0 * vg + s.pi_sp0 * vm + std::max(0.0, e0) * ve;
  out.value = params.mu_s1 * state1 + (1.0 - params.mu_s1) * state0;
  return out;
}

double limit_payoff_network(const ModelParams& params, const LimitStats& limits, const ReducedStrategy& strategy) {
  strategy.validate(params);
  return evaluate(params, network_exposure(params, limits), strategy).value;
}

double limit_payoff_public(const ModelParams& params, const ReducedStrategy& strategy) {
  strategy.validate(params);
  return evaluate(params, public_exposure(params), strategy).value;
}

PayoffReport optimize_network(const ModelParams& params, const LimitStats& limits, const OptimizeOptions& options) {
  params.validate();
  if (options.grid_n < 2) throw ValidationError("grid_n must be >= 2");
  const Exposure e = network_exposure(params, limits);
  Search search(params, e);

  // (a) Restricted class: Good at sceptic indifference, Int on the believer
  // frontier. The min in the frontier splits it into two linear pieces.
  const double rl = params.mu_l1 / params.prior0(Type::L);
  const double rh = params.mu_h1 / params.prior0(Type::H);
  Best restricted;
  restricted.offer(Vec{}, search.value(Vec{}));
  Affine piece_a{2, {0, 0, 0, 0}, {{{1, rl, 0, 0}, {0, 0, 1, rh}}}};
  Affine piece_b{2, {0, 0, 0, 1}, {{{1, rl, 0, -rl}, {0, 0, 1, 0}}}};
  search.enumerate_vertices(piece_a, restricted);
  search.enumerate_vertices(piece_b, restricted);

  // (b) Full region: grid, zoom, then exact line searches from the leaders.
  Best full = restricted;
  const auto m = std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(options.grid_n)))));
  std::vector<std::pair<double, Vec>> top;
  search.grid({0, 0, 0, 0}, {1, 1, 1, 1}, m, options.threads, top);
  double half = 1.0 / static_cast<double>(m - 1);
  for (std::size_t round = 0; round < options.refine_iters && !top.empty(); ++round) {
    const Vec c = top.front().second;
    Vec lo, hi;
    for (std::size_t i = 0; i < 4; ++i) {
      lo[i] = std::max(0.0, c[i] - half);
      hi[i] = std::min(1.0, c[i] + half);
    }
    search.grid(lo, hi, m, options.threads, top);
    half /= 10.0;
  }
  std::vector<Vec> starts{restricted.x};
  for (const auto& p : top) starts.push_back(p.second);
  for (const auto& x : starts) search.line_search(x, full);

  PayoffReport r;
  r.regime = "network";
  r.restricted_value = restricted.value;
  r.full_value = full.value;
  r.regime_gap = full.value - restricted.value;
  if (r.regime_gap < -1e-9) throw SolverError("full-region search fell below the restricted optimum");
  r.value = full.value;
  r.strategy = ReducedStrategy::from_array(full.x);
  r.condition_a1 = limits.condition_a1.holds;
  r.a1_offending = limits.condition_a1.offending;
  if (!r.condition_a1) r.flags.push_back("condition_a1_violated: the limiting value may not be attainable");
  if (std::abs(weight_total(e) - 1.0) > 1e-9) r.flags.push_back("population weights do not sum to one");
  r.evaluations = search.evaluations();
  fill_report(r, params, e);
  return r;
}

double voting_public_value(const ModelParams& params) {
  return params.mu_s1 + (1.0 - params.mu_s1) * params.mu_l1 / params.prior0(Type::L);
}

PayoffReport optimize_public(const ModelParams& params, const OptimizeOptions& options) {
  params.validate();
  (void)options;  // the public problem has two cells, so enumeration is exhaustive
  const Exposure e = public_exposure(params);
  Search search(params, e);
  Best best;
  best.offer(Vec{}, search.value(Vec{}));
  Affine identity{4, {0, 0, 0, 0}, {{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}}};
  search.enumerate_vertices(identity, best);

  PayoffReport r;
  r.regime = "public";
  r.value = best.value;
  r.strategy = ReducedStrategy::from_array(best.x);
  if (params.payoff.kind == PayoffFn::Kind::Step && params.payoff.param > params.gamma_h) {
    r.closed_form = voting_public_value(params);
    if (std::abs(*r.closed_form - r.value) > 1e-9)
      throw VerdictFailure(fmt::format("public optimum {:.17g} differs from the closed form {:.17g}", r.value, *r.closed_form));
  }
  r.evaluations = search.evaluations();
  fill_report(r, params, e);
  return r;
}

VotingConditions voting_conditions(const ModelParams& params, const LimitStats& limits) {
  VotingConditions out;
  out.d_vote = limits.d_vote;
  out.margin = params.payoff.param - params.gamma_h;
  const auto& pl = limits.p(Type::L);
  const double gl = params.gamma(Type::L);
  if (out.d_vote) {
    const std::size_t dv = *out.d_vote;
    for (std::size_t d = dv; d <= pl.d_max(); ++d) out.necessary_sum += gl * pl.at(d);
    for (std::size_t d = dv + 1; d <= pl.d_max(); ++d)
      out.sufficient_sum += gl * pl.at(d) * (1.0 - limits.zeta_hat.curve.at(Type::L, d));
    // Tail degrees all exceed d_vote; their ζ̂ tends to its limit.
    out.necessary_sum += gl * pl.tail_mass;
    out.sufficient_sum += gl * pl.tail_mass * (1.0 - limits.zeta_hat.curve.limit(Type::L));
  }
  out.necessary = out.necessary_sum >= out.margin;
  out.sufficient = out.sufficient_sum > out.margin;
  return out;
}

Hypotheses check_hypotheses(const ModelParams& params, const LimitStats& limits) {
  Hypotheses h;
  h.baseline = params.f_h == params.f_l && params.q == 1.0;
  const bool weakly_more =
      limits.connectedness == Connectedness::HMore || limits.connectedness == Connectedness::Equal;
  h.homophily_order = weakly_more && limits.laws.q[0] >= 1.0 - limits.laws.q[1] - 1e-12;
  h.convex_payoff = params.payoff.convex();
  h.believer_giant = limits.c_hat > 0.0;
  h.voting = params.payoff.kind == PayoffFn::Kind::Step && params.payoff.param > params.gamma_h;
  return h;
}

Comparison compare(const ModelParams& params, const LimitOptions& limit_options, const OptimizeOptions& options) {
  const LimitStats limits = compute_limits(params, limit_options);
  Comparison out;
  out.public_ = optimize_public(params, options);
  out.network = optimize_network(params, limits, options);
  out.gap = out.network.value - out.public_.value;
  out.hypotheses = check_hypotheses(params, limits);
  out.applicable = "none";
  out.predicted = "none";
  const auto& h = out.hypotheses;
  if (h.voting) {
    out.voting = voting_conditions(params, limits);
    if (!h.believer_giant) {
      out.applicable = "voting_no_believer_giant";
      out.predicted = "public_weakly_better";
    } else if (out.voting->sufficient) {
      out.applicable = "voting_sufficient";
      out.predicted = "network_strictly_better";
    } else if (!out.voting->necessary) {
      out.applicable = "voting_necessary_fails";
      out.predicted = "public_weakly_better";
    }
  } else if (h.convex_payoff && h.baseline) {
    out.applicable = "baseline";
    out.predicted = "public_weakly_better";
  } else if (h.convex_payoff && h.homophily_order) {
    out.applicable = "homophily";
    out.predicted = "public_weakly_better";
  }
  if (out.predicted == "public_weakly_better") out.holds = out.gap <= kGapTol;
  if (out.predicted == "network_strictly_better") out.holds = out.gap > kGapTol;
  return out;
}

}  // namespace pnet
