#include <cmath>
#include <random>

#include "pnet/limits.hpp"
#include "pnet/parallel.hpp"

namespace pnet {
namespace {

struct ChildLaw {
  std::vector<double> cdf;  // over (type, atom) pairs, H atoms first
  std::vector<Type> type;
  std::vector<double> intensity;  // Poisson mean of further offspring
};

ChildLaw child_law(const ModelParams& params, Type parent) {
  ChildLaw law;
  double total = 0.0;
  for (Type u : kTypes) {
    const auto& f = params.f(u);
    for (const auto& m : f) {
      total += params.affinity(parent, u) * params.gamma(u) * m.prob * m.lambda;
      law.cdf.push_back(total);
      law.type.push_back(u);
      law.intensity.push_back(expected_degree(params, u, m.lambda));
    }
  }
  for (auto& c : law.cdf) c = total > 0.0 ? c / total : 1.0;
  return law;
}

std::size_t draw(const std::vector<double>& cdf, double u) {
  std::size_t i = 0;
  while (i + 1 < cdf.size() && u >= cdf[i]) ++i;
  return i;
}

}  // namespace

SizeDistribution branching_size_dist(const ModelParams& params, Type t, std::size_t d, double lambda,
                                     std::size_t m_max, std::size_t samples, const RngSpec& rng,
                                     std::size_t threads) {
  params.validate();
  if (samples == 0) throw ValidationError("samples must be >= 1");
  if (m_max == 0) throw ValidationError("m_max must be >= 1");
  (void)lambda;  // the root's λ only enters through d, which is given

  const std::array<ChildLaw, 2> laws{child_law(params, Type::H), child_law(params, Type::L)};
  const std::size_t over = m_max + 1;
  std::vector<std::size_t> size(samples);

  parallel_for(samples, threads, [&](std::size_t s) {
    Philox g = rng.stream("branching", s);
    // Pending nodes awaiting their offspring draw, as indices into a ChildLaw.
    std::vector<std::pair<Type, std::size_t>> pending;
    std::size_t total = 1;
    auto add_child = [&](Type parent) {
      const ChildLaw& law = laws[index(parent)];
      const std::size_t k = draw(law.cdf, uniform01(g));
      pending.emplace_back(parent, k);
      ++total;
    };
    for (std::size_t i = 0; i < d && total <= m_max; ++i) add_child(t);
    while (!pending.empty() && total <= m_max) {
      const auto [parent, k] = pending.back();
      pending.pop_back();
      const ChildLaw& law = laws[index(parent)];
      const Type self = law.type[k];
      std::poisson_distribution<std::size_t> offspring(law.intensity[k]);
      const std::size_t kids = law.intensity[k] > 0.0 ? offspring(g) : 0;
      for (std::size_t i = 0; i < kids && total <= m_max; ++i) add_child(self);
    }
    size[s] = std::min(total, over);
  });

  SizeDistribution out;
  out.samples = samples;
  out.prob.assign(m_max + 1, 0.0);
  out.std_err.assign(m_max + 1, 0.0);
  std::size_t beyond = 0;
  for (std::size_t s : size) {
    if (s == over) ++beyond;
    else out.prob[s] += 1.0;
  }
  const double n = static_cast<double>(samples);
  for (std::size_t m = 0; m <= m_max; ++m) {
    out.prob[m] /= n;
    out.std_err[m] = std::sqrt(out.prob[m] * (1.0 - out.prob[m]) / n);
  }
  out.beyond = static_cast<double>(beyond) / n;
  return out;
}

}  // namespace pnet
