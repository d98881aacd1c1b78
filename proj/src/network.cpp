#include "pnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

#include "pnet/errors.hpp"
#include "pnet/parallel.hpp"

namespace pnet {
namespace {

struct Bucket {
  Type type;
  double lambda;
  std::vector<NodeId> nodes;
};

struct BucketPair {
  std::size_t a, b;
  double p;
  std::uint64_t pairs;
};

// Unordered pair index k in [0, m(m-1)/2) to (i, j) with i < j.
std::pair<std::uint64_t, std::uint64_t> triangle_decode(std::uint64_t k) {
  auto j = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (j * (j - 1) / 2 > k) --j;
  while ((j + 1) * j / 2 <= k) ++j;
  return {k - j * (j - 1) / 2, j};
}

std::vector<std::uint64_t> distinct_indices(std::uint64_t pairs, std::uint64_t m, Philox& g) {
  // For dense requests, draw the complement instead.
  const bool complement = m > pairs / 2;
  const std::uint64_t draws = complement ? pairs - m : m;
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(draws) * 2);
  while (chosen.size() < draws) chosen.insert(uniform_index(g, pairs));
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(m));
  if (complement) {
    for (std::uint64_t k = 0; k < pairs; ++k)
      if (!chosen.count(k)) out.push_back(k);
  } else {
    out.assign(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
  }
  return out;
}

std::vector<Edge> sample_bucket_pair(const BucketPair& bp, const std::vector<Bucket>& buckets, Philox g) {
  std::uint64_t m = bp.pairs;
  if (bp.p < 1.0) {
    std::binomial_distribution<std::uint64_t> count(bp.pairs, bp.p);
    m = count(g);
  }
  const auto& na = buckets[bp.a].nodes;
  const auto& nb = buckets[bp.b].nodes;
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(m));
  for (std::uint64_t k : distinct_indices(bp.pairs, m, g)) {
    NodeId u, v;
    if (bp.a == bp.b) {
      const auto [i, j] = triangle_decode(k);
      u = na[i];
      v = na[j];
    } else {
      u = na[k / nb.size()];
      v = nb[k % nb.size()];
    }
    out.emplace_back(std::min(u, v), std::max(u, v));
  }
  return out;
}

}  // namespace

NetworkInstance NetworkInstance::from_edges(std::vector<Type> types, std::vector<double> lambdas,
                                            std::vector<Edge> edges) {
  if (types.size() != lambdas.size()) throw ValidationError("node type and lambda tables differ in length");
  const std::size_t n = types.size();
  if (n > std::numeric_limits<NodeId>::max()) throw ValidationError("too many nodes");
  NetworkInstance net;
  net.type_ = std::move(types);
  net.lambda_ = std::move(lambdas);

  std::vector<std::size_t> deg(n, 0);
  for (auto& [u, v] : edges) {
    if (u >= n || v >= n) throw ValidationError(fmt::format("edge ({}, {}) references a missing node", u, v));
    if (u == v) throw ValidationError(fmt::format("self-loop at node {}", u));
    if (u > v) std::swap(u, v);
    ++deg[u];
    ++deg[v];
  }
  net.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) net.offsets_[i + 1] = net.offsets_[i] + deg[i];
  net.neighbors_.resize(net.offsets_[n]);
  std::vector<std::size_t> cursor(net.offsets_.begin(), net.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    net.neighbors_[cursor[u]++] = v;
    net.neighbors_[cursor[v]++] = u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto first = net.neighbors_.begin() + static_cast<std::ptrdiff_t>(net.offsets_[i]);
    auto last = net.neighbors_.begin() + static_cast<std::ptrdiff_t>(net.offsets_[i + 1]);
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last) throw ValidationError(fmt::format("duplicate edge at node {}", i));
  }
  return net;
}

std::vector<Edge> NetworkInstance::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < size(); ++u) {
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  }
  return out;
}

void NetworkInstance::write_edge_list(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw ValidationError(fmt::format("cannot open {} for writing", path.string()));
  for (const auto& [u, v] : edges()) os << u << ' ' << v << '\n';
}

void NetworkInstance::write_node_table(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw ValidationError(fmt::format("cannot open {} for writing", path.string()));
  for (NodeId i = 0; i < size(); ++i) os << fmt::format("{} {} {:.17g}\n", i, type_char(type_[i]), lambda_[i]);
}

NetworkInstance NetworkInstance::read(const std::filesystem::path& edge_path, const std::filesystem::path& node_path) {
  std::ifstream ns(node_path);
  if (!ns) throw ValidationError(fmt::format("cannot open {}", node_path.string()));
  std::vector<Type> types;
  std::vector<double> lambdas;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ns, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::size_t id;
    char t;
    double lambda;
    if (!(is >> id >> t >> lambda) || (t != 'h' && t != 'l') || id != types.size())
      throw ValidationError(fmt::format("{}:{}: expected '<id> <h|l> <lambda>' in id order", node_path.string(), lineno));
    types.push_back(t == 'h' ? Type::H : Type::L);
    lambdas.push_back(lambda);
  }
  std::ifstream es(edge_path);
  if (!es) throw ValidationError(fmt::format("cannot open {}", edge_path.string()));
  std::vector<Edge> edges;
  lineno = 0;
  while (std::getline(es, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::uint64_t u, v;
    if (!(is >> u >> v) || u > std::numeric_limits<NodeId>::max() || v > std::numeric_limits<NodeId>::max())
      throw ValidationError(fmt::format("{}:{}: expected '<u> <v>'", edge_path.string(), lineno));
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return from_edges(std::move(types), std::move(lambdas), std::move(edges));
}

NetworkInstance sample_network(const ModelParams& params, std::size_t n, const RngSpec& rng,
                               const SampleOptions& options) {
  params.validate();
  if (n < 2) throw ValidationError(fmt::format("n must be >= 2 (got {})", n));
  if (n > std::numeric_limits<NodeId>::max()) throw ValidationError("n exceeds the node id range");

  std::vector<Bucket> buckets;
  std::array<std::size_t, 2> first_bucket{};
  for (Type t : kTypes) {
    first_bucket[index(t)] = buckets.size();
    for (const auto& m : params.f(t)) buckets.push_back({t, m.lambda, {}});
  }

  std::vector<Type> types(n);
  std::vector<double> lambdas(n);
  Philox g = rng.stream("nodes");
  for (NodeId i = 0; i < n; ++i) {
    const Type t = uniform01(g) < params.gamma_h ? Type::H : Type::L;
    const auto& f = params.f(t);
    const double u = uniform01(g);
    std::size_t k = 0;
    double acc = f[0].prob;
    while (k + 1 < f.size() && u >= acc) acc += f[++k].prob;
    types[i] = t;
    lambdas[i] = f[k].lambda;
    buckets[first_bucket[index(t)] + k].nodes.push_back(i);
  }

  const double nn = static_cast<double>(n);
  std::vector<BucketPair> tasks;
  double expected = 0.0;
  for (std::size_t a = 0; a < buckets.size(); ++a) {
    for (std::size_t b = a; b < buckets.size(); ++b) {
      const auto sa = static_cast<std::uint64_t>(buckets[a].nodes.size());
      const auto sb = static_cast<std::uint64_t>(buckets[b].nodes.size());
      const std::uint64_t pairs = a == b ? sa * (sa - (sa > 0 ? 1 : 0)) / 2 : sa * sb;
      const double w = params.affinity(buckets[a].type, buckets[b].type);
      const double p = std::min(w * buckets[a].lambda * buckets[b].lambda / nn, 1.0);
      if (pairs == 0 || p <= 0.0) continue;
      tasks.push_back({a, b, p, pairs});
      expected += p * static_cast<double>(pairs);
    }
  }
  if (expected > options.edge_budget)
    throw ValidationError(
        fmt::format("expected edge count {:.3g} exceeds the edge budget {:.3g}", expected, options.edge_budget));

  std::vector<std::vector<Edge>> parts(tasks.size());
  parallel_for(tasks.size(), options.threads, [&](std::size_t k) {
    const auto& bp = tasks[k];
    parts[k] = sample_bucket_pair(bp, buckets, rng.stream("edges", bp.a, bp.b));
  });
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<Edge> edges;
  edges.reserve(total);
  for (auto& p : parts) {
    edges.insert(edges.end(), p.begin(), p.end());
    std::vector<Edge>().swap(p);
  }
  return NetworkInstance::from_edges(std::move(types), std::move(lambdas), std::move(edges));
}

std::array<TypeStats, 2> empirical_stats(const NetworkInstance& net) {
  std::array<TypeStats, 2> out;
  std::array<std::size_t, 2> same{0, 0}, ends{0, 0};
  for (NodeId i = 0; i < net.size(); ++i) {
    auto& s = out[index(net.type(i))];
    const std::size_t d = net.degree(i);
    if (s.degree_hist.size() <= d) s.degree_hist.resize(d + 1, 0.0);
    s.degree_hist[d] += 1.0;
    ++s.nodes;
    for (NodeId j : net.neighbors(i)) {
      ++ends[index(net.type(i))];
      if (net.type(j) == net.type(i)) ++same[index(net.type(i))];
    }
  }
  for (Type t : kTypes) {
    auto& s = out[index(t)];
    s.empty = s.nodes == 0;
    if (s.empty) continue;
    double mean = 0.0;
    for (std::size_t d = 0; d < s.degree_hist.size(); ++d) {
      s.degree_hist[d] /= static_cast<double>(s.nodes);
      mean += static_cast<double>(d) * s.degree_hist[d];
    }
    s.mean_degree = mean;
    s.same_type_fraction = ends[index(t)] > 0 ? static_cast<double>(same[index(t)]) / static_cast<double>(ends[index(t)]) : 0.0;
  }
  return out;
}

}  // namespace pnet
