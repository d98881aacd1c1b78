#include "pnet/components.hpp"

#include <algorithm>
#include <numeric>

namespace pnet {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  NodeId find(NodeId x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<NodeId> parent_;
  std::vector<std::size_t> size_;
};

template <class Keep>
ComponentDecomposition decompose(const NetworkInstance& net, Keep keep) {
  const std::size_t n = net.size();
  DisjointSets sets(n);
  for (NodeId u = 0; u < n; ++u) {
    if (!keep(u)) continue;
    for (NodeId v : net.neighbors(u))
      if (u < v && keep(v)) sets.unite(u, v);
  }

  // Roots first seen in id order, so each root's first visit is its minimum node.
  std::vector<std::uint32_t> provisional(n, kNoComponent);
  std::vector<NodeId> min_node;
  std::vector<std::size_t> sizes;
  std::vector<std::uint32_t> label(n, kNoComponent);
  for (NodeId u = 0; u < n; ++u) {
    if (!keep(u)) continue;
    const NodeId r = sets.find(u);
    if (provisional[r] == kNoComponent) {
      provisional[r] = static_cast<std::uint32_t>(sizes.size());
      min_node.push_back(u);
      sizes.push_back(0);
    }
    label[u] = provisional[r];
    ++sizes[label[u]];
  }

  std::vector<std::uint32_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return sizes[a] != sizes[b] ? sizes[a] > sizes[b] : min_node[a] < min_node[b];
  });
  std::vector<std::uint32_t> rank(order.size());
  for (std::uint32_t k = 0; k < order.size(); ++k) rank[order[k]] = k;

  ComponentDecomposition out;
  out.component.assign(n, kNoComponent);
  for (NodeId u = 0; u < n; ++u)
    if (label[u] != kNoComponent) out.component[u] = rank[label[u]];
  for (std::uint32_t k : order) {
    out.sizes.push_back(sizes[k]);
    out.min_node.push_back(min_node[k]);
  }
  return out;
}

}  // namespace

ComponentDecomposition components(const NetworkInstance& net) {
  return decompose(net, [](NodeId) { return true; });
}

BelieverDecomposition believer_components(const NetworkInstance& net) {
  BelieverDecomposition out;
  out.believers = decompose(net, [&](NodeId i) { return net.type(i) == Type::H; });
  out.touches_giant.assign(net.size(), 0);
  if (out.believers.empty()) return out;
  for (NodeId u = 0; u < net.size(); ++u) {
    for (NodeId v : net.neighbors(u)) {
      if (out.believers.in_largest(v)) {
        out.touches_giant[u] = 1;
        break;
      }
    }
  }
  return out;
}

}  // namespace pnet
