#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pnet/network.hpp"

namespace pnet {

inline constexpr std::uint32_t kNoComponent = UINT32_MAX;

/// Components labelled 0, 1, ... in decreasing size; ties go to the
/// component with the smaller minimum node id. Label 0 is therefore L1.
struct ComponentDecomposition {
  std::vector<std::uint32_t> component;  // kNoComponent for nodes outside the subgraph
  std::vector<std::size_t> sizes;        // descending
  std::vector<NodeId> min_node;          // smallest member per label

  bool empty() const { return sizes.empty(); }
  std::size_t largest() const { return sizes.empty() ? 0 : sizes[0]; }
  std::size_t second() const { return sizes.size() > 1 ? sizes[1] : 0; }
  bool in_largest(NodeId i) const { return component[i] == 0; }
};

ComponentDecomposition components(const NetworkInstance& net);

struct BelieverDecomposition {
  ComponentDecomposition believers;  // over the subgraph induced by h-nodes
  std::vector<char> touches_giant;   // node has a neighbour in L̂1
};

BelieverDecomposition believer_components(const NetworkInstance& net);

}  // namespace pnet
