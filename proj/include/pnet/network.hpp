#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "pnet/model.hpp"
#include "pnet/rng.hpp"

namespace pnet {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Immutable undirected simple graph in CSR form with per-node type and λ.
class NetworkInstance {
 public:
  NetworkInstance() = default;

  /// Builds from an edge list; rejects self-loops, duplicates and bad ids.
  static NetworkInstance from_edges(std::vector<Type> types, std::vector<double> lambdas, std::vector<Edge> edges);

  std::size_t size() const { return type_.size(); }
  std::size_t edge_count() const { return neighbors_.size() / 2; }
  Type type(NodeId i) const { return type_[i]; }
  double lambda(NodeId i) const { return lambda_[i]; }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  std::span<const NodeId> neighbors(NodeId i) const {
    return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
  }
  const std::vector<Type>& types() const { return type_; }
  const std::vector<double>& lambdas() const { return lambda_; }

  /// Each undirected edge once, as (u, v) with u < v, in ascending order.
  std::vector<Edge> edges() const;

  void write_edge_list(const std::filesystem::path& path) const;
  void write_node_table(const std::filesystem::path& path) const;
  static NetworkInstance read(const std::filesystem::path& edge_path, const std::filesystem::path& node_path);

 private:
  std::vector<Type> type_;
  std::vector<double> lambda_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
};

struct SampleOptions {
  /// Refuse to sample when the expected edge count exceeds this.
  double edge_budget = 5e7;
  std::size_t threads = 1;
};

NetworkInstance sample_network(const ModelParams& params, std::size_t n, const RngSpec& rng,
                               const SampleOptions& options = {});

struct TypeStats {
  bool empty = true;
  std::size_t nodes = 0;
  std::vector<double> degree_hist;  // normalized
  double same_type_fraction = 0.0;
  double mean_degree = 0.0;
};

std::array<TypeStats, 2> empirical_stats(const NetworkInstance& net);

}  // namespace pnet
