#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <map>

#include "pnet/components.hpp"
#include "pnet/errors.hpp"
#include "pnet/network.hpp"

using namespace pnet;

namespace {

NetworkInstance graph(std::vector<Type> types, std::vector<Edge> edges) {
  std::vector<double> lambdas(types.size(), 1.0);
  return NetworkInstance::from_edges(std::move(types), std::move(lambdas), std::move(edges));
}

constexpr Type H = Type::H;
constexpr Type L = Type::L;

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("construction rejects malformed edge lists") {
    CHECK_THROWS_AS(graph({H, H}, {{0, 0}}), ValidationError);
    CHECK_THROWS_AS(graph({H, H}, {{0, 1}, {1, 0}}), ValidationError);
    CHECK_THROWS_AS(graph({H, H}, {{0, 2}}), ValidationError);
  }

  TEST_CASE("empirical statistics on small graphs") {
    const auto tri = empirical_stats(graph({H, H, H}, {{0, 1}, {1, 2}, {0, 2}}));
    REQUIRE(tri[0].degree_hist.size() == 3);
    CHECK(tri[0].degree_hist[2] == 1.0);
    CHECK(tri[0].same_type_fraction == 1.0);
    CHECK(tri[1].empty);
    const auto hl = empirical_stats(graph({H, L}, {{0, 1}}));
    CHECK(hl[0].same_type_fraction == 0.0);
    CHECK(hl[1].same_type_fraction == 0.0);
  }

  TEST_CASE("edge probability saturates at one") {
    ModelParams p;
    p.f_h = p.f_l = {{2.0, 1.0}};
    for (std::uint64_t s = 0; s < 20; ++s) CHECK(sample_network(p, 2, RngSpec{s}).edge_count() == 1);
    p.f_h = p.f_l = {{0.0, 1.0}};
    CHECK(sample_network(p, 2, RngSpec{1}).edge_count() == 0);
  }

  TEST_CASE("three-node graphs follow the product-Bernoulli law") {
    // Every pair links independently with min{w λ_i λ_j / n, 1}; with mixed
    // types the probability depends on the realized labels.
    ModelParams p;
    p.q = 0.4;
    p.f_h = p.f_l = {{1.2, 1.0}};
    const double same = 1.44 / 3.0, cross = 0.4 * 1.44 / 3.0;
    constexpr int kSamples = 200000;
    // Graph pattern counts conditioned on the type labelling.
    std::map<std::pair<int, int>, int> seen;
    std::map<int, int> labelling;
    for (int s = 0; s < kSamples; ++s) {
      const NetworkInstance net = sample_network(p, 3, RngSpec{static_cast<std::uint64_t>(s)});
      int lab = 0, pat = 0;
      for (NodeId i = 0; i < 3; ++i) lab |= (net.type(i) == H ? 0 : 1) << i;
      for (const auto& [u, v] : net.edges()) pat |= 1 << (u + v - 1);  // pairs (0,1)->0, (0,2)->1, (1,2)->2
      ++seen[{lab, pat}];
      ++labelling[lab];
    }
    const std::array<std::pair<NodeId, NodeId>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (const auto& [lab, count] : labelling) {
      CHECK(std::abs(count / double(kSamples) - 0.125) < 4.0 * std::sqrt(0.125 * 0.875 / kSamples));
      for (int pat = 0; pat < 8; ++pat) {
        double prob = 1.0;
        for (int e = 0; e < 3; ++e) {
          const bool same_type = ((lab >> pairs[e].first) & 1) == ((lab >> pairs[e].second) & 1);
          const double pe = same_type ? same : cross;
          prob *= (pat >> e) & 1 ? pe : 1.0 - pe;
        }
        const double got = seen[{lab, pat}] / double(count);
        CHECK(std::abs(got - prob) < 4.0 * std::sqrt(prob * (1 - prob) / count) + 1e-12);
      }
    }
  }

  TEST_CASE("sampling is reproducible and thread-independent") {
    ModelParams p;
    p.q = 0.5;
    p.f_h = {{1.0, 0.5}, {2.0, 0.5}};
    p.f_l = {{1.5, 1.0}};
    const auto a = sample_network(p, 5000, RngSpec{42}, {5e7, 1});
    const auto b = sample_network(p, 5000, RngSpec{42}, {5e7, 4});
    CHECK(a.edges() == b.edges());
    CHECK(a.types() == b.types());
    CHECK(a.lambdas() == b.lambdas());
    CHECK(sample_network(p, 5000, RngSpec{43}).edges() != a.edges());
  }

  TEST_CASE("edge budget guard") {
    ModelParams p;
    p.f_h = p.f_l = {{30.0, 1.0}};
    CHECK_THROWS_AS(sample_network(p, 100000, RngSpec{1}, {1e6, 1}), ValidationError);
  }

  TEST_CASE("edge and node files round-trip") {
    ModelParams p;
    p.f_h = {{1.3, 1.0}};
    p.f_l = {{0.7, 0.5}, {2.2, 0.5}};
    const auto net = sample_network(p, 300, RngSpec{9});
    const auto dir = std::filesystem::temp_directory_path() / "pnet_net_roundtrip";
    std::filesystem::create_directories(dir);
    net.write_edge_list(dir / "e.txt");
    net.write_node_table(dir / "n.txt");
    const auto back = NetworkInstance::read(dir / "e.txt", dir / "n.txt");
    CHECK(back.edges() == net.edges());
    CHECK(back.types() == net.types());
    CHECK(back.lambdas() == net.lambdas());
    std::filesystem::remove_all(dir);
  }
}

TEST_SUITE("components") {
  TEST_CASE("labels follow size then smallest member") {
    const auto path = components(graph({H, H, H}, {{0, 1}, {1, 2}}));
    CHECK(path.sizes == std::vector<std::size_t>{3});
    const auto two = components(graph({H, H, H, H}, {{2, 3}, {0, 1}}));
    CHECK(two.sizes == std::vector<std::size_t>{2, 2});
    CHECK(two.in_largest(0));
    CHECK(two.in_largest(1));
    CHECK_FALSE(two.in_largest(2));
  }

  TEST_CASE("believer subnetwork") {
    const auto hlh = believer_components(graph({H, L, H}, {{0, 1}, {1, 2}}));
    CHECK(hlh.believers.sizes == std::vector<std::size_t>{1, 1});
    CHECK(hlh.believers.in_largest(0));
    CHECK(hlh.believers.component[1] == kNoComponent);

    const auto hhl = believer_components(graph({H, H, L}, {{0, 1}, {1, 2}}));
    CHECK(hhl.believers.sizes == std::vector<std::size_t>{2});
    CHECK(hhl.touches_giant == std::vector<char>{1, 1, 1});
  }
}
