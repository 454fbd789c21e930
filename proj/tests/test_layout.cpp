#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "qnet/layout.hpp"

using namespace qnet;

namespace {

std::set<int> nodes_of_source(const SystemLayout& lay, const std::string& label) {
  for (const auto& s : lay.sources) {
    if (s.label == label) return {s.nodes.begin(), s.nodes.end()};
  }
  FAIL("no such source: ", label);
  return {};
}

} // namespace

TEST_CASE("topology id round trip") {
  for (auto t : {Topology::IQN, Topology::ITCN1, Topology::ITCN2}) {
    CHECK(parse_topology(topology_id(t)) == t);
  }
  CHECK_THROWS_AS(parse_topology("hexagon"), std::invalid_argument);
}

TEST_CASE("quadrangle incidence") {
  const SystemLayout lay = incidence(Topology::IQN, 2);
  CHECK(lay.sources.size() == 4);
  CHECK(lay.network_particles == 8);
  CHECK(nodes_of_source(lay, "alpha") == std::set<int>{0, 3});
  CHECK(nodes_of_source(lay, "beta") == std::set<int>{0, 1});
  CHECK(nodes_of_source(lay, "gamma") == std::set<int>{1, 2});
  CHECK(nodes_of_source(lay, "delta") == std::set<int>{2, 3});
  for (int node = 0; node < kNumNodes; ++node) {
    CHECK(lay.node_particles(node).size() == 2);
    CHECK(lay.node_dim(node) == 4);
  }
  // node A holds its alpha particle then its beta particle
  CHECK(lay.particles[0].node == 0);
  CHECK(lay.sources[lay.particles[0].source].label == "alpha");
  CHECK(lay.particles[1].node == 0);
  CHECK(lay.sources[lay.particles[1].source].label == "beta");
}

TEST_CASE("triangular cone incidences") {
  const SystemLayout t1 = incidence(Topology::ITCN1, 2);
  CHECK(t1.sources.size() == 6);
  CHECK(t1.network_particles == 12);
  CHECK(nodes_of_source(t1, "alpha") == std::set<int>{0, 1});
  CHECK(nodes_of_source(t1, "beta") == std::set<int>{1, 3});
  CHECK(nodes_of_source(t1, "gamma") == std::set<int>{0, 3});
  CHECK(nodes_of_source(t1, "delta") == std::set<int>{0, 2});
  CHECK(nodes_of_source(t1, "theta") == std::set<int>{2, 3});
  CHECK(nodes_of_source(t1, "tau") == std::set<int>{1, 2});
  // node A receives from alpha, gamma, delta
  std::set<std::string> a_sources;
  for (int pid : t1.node_particles(0)) {
    a_sources.insert(t1.sources[t1.particles[pid].source].label);
  }
  CHECK(a_sources == std::set<std::string>{"alpha", "gamma", "delta"});
  for (int node = 0; node < kNumNodes; ++node) CHECK(t1.node_particles(node).size() == 3);

  const SystemLayout t2 = incidence(Topology::ITCN2, 2);
  CHECK(t2.sources.size() == 4);
  CHECK(t2.network_particles == 12);
  CHECK(nodes_of_source(t2, "alpha") == std::set<int>{0, 1, 3});
  CHECK(nodes_of_source(t2, "beta") == std::set<int>{0, 1, 2});
  CHECK(nodes_of_source(t2, "gamma") == std::set<int>{0, 2, 3});
  CHECK(nodes_of_source(t2, "delta") == std::set<int>{1, 2, 3}); // shared by B, C, D
  for (int node = 0; node < kNumNodes; ++node) CHECK(t2.node_particles(node).size() == 3);
}

TEST_CASE("particles_of node subsets") {
  const SystemLayout iqn = incidence(Topology::IQN, 2);
  CHECK(iqn.particles_of(1u) == std::vector<int>{0, 1});
  CHECK(iqn.particles_of(kAllNodes).size() == 8);
  const SystemLayout t2 = incidence(Topology::ITCN2, 2);
  CHECK(t2.particles_of(0b0011u).size() == 6);

  // distributes over disjoint unions
  for (NodeMask m1 = 1; m1 < 16; ++m1) {
    for (NodeMask m2 = 1; m2 < 16; ++m2) {
      if (m1 & m2) continue;
      auto u = iqn.particles_of(m1);
      const auto v = iqn.particles_of(m2);
      u.insert(u.end(), v.begin(), v.end());
      std::sort(u.begin(), u.end());
      CHECK(u == iqn.particles_of(m1 | m2));
    }
  }
}

TEST_CASE("environment particles are excluded from node subsets") {
  SystemLayout lay = incidence(Topology::IQN, 2);
  lay.particles.push_back({8, 2, -1, 0});
  lay.particles.push_back({9, 4, -1, 2});
  CHECK(lay.particles_of(kAllNodes).size() == 8);
  CHECK(lay.dims().size() == 10);
  CHECK(lay.network_dims().size() == 8);
}

TEST_CASE("nonempty subset enumeration") {
  const auto s2 = nonempty_subsets(2);
  REQUIRE(s2.size() == 3);
  CHECK(s2[0] == std::vector<int>{0});
  CHECK(s2[1] == std::vector<int>{1});
  CHECK(s2[2] == std::vector<int>{0, 1});

  CHECK(nonempty_subsets(4).size() == 15);

  const auto s3 = nonempty_subsets(3);
  REQUIRE(s3.size() == 7);
  int by_size[4] = {0, 0, 0, 0};
  for (const auto& s : s3) ++by_size[s.size()];
  CHECK(by_size[1] == 3);
  CHECK(by_size[2] == 3);
  CHECK(by_size[3] == 1);

  CHECK_THROWS_AS(nonempty_subsets(0), std::invalid_argument);
  CHECK_THROWS_AS(nonempty_subsets(9), std::invalid_argument);

  const auto masks = nonempty_node_masks();
  CHECK(masks.size() == 15);
  CHECK(masks.front() == 1u);
  CHECK(masks.back() == kAllNodes);
}

TEST_CASE("subset names") {
  CHECK(subset_name(1) == "A");
  CHECK(subset_name(0b1010) == "BD");
  CHECK(subset_name(kAllNodes) == "ABCD");
}
