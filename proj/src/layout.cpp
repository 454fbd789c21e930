#include "qnet/layout.hpp"

#include <algorithm>
#include <stdexcept>

namespace qnet {

Topology parse_topology(std::string_view id) {
  if (id == "iqn") return Topology::IQN;
  if (id == "itcn1") return Topology::ITCN1;
  if (id == "itcn2") return Topology::ITCN2;
  throw std::invalid_argument("unknown topology id: " + std::string(id));
}

std::string_view topology_id(Topology t) {
  switch (t) {
    case Topology::IQN: return "iqn";
    case Topology::ITCN1: return "itcn1";
    case Topology::ITCN2: return "itcn2";
  }
  throw std::logic_error("bad topology enum");
}

std::string subset_name(NodeMask m) {
  std::string s;
  for (int n = 0; n < kNumNodes; ++n) {
    if (m & (1u << n)) s.push_back(kNodeNames[static_cast<std::size_t>(n)]);
  }
  return s;
}

std::vector<i64> SystemLayout::dims() const {
  std::vector<i64> d;
  d.reserve(particles.size());
  for (const auto& p : particles) d.push_back(p.dim);
  return d;
}

std::vector<i64> SystemLayout::network_dims() const {
  std::vector<i64> d;
  d.reserve(static_cast<std::size_t>(network_particles));
  for (int i = 0; i < network_particles; ++i) d.push_back(particles[static_cast<std::size_t>(i)].dim);
  return d;
}

std::vector<int> SystemLayout::node_particles(int node) const {
  std::vector<int> out;
  for (const auto& p : particles) {
    if (p.node == node) out.push_back(p.id);
  }
  return out;
}

std::vector<int> SystemLayout::particles_of(NodeMask subset) const {
  std::vector<int> out;
  for (const auto& p : particles) {
    if (p.node >= 0 && (subset & (1u << p.node))) out.push_back(p.id);
  }
  return out;
}

std::vector<int> SystemLayout::source_particles(int source) const {
  std::vector<int> out;
  for (const auto& p : particles) {
    if (p.source == source && p.node >= 0) out.push_back(p.id);
  }
  return out;
}

i64 SystemLayout::node_dim(int node) const {
  i64 d = 1;
  for (const auto& p : particles) {
    if (p.node == node) d *= p.dim;
  }
  return d;
}

int SystemLayout::node_block_start(int node) const {
  for (const auto& p : particles) {
    if (p.node == node) return p.id;
  }
  throw std::logic_error("node has no particles");
}

SystemLayout incidence(Topology t, i64 d) {
  if (d < 2 || d > 4) throw std::invalid_argument("particle dimension must be in [2,4]");
  SystemLayout lay;
  lay.topology = t;
  switch (t) {
    case Topology::IQN:
      lay.sources = {{"alpha", {0, 3}}, {"beta", {0, 1}}, {"gamma", {1, 2}}, {"delta", {2, 3}}};
      break;
    case Topology::ITCN1:
      lay.sources = {{"alpha", {0, 1}}, {"beta", {1, 3}},  {"gamma", {0, 3}},
                     {"delta", {0, 2}}, {"theta", {2, 3}}, {"tau", {1, 2}}};
      break;
    case Topology::ITCN2:
      lay.sources = {{"alpha", {0, 1, 3}}, {"beta", {0, 1, 2}}, {"gamma", {0, 2, 3}},
                     {"delta", {1, 2, 3}}};
      break;
  }
  int id = 0;
  for (int node = 0; node < kNumNodes; ++node) {
    for (int s = 0; s < static_cast<int>(lay.sources.size()); ++s) {
      const auto& nodes = lay.sources[static_cast<std::size_t>(s)].nodes;
      if (std::find(nodes.begin(), nodes.end(), node) != nodes.end()) {
        lay.particles.push_back({id++, d, node, s});
      }
    }
  }
  lay.network_particles = id;
  return lay;
}

std::vector<std::vector<int>> nonempty_subsets(int n) {
  if (n < 1 || n > 8) throw std::invalid_argument("subset enumeration supports 1..8 elements");
  std::vector<std::vector<int>> out;
  for (int size = 1; size <= n; ++size) {
    std::vector<int> pick(static_cast<std::size_t>(size));
    // lexicographic combinations of the given size
    for (int i = 0; i < size; ++i) pick[static_cast<std::size_t>(i)] = i;
    for (;;) {
      out.push_back(pick);
      int i = size - 1;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - size + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j) {
        pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  return out;
}

std::vector<NodeMask> nonempty_node_masks() {
  std::vector<NodeMask> out;
  for (const auto& subset : nonempty_subsets(kNumNodes)) {
    NodeMask m = 0;
    for (int n : subset) m |= (1u << n);
    out.push_back(m);
  }
  return out;
}

} // namespace qnet
