#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/qlinalg.hpp"

namespace qnet {

enum class Topology { IQN, ITCN1, ITCN2 };

Topology parse_topology(std::string_view id); // "iqn" / "itcn1" / "itcn2"
std::string_view topology_id(Topology t);

inline constexpr int kNumNodes = 4;
inline constexpr std::array<char, 4> kNodeNames{'A', 'B', 'C', 'D'};

// Nonempty subset of {A,B,C,D}; bit 0 = A … bit 3 = D.
using NodeMask = unsigned;
inline constexpr NodeMask kAllNodes = 0xF;
std::string subset_name(NodeMask m); // "ABD" etc., canonical A<B<C<D

struct Particle {
  int id = 0;
  i64 dim = 2;
  int node = -1;   // 0..3, or -1 for environment
  int source = -1; // index into SystemLayout::sources, or -1 for environment
};

struct SourceDef {
  std::string label;      // "alpha" … "tau"
  std::vector<int> nodes; // ascending node indices, size 2 or 3
};

// Particle bookkeeping for one topology. Network particles come first in
// node-major order (within a node, by source label); environment ancillas are
// always appended after them.
struct SystemLayout {
  Topology topology = Topology::IQN;
  std::vector<Particle> particles;
  std::vector<SourceDef> sources;
  int network_particles = 0;

  std::vector<i64> dims() const;                    // all particles
  std::vector<i64> network_dims() const;            // network particles only
  std::vector<int> node_particles(int node) const;  // ascending ids
  std::vector<int> particles_of(NodeMask subset) const; // env excluded
  std::vector<int> source_particles(int source) const; // network side, ascending
  i64 node_dim(int node) const;
  int node_block_start(int node) const; // node blocks are contiguous
};

// Fixed incidence tables of the three figures, particle dimension d per site.
SystemLayout incidence(Topology t, i64 d = 2);

// All 2ⁿ−1 nonempty subsets of {0,…,n−1}, ordered by cardinality then
// lexicographically. 1 ≤ n ≤ 8.
std::vector<std::vector<int>> nonempty_subsets(int n);

// The 15 nonempty node masks in the same canonical order.
std::vector<NodeMask> nonempty_node_masks();

} // namespace qnet
