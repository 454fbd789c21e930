#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qnet/netbuild.hpp"
#include "qnet/qlinalg.hpp"
#include "qnet/rng.hpp"

namespace qnet {

// A CPTP map as Kraus operators on one node's full space.
struct KrausChannel {
  i64 dim = 0;
  std::vector<ComplexMatrix> ops;
};

double completeness_defect(const KrausChannel& ch); // max |Σ K†K − I|

// ρ → (1−p) ρ + p I/dim via the Weyl operator set.
KrausChannel preset_depolarizing(i64 dim, double p);

// Qubit amplitude damping; use tensor() to lift it to multi-qubit nodes.
KrausChannel preset_amplitude_damping(double gamma);

KrausChannel tensor(const KrausChannel& a, const KrausChannel& b);

// Random channel from a Haar isometry split into column blocks.
KrausChannel sample_channel(i64 dim, int kraus_count, Rng& rng);

enum class PairKind { Adjacent, NonAdjacent };

// Quadrangle classification: adjacent iff the two nodes share a source.
PairKind classify_pair(int node_a, int node_b);

struct ChannelPlacement {
  std::array<std::optional<KrausChannel>, kNumNodes> node_channel;
};

// Densify the state onto its network particles and apply each node's channel.
NetworkState apply(const ChannelPlacement& placement, const NetworkState& state);

} // namespace qnet
