#pragma once

#include <optional>
#include <vector>

#include "qnet/layout.hpp"
#include "qnet/qlinalg.hpp"
#include "qnet/rng.hpp"

namespace qnet {

// What a source device should emit. Pure states have rank 1 and equal
// marginal ranks (Schmidt); mixed states have rank ≥ 2.
struct SourceSpec {
  int arity = 2;
  i64 d = 2;
  bool pure = true;
  int rank = 1;
  std::vector<int> marginal_ranks; // per party, each in [1, d]
  bool ghz_class = false;          // tripartite family with separable two-party marginals

  static SourceSpec bell_class(i64 d = 2);        // bipartite pure, full Schmidt rank
  static SourceSpec product_pair(i64 d = 2);      // bipartite pure product
  static SourceSpec ghz(i64 d = 2);               // tripartite GHZ class
  static SourceSpec generic_tripartite(i64 d = 2);
};

// One concrete draw: density on the source particles, its purification
// (source particles then environment axis), and the measured rank data used
// by the rank tables.
struct SourceSample {
  SourceSpec spec;
  ComplexMatrix density;          // dim d^arity
  PureVector purification;        // dim d^arity · env_dim; env axis last
  i64 env_dim = 1;                // d^⌈log_d rank⌉; 1 → no ancilla
  int env_particles = 0;          // ⌈log_d rank⌉ ancillas of dimension d
  int rank = 1;                   // measured
  std::vector<int> party_ranks;   // measured, per party
  std::vector<int> pair_ranks;    // arity 3: pairs {0,1},{0,2},{1,2}
  // smallest nonzero eigenvalue relative to the largest, per spectrum; rank
  // harnesses use these to keep multi-source products clear of the tolerance
  double min_rel_full = 1.0;
  std::vector<double> min_rel_party;
  std::vector<double> min_rel_pair;
};

struct MixtureBranch {
  double weight = 1.0;
  std::vector<SourceSample> sources;
  std::vector<ComplexMatrix> unitaries; // per node; rows==0 → identity
};

struct Provenance {
  Topology topology = Topology::IQN;
  bool mixture = false;
  bool channels_applied = false;
  std::vector<MixtureBranch> branches; // exactly one unless mixture
};

// A prepared network state. Pure representation spans layout.particles
// (network + environment); density representation spans the network
// particles only.
struct NetworkState {
  SystemLayout layout;
  bool pure_rep = true;
  PureVector psi;
  ComplexMatrix rho;
  Provenance prov;

  i64 network_dim() const;
  ComplexMatrix network_density() const; // env traced out of the pure rep
};

// Haar-distributed unitary via orthonormalization of a complex Gaussian
// matrix with the triangular factor's diagonal phases normalized.
ComplexMatrix haar_unitary(i64 dim, Rng& rng);

SourceSample sample_source(const SourceSpec& spec, Rng& rng);

// Global state per the topology: permute the source tensor product into
// node-major order and apply the per-node unitaries (rows==0 → identity).
NetworkState build_network(Topology t, std::vector<SourceSample> sources,
                           std::vector<ComplexMatrix> unitaries);

NetworkState build_mixture(Topology t, std::vector<MixtureBranch> branches);

// Densify any state onto its network particles.
ComplexMatrix densify(const NetworkState& state);

} // namespace qnet
