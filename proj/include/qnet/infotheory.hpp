#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "qnet/layout.hpp"
#include "qnet/netbuild.hpp"
#include "qnet/qlinalg.hpp"

namespace qnet {

// A state plus its particle bookkeeping, decoupled from how it was prepared
// (network builders, loaded files, and ad-hoc test states all produce one).
// Pure representations span every particle including environment ancillas;
// density representations span exactly the listed particles.
struct SystemView {
  const PureVector* psi = nullptr;
  const ComplexMatrix* rho = nullptr;
  std::vector<i64> dims;
  std::vector<int> node_of; // per particle; -1 = environment
  int num_nodes = kNumNodes;

  std::vector<int> particles_of(NodeMask subset) const;
};

SystemView view_of(const NetworkState& state);

// −Σ λ log₂ λ with the eigenvalue floor policy: λ ≤ 1e-12 is exact zero,
// λ < −1e-9 means a broken density matrix upstream.
double entropy_from_spectrum(const Spectrum& s);
double entropy_bits(const ComplexMatrix& rho);

// Spectrum / density of the marginal on a node subset; environment particles
// are always traced out.
Spectrum subset_spectrum(const SystemView& view, NodeMask subset);
ComplexMatrix reduced_density(const SystemView& view, NodeMask subset);
ComplexMatrix reduced_density(const NetworkState& state, NodeMask subset);

// Cached subset entropies (bits) for one state.
class EntropyTable {
 public:
  explicit EntropyTable(const SystemView& view);
  double operator()(NodeMask subset);
  const SystemView& view() const { return *view_; }

 private:
  const SystemView* view_;
  std::array<double, 256> s_{};
  std::array<bool, 256> have_{};
};

struct MutualInfoValue {
  int n = 0;
  double bits = 0.0;
  std::string parts; // "A:B:CD" style label
};

// Inclusion–exclusion mutual information over disjoint (possibly composite)
// parts: Σ over nonempty sub-collections T, sign (−1)^{|T|−1}, of S(∪T).
double mutual_information(EntropyTable& table, std::span<const NodeMask> parts);
MutualInfoValue mutual_information_value(EntropyTable& table, std::span<const NodeMask> parts);

double i2(EntropyTable& table, NodeMask x, NodeMask y);
double i3(EntropyTable& table, NodeMask x, NodeMask y, NodeMask z);
double i4(EntropyTable& table); // I4(A:B:C:D)

// I4 = I3(T:X:Y) + I3(T:X:Z) − I3(T:X:YZ).
double i4_via_recursion(EntropyTable& table, NodeMask t, NodeMask x, NodeMask y, NodeMask z);

// I4 = I2(ABC:D) + I2(A:D) + I2(B:D) + I2(C:D) − I2(AB:D) − I2(AC:D) − I2(BC:D).
double i4_in_terms_of_i2(EntropyTable& table);

// Formula-route entropy of a node subset: the sum over sources of the entropy
// of each source's marginal on its particles inside the subset. Valid for any
// node unitaries; rejects classical mixtures and post-channel states.
double structural_entropy(const NetworkState& state, NodeMask subset);

struct MarginalReport {
  std::array<double, 16> entropy_bits{}; // by mask, [0] unused
  std::array<int, 16> rank{};
  double global_entropy = 0.0; // == entry for ABCD
  int global_rank = 1;
};

MarginalReport marginal_report(const SystemView& view, double rank_tol = tol::kRankRel);

} // namespace qnet
