#include "qnet/infotheory.hpp"

#include <cmath>
#include <stdexcept>

namespace qnet {

std::vector<int> SystemView::particles_of(NodeMask subset) const {
  std::vector<int> out;
  for (int p = 0; p < static_cast<int>(dims.size()); ++p) {
    const int node = node_of[static_cast<std::size_t>(p)];
    if (node >= 0 && (subset & (1u << node))) out.push_back(p);
  }
  return out;
}

SystemView view_of(const NetworkState& state) {
  SystemView v;
  if (state.pure_rep) {
    v.psi = &state.psi;
    v.dims = state.layout.dims();
    for (const auto& p : state.layout.particles) v.node_of.push_back(p.node);
  } else {
    v.rho = &state.rho;
    v.dims = state.layout.network_dims();
    for (int i = 0; i < state.layout.network_particles; ++i) {
      v.node_of.push_back(state.layout.particles[static_cast<std::size_t>(i)].node);
    }
  }
  return v;
}

double entropy_from_spectrum(const Spectrum& s) {
  if (std::abs(s.sum() - 1.0) > tol::kTraceOneLoose) {
    throw std::invalid_argument("spectrum does not sum to 1 (not a density matrix)");
  }
  double bits = 0.0;
  for (double lam : s.values) {
    if (lam < tol::kEigNegative) {
      throw std::invalid_argument("density matrix has a significantly negative eigenvalue");
    }
    if (lam <= tol::kEigFloor) continue; // 0·log 0 = 0
    bits -= lam * std::log2(lam);
  }
  return bits;
}

double entropy_bits(const ComplexMatrix& rho) {
  if (std::abs(trace(rho).real() - 1.0) > tol::kTraceOneLoose) {
    throw std::invalid_argument("entropy_bits: trace deviates from 1 beyond 1e-8");
  }
  return entropy_from_spectrum(hermitian_spectrum(rho));
}

Spectrum subset_spectrum(const SystemView& view, NodeMask subset) {
  const auto keep = view.particles_of(subset);
  if (keep.empty()) throw std::invalid_argument("empty node subset");
  if (view.psi) return reduced_spectrum_pure(*view.psi, view.dims, keep);
  return hermitian_spectrum(partial_trace(*view.rho, view.dims, keep));
}

ComplexMatrix reduced_density(const SystemView& view, NodeMask subset) {
  const auto keep = view.particles_of(subset);
  if (keep.empty()) throw std::invalid_argument("empty node subset");
  if (view.psi) return reduced_density_pure(*view.psi, view.dims, keep);
  return partial_trace(*view.rho, view.dims, keep);
}

ComplexMatrix reduced_density(const NetworkState& state, NodeMask subset) {
  const SystemView v = view_of(state);
  return reduced_density(v, subset);
}

EntropyTable::EntropyTable(const SystemView& view) : view_(&view) {}

double EntropyTable::operator()(NodeMask subset) {
  if (subset == 0 || subset >= (1u << view_->num_nodes)) {
    throw std::invalid_argument("node mask out of range");
  }
  if (!have_[subset]) {
    s_[subset] = entropy_from_spectrum(subset_spectrum(*view_, subset));
    have_[subset] = true;
  }
  return s_[subset];
}

double mutual_information(EntropyTable& table, std::span<const NodeMask> parts) {
  const int n = static_cast<int>(parts.size());
  if (n < 2) throw std::invalid_argument("mutual information needs at least two parts");
  NodeMask seen = 0;
  for (NodeMask p : parts) {
    if (p == 0) throw std::invalid_argument("empty part");
    if (seen & p) throw std::invalid_argument("overlapping parts");
    seen |= p;
  }
  double value = 0.0;
  for (unsigned pick = 1; pick < (1u << n); ++pick) {
    NodeMask joint = 0;
    for (int i = 0; i < n; ++i) {
      if (pick & (1u << i)) joint |= parts[static_cast<std::size_t>(i)];
    }
    const int card = __builtin_popcount(pick);
    value += ((card - 1) % 2 == 0 ? 1.0 : -1.0) * table(joint);
  }
  return value;
}

MutualInfoValue mutual_information_value(EntropyTable& table, std::span<const NodeMask> parts) {
  MutualInfoValue v;
  v.n = static_cast<int>(parts.size());
  v.bits = mutual_information(table, parts);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) v.parts += ':';
    v.parts += subset_name(parts[i]);
  }
  return v;
}

double i2(EntropyTable& table, NodeMask x, NodeMask y) {
  const NodeMask parts[] = {x, y};
  return mutual_information(table, parts);
}

double i3(EntropyTable& table, NodeMask x, NodeMask y, NodeMask z) {
  const NodeMask parts[] = {x, y, z};
  return mutual_information(table, parts);
}

double i4(EntropyTable& table) {
  const NodeMask parts[] = {1u, 2u, 4u, 8u};
  return mutual_information(table, parts);
}

double i4_via_recursion(EntropyTable& table, NodeMask t, NodeMask x, NodeMask y, NodeMask z) {
  return i3(table, t, x, y) + i3(table, t, x, z) - i3(table, t, x, y | z);
}

double i4_in_terms_of_i2(EntropyTable& table) {
  const NodeMask a = 1, b = 2, c = 4, d = 8;
  return i2(table, a | b | c, d) + i2(table, a, d) + i2(table, b, d) + i2(table, c, d) -
         i2(table, a | b, d) - i2(table, a | c, d) - i2(table, b | c, d);
}

double structural_entropy(const NetworkState& state, NodeMask subset) {
  if (state.prov.mixture) {
    throw std::invalid_argument("structural entropy is undefined for classical mixtures");
  }
  if (state.prov.channels_applied) {
    throw std::invalid_argument("structural entropy is undefined after local channels");
  }
  if (subset == 0 || subset > kAllNodes) throw std::invalid_argument("bad node subset");
  const auto& sources = state.prov.branches.at(0).sources;
  const auto& defs = state.layout.sources;
  double bits = 0.0;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& nodes = defs[s].nodes;
    std::vector<int> inside;
    for (int party = 0; party < static_cast<int>(nodes.size()); ++party) {
      if (subset & (1u << nodes[static_cast<std::size_t>(party)])) inside.push_back(party);
    }
    if (inside.empty()) continue;
    const ComplexMatrix& rho_s = sources[s].density;
    if (inside.size() == nodes.size()) {
      bits += entropy_bits(rho_s);
      continue;
    }
    const std::vector<i64> sdims(static_cast<std::size_t>(sources[s].spec.arity), sources[s].spec.d);
    bits += entropy_bits(partial_trace(rho_s, sdims, inside));
  }
  return bits;
}

MarginalReport marginal_report(const SystemView& view, double rank_tol) {
  MarginalReport rep;
  for (NodeMask m : nonempty_node_masks()) {
    const Spectrum s = subset_spectrum(view, m);
    rep.entropy_bits[m] = entropy_from_spectrum(s);
    rep.rank[m] = numerical_rank(s, rank_tol);
  }
  rep.global_entropy = rep.entropy_bits[kAllNodes];
  rep.global_rank = rep.rank[kAllNodes];
  return rep;
}

} // namespace qnet
