#include "qnet/netbuild.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace qnet {

namespace {

constexpr int kResampleLimit = 500;

// Source and single-party spectra are resampled until their nonzero part
// stays above kSpectralFloor relative to the top eigenvalue, which keeps
// multi-source rank products unambiguous at the 1e-8 relative threshold.
// Two-party marginals of mixed tripartite sources structurally carry one
// small eigenvalue, so those are only measured (min_rel_pair) and the rank
// harness conditions whole draws on the products instead.
constexpr double kSpectralFloor = 0.1;

double min_relative_nonzero(const Spectrum& s) {
  const double top = s.max_value();
  if (top <= 0.0) return 1.0;
  double m = 1.0;
  for (double v : s.values) {
    if (v > tol::kRankRel * top) m = std::min(m, v / top);
  }
  return m;
}

PureVector random_unit_vector(i64 dim, Rng& rng) {
  PureVector v(dim);
  for (auto& a : v.amps) a = rng.complex_gaussian();
  v.normalize();
  return v;
}

// Embed a vector over small local supports into the full d-per-party space.
PureVector embed_supports(const PureVector& small, std::span<const i64> small_dims, i64 d) {
  std::vector<i64> big_dims(small_dims.size(), d);
  i64 big = 1;
  for (i64 x : big_dims) big *= x;
  PureVector out(big);
  const int n = static_cast<int>(small_dims.size());
  std::vector<i64> digits(static_cast<std::size_t>(n), 0);
  for (i64 idx = 0; idx < small.dim; ++idx) {
    i64 rem = idx, big_idx = 0;
    for (int p = n - 1; p >= 0; --p) {
      digits[static_cast<std::size_t>(p)] = rem % small_dims[static_cast<std::size_t>(p)];
      rem /= small_dims[static_cast<std::size_t>(p)];
    }
    for (int p = 0; p < n; ++p) big_idx = big_idx * d + digits[static_cast<std::size_t>(p)];
    out.amps[static_cast<std::size_t>(big_idx)] = small.amps[static_cast<std::size_t>(idx)];
  }
  return out;
}

PureVector apply_local_haar(const PureVector& v, std::span<const i64> dims, Rng& rng) {
  PureVector out = v;
  for (int p = 0; p < static_cast<int>(dims.size()); ++p) {
    out = apply_block(out, dims, p, 1, haar_unitary(dims[static_cast<std::size_t>(p)], rng));
  }
  return out;
}

// Σ_i √p_i |ii⟩ with perturbed-uniform Schmidt probabilities (min ≥ 1/(2m)).
PureVector schmidt_pair(i64 d, int m, Rng& rng) {
  const auto p = rng.mixture_weights(m);
  PureVector v(d * d);
  for (int i = 0; i < m; ++i) {
    v.amps[static_cast<std::size_t>(i * d + i)] = std::sqrt(p[static_cast<std::size_t>(i)]);
  }
  return v;
}

void validate_spec(const SourceSpec& s) {
  if (s.arity != 2 && s.arity != 3) throw std::invalid_argument("source arity must be 2 or 3");
  if (s.d < 2 || s.d > 4) throw std::invalid_argument("local dimension must be in [2,4]");
  if (static_cast<int>(s.marginal_ranks.size()) != s.arity) {
    throw std::invalid_argument("marginal rank list must match the source arity");
  }
  for (int r : s.marginal_ranks) {
    if (r < 1 || r > s.d) throw std::invalid_argument("marginal rank outside [1,d]");
  }
  i64 cap = 1;
  for (int i = 0; i < s.arity; ++i) cap *= s.d;
  if (s.rank < 1 || s.rank > cap) throw std::invalid_argument("source rank outside [1, d^arity]");
  if (s.pure && s.rank != 1) throw std::invalid_argument("pure source must have rank 1");
  if (!s.pure && s.rank < 2) throw std::invalid_argument("mixed source must have rank >= 2");
  if (s.ghz_class) {
    if (s.arity != 3 || !s.pure) throw std::invalid_argument("ghz_class needs a pure tripartite source");
    for (int r : s.marginal_ranks) {
      if (r != 2) throw std::invalid_argument("ghz_class marginal ranks must all be 2");
    }
  }
  if (s.pure) {
    if (s.arity == 2) {
      if (s.marginal_ranks[0] != s.marginal_ranks[1]) {
        throw std::invalid_argument(
            "infeasible rank combination: bipartite pure state needs equal marginal ranks");
      }
    } else {
      const int ones = static_cast<int>(std::count(s.marginal_ranks.begin(), s.marginal_ranks.end(), 1));
      if (ones == 2) {
        throw std::invalid_argument("infeasible rank combination: tripartite pure state cannot have "
                                    "exactly one entangled party");
      }
      if (ones == 1) {
        std::vector<int> entangled;
        for (int i = 0; i < 3; ++i) {
          if (s.marginal_ranks[static_cast<std::size_t>(i)] > 1) entangled.push_back(i);
        }
        if (s.marginal_ranks[static_cast<std::size_t>(entangled[0])] !=
            s.marginal_ranks[static_cast<std::size_t>(entangled[1])]) {
          throw std::invalid_argument("infeasible rank combination: the entangled pair of a "
                                      "tripartite pure state needs equal marginal ranks");
        }
      }
      if (ones == 0) {
        for (int i = 0; i < 3; ++i) {
          const int ri = s.marginal_ranks[static_cast<std::size_t>(i)];
          const int rj = s.marginal_ranks[static_cast<std::size_t>((i + 1) % 3)];
          const int rk = s.marginal_ranks[static_cast<std::size_t>((i + 2) % 3)];
          if (ri > rj * rk) {
            throw std::invalid_argument("infeasible rank combination: tripartite marginal rank "
                                        "exceeds the product of the other two");
          }
        }
      }
    }
  } else {
    i64 prod = 1;
    for (int r : s.marginal_ranks) prod *= r;
    if (s.rank > prod) {
      throw std::invalid_argument("infeasible rank combination: state rank exceeds the product of "
                                  "marginal ranks");
    }
    for (int i = 0; i < s.arity; ++i) {
      i64 others = 1;
      for (int j = 0; j < s.arity; ++j) {
        if (j != i) others *= s.marginal_ranks[static_cast<std::size_t>(j)];
      }
      if (s.marginal_ranks[static_cast<std::size_t>(i)] > s.rank * others) {
        throw std::invalid_argument("infeasible rank combination: marginal rank unreachable at "
                                    "this state rank");
      }
    }
  }
}

void measure_sample(SourceSample& s) {
  const std::vector<i64> dims(static_cast<std::size_t>(s.spec.arity), s.spec.d);
  const Spectrum global = hermitian_spectrum(s.density);
  s.rank = numerical_rank(global);
  s.min_rel_full = min_relative_nonzero(global);
  s.party_ranks.clear();
  s.pair_ranks.clear();
  s.min_rel_party.clear();
  s.min_rel_pair.clear();
  for (int p = 0; p < s.spec.arity; ++p) {
    const int keep[] = {p};
    const Spectrum sp = hermitian_spectrum(partial_trace(s.density, dims, keep));
    s.party_ranks.push_back(numerical_rank(sp));
    s.min_rel_party.push_back(min_relative_nonzero(sp));
  }
  if (s.spec.arity == 3) {
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pr : pairs) {
      const Spectrum sp = hermitian_spectrum(partial_trace(s.density, dims, pr));
      s.pair_ranks.push_back(numerical_rank(sp));
      s.min_rel_pair.push_back(min_relative_nonzero(sp));
    }
  }
  s.env_dim = 1;
  s.env_particles = 0;
}

PureVector draw_pure_state(const SourceSpec& spec, Rng& rng) {
  const i64 d = spec.d;
  if (spec.arity == 2) {
    const int m = spec.marginal_ranks[0];
    std::vector<i64> dims{d, d};
    return apply_local_haar(schmidt_pair(d, m, rng), dims, rng);
  }
  const std::vector<i64> dims{d, d, d};
  const int ones = static_cast<int>(std::count(spec.marginal_ranks.begin(), spec.marginal_ranks.end(), 1));
  if (spec.ghz_class) {
    const auto p = rng.mixture_weights(2);
    PureVector v(d * d * d);
    v.amps[0] = std::sqrt(p[0]);
    v.amps[static_cast<std::size_t>((d * d + d + 1) * 1)] = std::sqrt(p[1]); // |111⟩
    return apply_local_haar(v, dims, rng);
  }
  if (ones == 3) {
    PureVector unit(1);
    unit.amps[0] = 1.0;
    return apply_local_haar(embed_supports(unit, std::vector<i64>{1, 1, 1}, d), dims, rng);
  }
  if (ones == 1) {
    // entangled pair on the two rank-m parties, product on the third
    int solo = 0;
    while (spec.marginal_ranks[static_cast<std::size_t>(solo)] != 1) ++solo;
    const int m = spec.marginal_ranks[static_cast<std::size_t>((solo + 1) % 3)];
    std::vector<i64> small_dims(3, 1);
    for (int p = 0; p < 3; ++p) {
      if (p != solo) small_dims[static_cast<std::size_t>(p)] = m;
    }
    PureVector small(m * m);
    const auto w = rng.mixture_weights(m);
    for (int i = 0; i < m; ++i) small.amps[static_cast<std::size_t>(i * m + i)] = std::sqrt(w[static_cast<std::size_t>(i)]);
    // small currently spans the two entangled parties; expand to 3 axes
    std::vector<i64> pair_dims;
    for (int p = 0; p < 3; ++p) {
      if (p != solo) pair_dims.push_back(m);
    }
    PureVector with_solo = small;
    std::vector<i64> asm_dims = pair_dims;
    asm_dims.push_back(1);
    // place the solo axis in position
    std::vector<int> perm(3);
    int src = 0;
    for (int p = 0; p < 3; ++p) perm[static_cast<std::size_t>(p)] = (p == solo) ? 2 : src++;
    with_solo = permute_particles(with_solo, asm_dims, perm);
    std::vector<i64> placed_dims(3);
    for (int p = 0; p < 3; ++p) placed_dims[static_cast<std::size_t>(p)] = asm_dims[static_cast<std::size_t>(perm[p])];
    return apply_local_haar(embed_supports(with_solo, placed_dims, d), dims, rng);
  }
  // all parties entangled: generic state on the target supports
  const std::vector<i64> small_dims{spec.marginal_ranks[0], spec.marginal_ranks[1], spec.marginal_ranks[2]};
  i64 small = 1;
  for (i64 x : small_dims) small *= x;
  return apply_local_haar(embed_supports(random_unit_vector(small, rng), small_dims, d), dims, rng);
}

ComplexMatrix draw_mixed_density(const SourceSpec& spec, Rng& rng) {
  const i64 d = spec.d;
  std::vector<i64> small_dims;
  for (int r : spec.marginal_ranks) small_dims.push_back(r);
  i64 small = 1;
  for (i64 x : small_dims) small *= x;
  // eigenvectors from a Haar frame on the support, eigenvalues the perturbed
  // uniform weights: the source spectrum is exactly rank `rank` and clear of
  // the tolerance band by construction
  const auto w = rng.mixture_weights(spec.rank);
  const ComplexMatrix frame = haar_unitary(small, rng);
  i64 big = 1;
  for (int i = 0; i < spec.arity; ++i) big *= d;
  ComplexMatrix rho(big, big);
  for (int k = 0; k < spec.rank; ++k) {
    PureVector col(small);
    for (i64 i = 0; i < small; ++i) col.amps[static_cast<std::size_t>(i)] = frame(i, k);
    const PureVector phi = embed_supports(col, small_dims, d);
    add_scaled(rho, outer(phi), w[static_cast<std::size_t>(k)]);
  }
  const std::vector<i64> dims(static_cast<std::size_t>(spec.arity), d);
  for (int p = 0; p < spec.arity; ++p) {
    rho = conjugate_by_block(rho, dims, p, 1, haar_unitary(d, rng));
  }
  return rho;
}

int env_particles_for(int rank, i64 d) {
  int k = 0;
  i64 cap = 1;
  while (cap < rank) {
    cap *= d;
    ++k;
  }
  return k;
}

void purify(SourceSample& s) {
  s.env_particles = env_particles_for(s.spec.rank, s.spec.d);
  s.env_dim = 1;
  for (int i = 0; i < s.env_particles; ++i) s.env_dim *= s.spec.d;
  if (s.env_dim == 1) return; // pure source purifies as itself; caller sets psi
  const EigenSystem eig = hermitian_eigensystem(s.density);
  const i64 sd = s.density.rows;
  PureVector psi(sd * s.env_dim);
  for (i64 k = 0; k < sd && k < s.env_dim; ++k) {
    const double lam = eig.values.values[static_cast<std::size_t>(k)];
    if (lam < tol::kEigFloor) continue;
    const double root = std::sqrt(lam);
    for (i64 i = 0; i < sd; ++i) {
      psi.amps[static_cast<std::size_t>(i * s.env_dim + k)] = root * eig.vectors(i, k);
    }
  }
  psi.normalize();
  // tracing the ancilla must reproduce the density
  std::vector<i64> dims{sd, s.env_dim};
  const int keep[] = {0};
  if (max_abs_diff(reduced_density_pure(psi, dims, keep), s.density) > 1e-10) {
    throw std::runtime_error("purification failed to reproduce the source density");
  }
  s.purification = std::move(psi);
}

} // namespace

SourceSpec SourceSpec::bell_class(i64 d) {
  return {2, d, true, 1, {static_cast<int>(d), static_cast<int>(d)}, false};
}
SourceSpec SourceSpec::product_pair(i64 d) { return {2, d, true, 1, {1, 1}, false}; }
SourceSpec SourceSpec::ghz(i64 d) { return {3, d, true, 1, {2, 2, 2}, true}; }
SourceSpec SourceSpec::generic_tripartite(i64 d) {
  const int r = static_cast<int>(d);
  return {3, d, true, 1, {r, r, r}, false};
}

ComplexMatrix haar_unitary(i64 dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("haar_unitary needs dim >= 1");
  ComplexMatrix g(dim, dim);
  for (auto& z : g.a) z = rng.complex_gaussian();
  // modified Gram-Schmidt on columns; positive-real normalization makes the
  // triangular factor's diagonal phases trivial
  ComplexMatrix q(dim, dim);
  std::vector<cplx> col(static_cast<std::size_t>(dim));
  for (i64 j = 0; j < dim; ++j) {
    for (i64 i = 0; i < dim; ++i) col[static_cast<std::size_t>(i)] = g(i, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (i64 k = 0; k < j; ++k) {
        cplx proj = 0.0;
        for (i64 i = 0; i < dim; ++i) proj += std::conj(q(i, k)) * col[static_cast<std::size_t>(i)];
        for (i64 i = 0; i < dim; ++i) col[static_cast<std::size_t>(i)] -= proj * q(i, k);
      }
    }
    const double nrm = std::sqrt(kernels::sum_abs2(col.data(), col.size()));
    if (nrm < 1e-12) throw std::runtime_error("degenerate Gaussian draw in haar_unitary");
    for (i64 i = 0; i < dim; ++i) q(i, j) = col[static_cast<std::size_t>(i)] / nrm;
  }
  return q;
}

SourceSample sample_source(const SourceSpec& spec, Rng& rng) {
  validate_spec(spec);
  int rank_misses = 0, floor_misses = 0;
  for (int attempt = 0; attempt < kResampleLimit; ++attempt) {
    SourceSample s;
    s.spec = spec;
    if (spec.pure) {
      PureVector psi = draw_pure_state(spec, rng);
      s.density = outer(psi);
      s.purification = std::move(psi);
    } else {
      s.density = draw_mixed_density(spec, rng);
    }
    measure_sample(s);
    if (s.rank != spec.rank || s.party_ranks != spec.marginal_ranks) {
      ++rank_misses;
      continue;
    }
    bool floors_ok = s.min_rel_full >= kSpectralFloor;
    for (double m : s.min_rel_party) floors_ok = floors_ok && m >= kSpectralFloor;
    if (!floors_ok) {
      ++floor_misses;
      continue;
    }
    purify(s);
    if (s.env_dim == 1 && !spec.pure) {
      throw std::logic_error("mixed source ended with no ancilla");
    }
    return s;
  }
  std::ostringstream os;
  os << "sample_source could not hit the requested ranks (arity " << spec.arity << ", rank "
     << spec.rank << ", marginals";
  for (int r : spec.marginal_ranks) os << " " << r;
  os << "; " << rank_misses << " rank misses, " << floor_misses << " floor misses)";
  throw std::runtime_error(os.str());
}

i64 NetworkState::network_dim() const {
  i64 d = 1;
  for (int i = 0; i < layout.network_particles; ++i) d *= layout.particles[static_cast<std::size_t>(i)].dim;
  return d;
}

ComplexMatrix NetworkState::network_density() const {
  if (!pure_rep) return rho;
  const auto dims = layout.dims();
  std::vector<int> keep(static_cast<std::size_t>(layout.network_particles));
  for (int i = 0; i < layout.network_particles; ++i) keep[static_cast<std::size_t>(i)] = i;
  return reduced_density_pure(psi, dims, keep);
}

ComplexMatrix densify(const NetworkState& state) { return state.network_density(); }

NetworkState build_network(Topology t, std::vector<SourceSample> sources,
                           std::vector<ComplexMatrix> unitaries) {
  if (sources.empty()) throw std::invalid_argument("no sources given");
  const i64 d = sources[0].spec.d;
  SystemLayout lay = incidence(t, d);
  if (sources.size() != lay.sources.size()) {
    throw std::invalid_argument("source count does not match the topology");
  }
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (sources[s].spec.d != d) throw std::invalid_argument("sources disagree on local dimension");
    if (sources[s].spec.arity != static_cast<int>(lay.sources[s].nodes.size())) {
      throw std::invalid_argument("source arity does not match the topology");
    }
  }
  if (unitaries.size() != kNumNodes) throw std::invalid_argument("need one unitary per node");
  for (int node = 0; node < kNumNodes; ++node) {
    const ComplexMatrix& u = unitaries[static_cast<std::size_t>(node)];
    if (u.rows == 0) continue;
    if (!u.square() || u.rows != lay.node_dim(node)) {
      throw std::invalid_argument("unitary dimension does not match its node (unitaries act only "
                                  "on their node's particles)");
    }
    if (max_abs_diff(matmul(adjoint(u), u), ComplexMatrix::identity(u.rows)) > 1e-8) {
      throw std::invalid_argument("node operator is not unitary");
    }
  }

  const int n_net = lay.network_particles;
  // assembly order: per source its particles (node order) then its env axis
  std::vector<i64> asm_dims;
  std::vector<int> asm_key; // network particle id, or n_net + source for env
  PureVector psi;
  bool first = true;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (int pid : lay.source_particles(static_cast<int>(s))) {
      asm_dims.push_back(d);
      asm_key.push_back(pid);
    }
    if (sources[s].env_dim > 1) {
      asm_dims.push_back(sources[s].env_dim);
      asm_key.push_back(n_net + static_cast<int>(s));
    }
    psi = first ? sources[s].purification : tensor(psi, sources[s].purification);
    first = false;
  }
  // target order: network particles ascending, then env axes in source order
  std::vector<int> perm;
  perm.reserve(asm_key.size());
  for (int pid = 0; pid < n_net; ++pid) {
    perm.push_back(static_cast<int>(std::find(asm_key.begin(), asm_key.end(), pid) - asm_key.begin()));
  }
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (sources[s].env_dim > 1) {
      perm.push_back(static_cast<int>(std::find(asm_key.begin(), asm_key.end(),
                                                n_net + static_cast<int>(s)) -
                                      asm_key.begin()));
    }
  }
  psi = permute_particles(psi, asm_dims, perm);

  // extend the layout with the environment ancillas
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (int k = 0; k < sources[s].env_particles; ++k) {
      lay.particles.push_back({static_cast<int>(lay.particles.size()), d, -1, static_cast<int>(s)});
    }
  }
  const auto ext_dims = lay.dims();
  for (int node = 0; node < kNumNodes; ++node) {
    const ComplexMatrix& u = unitaries[static_cast<std::size_t>(node)];
    if (u.rows == 0) continue;
    psi = apply_block(psi, ext_dims, lay.node_block_start(node),
                      static_cast<int>(lay.node_particles(node).size()), u);
  }
  if (std::abs(psi.norm2() - 1.0) > tol::kUnitNorm) {
    throw std::runtime_error("assembled network state lost normalization");
  }

  NetworkState state;
  state.layout = std::move(lay);
  state.pure_rep = true;
  state.psi = std::move(psi);
  state.prov.topology = t;
  state.prov.mixture = false;
  state.prov.branches.push_back({1.0, std::move(sources), std::move(unitaries)});
  return state;
}

NetworkState build_mixture(Topology t, std::vector<MixtureBranch> branches) {
  if (branches.empty()) throw std::invalid_argument("mixture needs at least one branch");
  double wsum = 0.0;
  for (const auto& b : branches) {
    if (b.weight <= 0.0) throw std::invalid_argument("mixture weights must be positive");
    wsum += b.weight;
  }
  if (std::abs(wsum - 1.0) > tol::kMixWeights) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
  const i64 d = branches[0].sources.at(0).spec.d;
  SystemLayout lay = incidence(t, d);
  const i64 dim = [&] {
    i64 x = 1;
    for (int i = 0; i < lay.network_particles; ++i) x *= d;
    return x;
  }();
  if (dim > tol::kMaxMatrixDim) {
    throw std::length_error("mixture density exceeds the 4096 desk-scale matrix cap");
  }
  if (dim >= tol::kWarnMatrixDim) {
    std::cerr << "warning: building a " << dim << "x" << dim
              << " mixture density; this is the desk-scale ceiling and will be slow\n";
  }
  ComplexMatrix rho(dim, dim);
  for (auto& b : branches) {
    const NetworkState branch_state = build_network(t, b.sources, b.unitaries);
    add_scaled(rho, branch_state.network_density(), b.weight);
  }
  NetworkState state;
  state.layout = std::move(lay);
  state.pure_rep = false;
  state.rho = std::move(rho);
  state.prov.topology = t;
  state.prov.mixture = true;
  state.prov.branches = std::move(branches);
  return state;
}

} // namespace qnet
