#include "qnet/channels.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace qnet {

double completeness_defect(const KrausChannel& ch) {
  ComplexMatrix acc(ch.dim, ch.dim);
  for (const auto& k : ch.ops) {
    if (!k.square() || k.rows != ch.dim) throw std::invalid_argument("Kraus operator shape mismatch");
    const ComplexMatrix t = matmul(adjoint(k), k);
    kernels::axpy(cplx(1.0, 0.0), t.a.data(), acc.a.data(), t.a.size());
  }
  return max_abs_diff(acc, ComplexMatrix::identity(ch.dim));
}

KrausChannel preset_depolarizing(i64 dim, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing strength must be in [0,1]");
  KrausChannel ch;
  ch.dim = dim;
  const double base = 1.0 - p + p / static_cast<double>(dim * dim);
  const double rest = p / static_cast<double>(dim * dim);
  for (i64 a = 0; a < dim; ++a) {
    for (i64 b = 0; b < dim; ++b) {
      const double w2 = (a == 0 && b == 0) ? base : rest;
      if (w2 <= 0.0) continue;
      const double w = std::sqrt(w2);
      ComplexMatrix k(dim, dim); // w · X^a Z^b, with X^a Z^b |j⟩ = ω^{bj} |j+a⟩
      for (i64 j = 0; j < dim; ++j) {
        k((j + a) % dim, j) =
            w * std::polar(1.0, 2.0 * M_PI * static_cast<double>(b * j) / static_cast<double>(dim));
      }
      ch.ops.push_back(std::move(k));
    }
  }
  return ch;
}

KrausChannel preset_amplitude_damping(double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("damping rate must be in [0,1]");
  KrausChannel ch;
  ch.dim = 2;
  ComplexMatrix k0(2, 2), k1(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  ch.ops = {std::move(k0), std::move(k1)};
  return ch;
}

KrausChannel tensor(const KrausChannel& a, const KrausChannel& b) {
  KrausChannel ch;
  ch.dim = a.dim * b.dim;
  for (const auto& ka : a.ops) {
    for (const auto& kb : b.ops) ch.ops.push_back(tensor(ka, kb));
  }
  return ch;
}

KrausChannel sample_channel(i64 dim, int kraus_count, Rng& rng) {
  if (kraus_count < 1) throw std::invalid_argument("kraus_count must be >= 1");
  const ComplexMatrix u = haar_unitary(dim * kraus_count, rng);
  KrausChannel ch;
  ch.dim = dim;
  for (int i = 0; i < kraus_count; ++i) {
    ComplexMatrix k(dim, dim);
    for (i64 r = 0; r < dim; ++r) {
      for (i64 c = 0; c < dim; ++c) k(r, c) = u(i * dim + r, c);
    }
    ch.ops.push_back(std::move(k));
  }
  return ch;
}

PairKind classify_pair(int node_a, int node_b) {
  if (node_a == node_b || node_a < 0 || node_b < 0 || node_a >= kNumNodes || node_b >= kNumNodes) {
    throw std::invalid_argument("classify_pair needs two distinct quadrangle nodes");
  }
  const SystemLayout lay = incidence(Topology::IQN);
  for (const auto& src : lay.sources) {
    bool has_a = false, has_b = false;
    for (int n : src.nodes) {
      has_a = has_a || (n == node_a);
      has_b = has_b || (n == node_b);
    }
    if (has_a && has_b) return PairKind::Adjacent;
  }
  return PairKind::NonAdjacent;
}

NetworkState apply(const ChannelPlacement& placement, const NetworkState& state) {
  SystemLayout lay = incidence(state.prov.topology,
                               state.layout.particles.at(0).dim);
  const auto dims = lay.network_dims();
  ComplexMatrix rho = state.network_density();
  if (rho.rows >= tol::kWarnMatrixDim) {
    std::cerr << "warning: applying channels on a " << rho.rows
              << "-dim density; this is the desk-scale ceiling and will be slow\n";
  }
  for (int node = 0; node < kNumNodes; ++node) {
    const auto& maybe = placement.node_channel[static_cast<std::size_t>(node)];
    if (!maybe) continue;
    const KrausChannel& ch = *maybe;
    if (ch.dim != lay.node_dim(node)) {
      throw std::invalid_argument("channel dimension does not match its node");
    }
    if (completeness_defect(ch) > 1e-9) {
      throw std::invalid_argument("channel violates trace preservation (Σ K†K ≠ I)");
    }
    const int start = lay.node_block_start(node);
    const int count = static_cast<int>(lay.node_particles(node).size());
    ComplexMatrix out(rho.rows, rho.cols);
    for (const auto& k : ch.ops) {
      const ComplexMatrix term = conjugate_by_block(rho, dims, start, count, k);
      kernels::axpy(cplx(1.0, 0.0), term.a.data(), out.a.data(), term.a.size());
    }
    rho = std::move(out);
  }
  if (std::abs(trace(rho).real() - 1.0) > 1e-9) {
    throw std::runtime_error("channel application failed to preserve the trace");
  }
  NetworkState out;
  out.layout = std::move(lay);
  out.pure_rep = false;
  out.rho = std::move(rho);
  out.prov = state.prov;
  out.prov.channels_applied = true;
  return out;
}

} // namespace qnet
