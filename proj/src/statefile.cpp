#include "qnet/statefile.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qnet {

namespace {

std::string node_label(int node) {
  if (node < 0) return "env";
  return std::string(1, kNodeNames[static_cast<std::size_t>(node)]);
}

int parse_node(const std::string& s) {
  if (s == "env") return -1;
  if (s.size() == 1) {
    for (int n = 0; n < kNumNodes; ++n) {
      if (s[0] == kNodeNames[static_cast<std::size_t>(n)]) return n;
    }
  }
  throw StateIoError("bad node label: " + s);
}

std::string amp_line(cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a %a", z.real(), z.imag());
  return buf;
}

cplx parse_amp(const std::string& line) {
  const char* s = line.c_str();
  char* end = nullptr;
  const double re = std::strtod(s, &end);
  if (end == s) throw StateIoError("bad amplitude line: " + line);
  s = end;
  const double im = std::strtod(s, &end);
  if (end == s) throw StateIoError("bad amplitude line: " + line);
  return {re, im};
}

} // namespace

SystemView StateFile::view() const {
  SystemView v;
  if (pure) {
    v.psi = &psi;
  } else {
    v.rho = &rho;
  }
  for (const auto& p : particles) {
    v.dims.push_back(p.dim);
    v.node_of.push_back(p.node);
  }
  return v;
}

void save_state(const std::string& path, const NetworkState& state) {
  StateFile f;
  f.topology = std::string(topology_id(state.prov.topology));
  f.pure = state.pure_rep;
  if (state.pure_rep) {
    f.particles = state.layout.particles;
    f.psi = state.psi;
  } else {
    f.particles.assign(state.layout.particles.begin(),
                       state.layout.particles.begin() + state.layout.network_particles);
    f.rho = state.rho;
  }
  // source labels for the particle table come from the layout
  save_state(path, f);
}

void save_state(const std::string& path, const StateFile& file) {
  std::ofstream out(path);
  if (!out) throw StateIoError("cannot open for writing: " + path);
  out << "format=qnet4/1\n";
  out << "topology=" << file.topology << "\n";
  out << "rep=" << (file.pure ? "pure" : "density") << "\n";
  out << "particles=";
  SystemLayout ref;
  bool have_ref = file.topology != "custom";
  if (have_ref) {
    try {
      ref = incidence(parse_topology(file.topology), file.particles.at(0).dim);
    } catch (const std::exception&) {
      have_ref = false;
    }
  }
  for (std::size_t i = 0; i < file.particles.size(); ++i) {
    const auto& p = file.particles[i];
    if (i) out << ",";
    std::string source = "env";
    if (p.source >= 0 && have_ref && p.source < static_cast<int>(ref.sources.size())) {
      source = ref.sources[static_cast<std::size_t>(p.source)].label;
    } else if (p.source >= 0) {
      source = "s" + std::to_string(p.source);
    }
    out << p.id << ":" << p.dim << ":" << node_label(p.node) << ":" << source;
  }
  out << "\n";
  if (file.pure) {
    for (const cplx& z : file.psi.amps) out << amp_line(z) << "\n";
  } else {
    for (const cplx& z : file.rho.a) out << amp_line(z) << "\n";
  }
  if (!out) throw StateIoError("write failed: " + path);
}

StateFile load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StateIoError("cannot open: " + path);
  StateFile f;
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) throw StateIoError(std::string("truncated header: missing ") + what);
  };
  next_line("format");
  if (line != "format=qnet4/1") throw StateIoError("unsupported format line: " + line);
  next_line("topology");
  if (line.rfind("topology=", 0) != 0) throw StateIoError("expected topology=, got: " + line);
  f.topology = line.substr(9);
  next_line("rep");
  if (line == "rep=pure") {
    f.pure = true;
  } else if (line == "rep=density") {
    f.pure = false;
  } else {
    throw StateIoError("expected rep=pure|density, got: " + line);
  }
  next_line("particles");
  if (line.rfind("particles=", 0) != 0) throw StateIoError("expected particles=, got: " + line);
  {
    std::stringstream ss(line.substr(10));
    std::string item;
    int expect_id = 0;
    while (std::getline(ss, item, ',')) {
      std::stringstream ps(item);
      std::string id_s, dim_s, node_s, source_s;
      if (!std::getline(ps, id_s, ':') || !std::getline(ps, dim_s, ':') ||
          !std::getline(ps, node_s, ':') || !std::getline(ps, source_s)) {
        throw StateIoError("bad particle entry: " + item);
      }
      Particle p;
      p.id = std::stoi(id_s);
      p.dim = std::stoll(dim_s);
      p.node = parse_node(node_s);
      p.source = -1; // labels are provenance only on load
      if (p.id != expect_id++) throw StateIoError("particle ids must be consecutive from 0");
      if (p.dim < 2) throw StateIoError("particle dimension must be >= 2");
      f.particles.push_back(p);
    }
  }
  if (f.particles.empty()) throw StateIoError("no particles declared");
  i64 dim = 1;
  for (const auto& p : f.particles) dim *= p.dim;
  const i64 count = f.pure ? dim : dim * dim;
  if (f.pure && dim > tol::kMaxVectorDim) throw StateIoError("state exceeds the vector cap");
  if (!f.pure && dim > tol::kMaxMatrixDim) throw StateIoError("state exceeds the matrix cap");
  std::vector<cplx> amps;
  amps.reserve(static_cast<std::size_t>(count));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    amps.push_back(parse_amp(line));
  }
  if (static_cast<i64>(amps.size()) != count) {
    throw StateIoError("amplitude count " + std::to_string(amps.size()) + " does not match header (" +
                       std::to_string(count) + ")");
  }
  if (f.pure) {
    f.psi.dim = dim;
    f.psi.amps = std::move(amps);
    if (std::abs(f.psi.norm2() - 1.0) > tol::kTraceOneLoose) {
      throw StateIoError("pure state is not normalized");
    }
  } else {
    f.rho.rows = f.rho.cols = dim;
    f.rho.a = std::move(amps);
    if (std::abs(trace(f.rho).real() - 1.0) > tol::kTraceOneLoose) {
      throw StateIoError("density matrix trace deviates from 1");
    }
    if (hermiticity_defect(f.rho) > 1e-8) {
      throw StateIoError("density matrix is not hermitian");
    }
  }
  return f;
}

} // namespace qnet
