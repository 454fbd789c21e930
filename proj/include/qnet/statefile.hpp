#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qnet/infotheory.hpp"
#include "qnet/layout.hpp"
#include "qnet/netbuild.hpp"

namespace qnet {

struct StateIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// On-disk state: text header (format, topology hint, representation,
// particle table) followed by one amplitude per line as two hex floats.
struct StateFile {
  std::string topology = "custom";
  bool pure = true;
  std::vector<Particle> particles;
  PureVector psi;
  ComplexMatrix rho;

  SystemView view() const;
};

void save_state(const std::string& path, const NetworkState& state);
void save_state(const std::string& path, const StateFile& file);
StateFile load_state(const std::string& path);

} // namespace qnet
