#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnet/certify.hpp"

namespace qnet {

using ordered_json = nlohmann::ordered_json;

struct VerifySpec {
  std::string check = "all";
  Topology topology = Topology::IQN;
  std::uint64_t seed = 42;
  int trials = 50;
};

// All suites the given check name expands to, with per-suite seeds derived
// from the master seed. Throws std::invalid_argument on unknown names.
std::vector<CertReport> run_checks(const VerifySpec& spec);

ordered_json suite_json(const CertReport& rep);
ordered_json verify_report(const VerifySpec& spec, const std::vector<CertReport>& suites);

// The exact bytes `verify` prints; same spec ⇒ same bytes.
std::string verify_report_string(const VerifySpec& spec);

} // namespace qnet
