#include "qnet/report.hpp"

#include <stdexcept>

namespace qnet {

namespace {

// Stable per-suite seed derivation; suite ids are frozen so reports do not
// shift when the dispatch order changes.
enum SuiteId : std::uint64_t {
  kSeedI4Zero = 1,
  kSeedChannels = 2,
  kSeedBounds = 3,
  kSeedRanks = 4,
  kSeedAdditivity = 5,
  kSeedGme = 6,
  kSeedSsa = 7,
  kSeedIdentities = 8,
  kSeedStructural = 9,
};

} // namespace

std::vector<CertReport> run_checks(const VerifySpec& spec) {
  const Topology t = spec.topology;
  const std::uint64_t s = spec.seed;
  const int n = spec.trials;
  std::vector<CertReport> out;
  const bool all = spec.check == "all";
  bool known = all;
  auto want = [&](const char* name) {
    if (spec.check == name) known = true;
    return all || spec.check == name;
  };
  if (want("i4zero")) out.push_back(check_i4_zero(t, n, derive_seed(s, kSeedI4Zero)));
  if (want("channels")) out.push_back(check_channel_signs(n, derive_seed(s, kSeedChannels)));
  if (want("bounds")) out.push_back(check_three_channel_bounds(n, derive_seed(s, kSeedBounds)));
  if (want("ranks")) out.push_back(check_rank_table(t, n, derive_seed(s, kSeedRanks)));
  if (want("additivity")) out.push_back(check_additivity(t, n, derive_seed(s, kSeedAdditivity)));
  if (want("gme")) out.push_back(gme_witness_report(t));
  if (want("ssa")) {
    out.push_back(ssa_selftest(n, derive_seed(s, kSeedSsa)));
    out.push_back(check_structural(t, n, derive_seed(s, kSeedStructural)));
  }
  if (want("identities")) out.push_back(check_identities(n, derive_seed(s, kSeedIdentities)));
  if (!known) throw std::invalid_argument("unknown check name: " + spec.check);
  return out;
}

ordered_json suite_json(const CertReport& rep) {
  ordered_json j;
  j["suite"] = rep.suite;
  j["pass"] = rep.pass();
  ordered_json items = ordered_json::array();
  for (const auto& it : rep.items) {
    ordered_json ji;
    ji["name"] = it.name;
    ji["measured"] = it.measured;
    if (!it.informational) {
      ji["limit"] = it.limit;
      ji["pass"] = it.pass;
    } else {
      ji["informational"] = true;
    }
    if (!it.note.empty()) ji["note"] = it.note;
    items.push_back(std::move(ji));
  }
  j["items"] = std::move(items);
  return j;
}

ordered_json verify_report(const VerifySpec& spec, const std::vector<CertReport>& suites) {
  ordered_json j;
  j["tool"] = "qnet4";
  j["format"] = "report/1";
  j["command"] = "verify";
  j["config"] = {
      {"check", spec.check},
      {"topology", std::string(topology_id(spec.topology))},
      {"seed", spec.seed},
      {"trials", spec.trials},
  };
  bool all_pass = true;
  ordered_json arr = ordered_json::array();
  for (const auto& s : suites) {
    all_pass = all_pass && s.pass();
    arr.push_back(suite_json(s));
  }
  j["suites"] = std::move(arr);
  j["overall"] = all_pass ? "pass" : "fail";
  return j;
}

std::string verify_report_string(const VerifySpec& spec) {
  return verify_report(spec, run_checks(spec)).dump(2) + "\n";
}

} // namespace qnet
