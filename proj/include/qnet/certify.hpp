#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qnet/channels.hpp"
#include "qnet/infotheory.hpp"
#include "qnet/layout.hpp"
#include "qnet/netbuild.hpp"
#include "qnet/qlinalg.hpp"
#include "qnet/rng.hpp"

namespace qnet {

// Every check reduces to "violation magnitude ≤ limit"; slack = limit − measured.
struct CheckItem {
  std::string name;
  double measured = 0.0;
  double limit = 0.0;
  bool pass = true;
  bool informational = false; // recorded but never fails the suite
  std::string note;
};

struct CertReport {
  std::string suite;
  std::vector<CheckItem> items;

  void add(std::string name, double measured, double limit, std::string note = "");
  void add_info(std::string name, double measured, std::string note = "");
  bool pass() const;
};

// log₂ of the trace norm of the partial transpose over `side`.
double log_negativity(const ComplexMatrix& rho, std::span<const i64> dims,
                      std::span<const int> side);
// Pure-state cut: 2 log₂ Σ√λ over the Schmidt probabilities of the cut.
double log_negativity_pure(const PureVector& psi, std::span<const i64> dims,
                           std::span<const int> side);

enum class SourcePolicy { PureGeneric, PurifiedMixed, GhzClass, Blend };

NetworkState random_network_state(Topology t, SourcePolicy policy, Rng& rng);

// Certification checks. Each derives its per-trial randomness from `seed`
// with the counter-based split, so reports are reproducible bit for bit.
CertReport check_i4_zero(Topology t, int trials, std::uint64_t seed);
CertReport check_channel_signs(int trials, std::uint64_t seed);
CertReport check_three_channel_bounds(int trials, std::uint64_t seed);

struct RankTable {
  std::array<long, 16> expected{}; // by node mask; [0] unused
  std::array<long, 16> observed{};
  std::string source_ranks; // the integers the products were built from
  bool match() const;
};

RankTable expected_rank_table(Topology t, const std::vector<SourceSample>& sources);
CertReport check_rank_table(Topology t, int draws, std::uint64_t seed);

CertReport check_additivity(Topology t, int trials, std::uint64_t seed);

// True iff all 7 bipartitions of a 4-qubit pure state carry entropy > 1e-6 bits.
bool gme_check(const PureVector& psi);

// Exhausts the feasible per-party marginal-rank profiles of pure sources and
// reports whether any assignment satisfies {node rank products = 2} together
// with {every bipartition crossed with rank ≥ 2}. UNSAT certifies exclusion.
bool gme_witness_unsat(Topology t);
long gme_witness_assignment_count(Topology t);
CertReport gme_witness_report(Topology t);

CertReport ssa_selftest(int trials, std::uint64_t seed);
CertReport check_identities(int trials, std::uint64_t seed);
CertReport check_structural(Topology t, int trials, std::uint64_t seed);

} // namespace qnet
