#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qnet/certify.hpp"
#include "qnet/rng.hpp"

using namespace qnet;

namespace {

PureVector bell_pair() {
  PureVector v(4);
  v.amps[0] = v.amps[3] = 1.0 / std::sqrt(2.0);
  return v;
}

SourceSample exact_bell() {
  SourceSample s;
  s.spec = SourceSpec::bell_class(2);
  PureVector bell = bell_pair();
  s.density = outer(bell);
  s.purification = std::move(bell);
  s.rank = 1;
  s.party_ranks = {2, 2};
  return s;
}

SourceSample exact_ghz3() {
  PureVector ghz(8);
  ghz.amps[0] = ghz.amps[7] = 1.0 / std::sqrt(2.0);
  SourceSample s;
  s.spec = SourceSpec::ghz(2);
  s.density = outer(ghz);
  s.purification = std::move(ghz);
  s.rank = 1;
  s.party_ranks = {2, 2, 2};
  s.pair_ranks = {2, 2, 2};
  return s;
}

// Independent replication of the quadrangle witness: explicit node products
// and explicit cut products over the four binary source assignments.
bool iqn_witness_unsat_oracle() {
  for (int bits = 0; bits < 16; ++bits) {
    const int a = (bits & 1) ? 2 : 1; // alpha {A,D}
    const int b = (bits & 2) ? 2 : 1; // beta  {A,B}
    const int g = (bits & 4) ? 2 : 1; // gamma {B,C}
    const int d = (bits & 8) ? 2 : 1; // delta {C,D}
    const bool nodes_ok = (a * b == 2) && (b * g == 2) && (g * d == 2) && (d * a == 2);
    if (!nodes_ok) continue;
    // cuts AB|CD, AC|BD, AD|BC: product of the crossing sources' ranks
    const bool ab_cd = (a * g) >= 2;         // alpha and gamma cross
    const bool ac_bd = (a * b * g * d) >= 2; // every source crosses the diagonal
    const bool ad_bc = (b * d) >= 2;         // beta and delta cross
    if (ab_cd && ac_bd && ad_bc) return false;
  }
  return true;
}

} // namespace

TEST_CASE("log-negativity on canonical states") {
  const std::vector<i64> two{2, 2};
  const int side0[] = {0};
  CHECK(log_negativity(outer(bell_pair()), two, side0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(log_negativity_pure(bell_pair(), two, side0) == doctest::Approx(1.0).epsilon(1e-10));

  // product state is PPT: zero negativity
  Rng rng(71);
  PureVector a(2), b(2);
  a.amps[0] = rng.complex_gaussian();
  a.amps[1] = rng.complex_gaussian();
  b.amps[0] = rng.complex_gaussian();
  b.amps[1] = rng.complex_gaussian();
  a.normalize();
  b.normalize();
  const PureVector prod = tensor(a, b);
  CHECK(std::abs(log_negativity(outer(prod), two, side0)) < 1e-9);

  // Bell⊗Bell across the joined cut: additivity gives exactly 2
  const PureVector two_bells = tensor(bell_pair(), bell_pair());
  const std::vector<i64> four{2, 2, 2, 2};
  const int joined[] = {0, 2}; // one half of each pair
  CHECK(log_negativity(outer(two_bells), four, joined) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(log_negativity_pure(two_bells, four, joined) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("pure-cut formula matches the dense partial transpose") {
  Rng rng(72);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<i64> dims{2, 2, 2, 2, 2};
    PureVector psi(32);
    for (auto& z : psi.amps) z = rng.complex_gaussian();
    psi.normalize();
    const int side[] = {0, 3};
    CHECK(std::abs(log_negativity_pure(psi, dims, side) -
                   log_negativity(outer(psi), dims, side)) < 1e-9);
  }
}

TEST_CASE("gme_check classifies canonical 4-qubit states") {
  PureVector ghz(16);
  ghz.amps[0] = ghz.amps[15] = 1.0 / std::sqrt(2.0);
  CHECK(gme_check(ghz));

  PureVector basis(16);
  basis.amps[0] = 1.0;
  CHECK_FALSE(gme_check(basis));

  // a product of two Bell pairs is entangled across some cuts but not all
  CHECK_FALSE(gme_check(tensor(bell_pair(), bell_pair())));

  PureVector w(16);
  w.amps[1] = w.amps[2] = w.amps[4] = w.amps[8] = 0.5;
  CHECK(gme_check(w));

  PureVector unnormalized(16);
  unnormalized.amps[0] = 1.0;
  unnormalized.amps[15] = 1.0;
  CHECK_THROWS_AS(gme_check(unnormalized), std::invalid_argument);
}

TEST_CASE("gme witness is UNSAT for every topology") {
  CHECK(gme_witness_unsat(Topology::IQN));
  CHECK(gme_witness_unsat(Topology::ITCN1));
  CHECK(gme_witness_unsat(Topology::ITCN2));
  CHECK(gme_witness_assignment_count(Topology::IQN) == 16);
  CHECK(gme_witness_assignment_count(Topology::ITCN1) == 64);
  CHECK(gme_witness_assignment_count(Topology::ITCN2) == 625);
  // independent enumeration for the quadrangle
  CHECK(iqn_witness_unsat_oracle());
  for (auto t : {Topology::IQN, Topology::ITCN1, Topology::ITCN2}) {
    CHECK(gme_witness_report(t).pass());
  }
}

TEST_CASE("expected rank table reproduces the worked examples") {
  // all-Bell quadrangle: global rank 1, node ranks 4, worked pair entries
  std::vector<SourceSample> bells{exact_bell(), exact_bell(), exact_bell(), exact_bell()};
  const RankTable iqn = expected_rank_table(Topology::IQN, bells);
  CHECK(iqn.expected[kAllNodes] == 1);
  for (NodeMask node : {1u, 2u, 4u, 8u}) CHECK(iqn.expected[node] == 4);
  CHECK(iqn.expected[0b0011] == 4);  // AB: r_alpha^A · r_beta · r_gamma^B = 2·1·2
  CHECK(iqn.expected[0b0101] == 16); // AC: all four half-pairs
  CHECK(iqn.expected[0b0111] == 4);  // ABC: r_alpha^A · r_delta^C = 2·2

  std::vector<SourceSample> bells6(6, exact_bell());
  const RankTable itcn1 = expected_rank_table(Topology::ITCN1, bells6);
  for (NodeMask node : {1u, 2u, 4u, 8u}) CHECK(itcn1.expected[node] == 8);
  CHECK(itcn1.expected[kAllNodes] == 1);

  std::vector<SourceSample> ghzs(4, exact_ghz3());
  const RankTable itcn2 = expected_rank_table(Topology::ITCN2, ghzs);
  CHECK(itcn2.expected[0b0011] == 16); // AB: r_alpha^AB r_beta^AB r_gamma^A r_delta^B
  for (NodeMask node : {1u, 2u, 4u, 8u}) CHECK(itcn2.expected[node] == 8);
}

TEST_CASE("observed ranks match the expected products on exact states") {
  std::vector<SourceSample> ghzs(4, exact_ghz3());
  const NetworkState state =
      build_network(Topology::ITCN2, ghzs, std::vector<ComplexMatrix>(4));
  const SystemView view = view_of(state);
  const RankTable tbl = expected_rank_table(Topology::ITCN2, ghzs);
  for (NodeMask m = 1; m < 16; ++m) {
    CHECK(numerical_rank(subset_spectrum(view, m)) == tbl.expected[m]);
  }
}

TEST_CASE("additivity on exact Bell networks gives the textbook values") {
  // quadrangle: each node touches two Bell pairs, so A|BCD carries 2 ebits
  std::vector<SourceSample> bells4{exact_bell(), exact_bell(), exact_bell(), exact_bell()};
  const NetworkState iqn = build_network(Topology::IQN, bells4, std::vector<ComplexMatrix>(4));
  const SystemView vq = view_of(iqn);
  const auto dims_q = vq.dims;
  CHECK(log_negativity_pure(iqn.psi, dims_q, vq.particles_of(1u)) ==
        doctest::Approx(2.0).epsilon(1e-9));
  // the two reduced-state terms are one ebit each: ε_{A|B}[tr_CD] and ε_{A|D}[tr_BC]
  for (NodeMask partner : {2u, 8u}) {
    const auto subset = vq.particles_of(1u | partner);
    const ComplexMatrix sigma = reduced_density(vq, 1u | partner);
    std::vector<i64> sub_dims(subset.size(), 2);
    std::vector<int> side;
    for (int i = 0; i < static_cast<int>(subset.size()); ++i) {
      if (subset[static_cast<std::size_t>(i)] < 2) side.push_back(i); // node A holds ids 0,1
    }
    CHECK(log_negativity(sigma, sub_dims, side) == doctest::Approx(1.0).epsilon(1e-9));
  }

  // six-edge tetrahedron: three Bell pairs per node, 3 ebits across A|BCD
  std::vector<SourceSample> bells6(6, exact_bell());
  const NetworkState itcn1 = build_network(Topology::ITCN1, bells6, std::vector<ComplexMatrix>(4));
  const SystemView vt = view_of(itcn1);
  CHECK(log_negativity_pure(itcn1.psi, vt.dims, vt.particles_of(1u)) ==
        doctest::Approx(3.0).epsilon(1e-9));

  // face-source tetrahedron with GHZ sources: 3 ebits across A|BCD as well
  std::vector<SourceSample> ghzs(4, exact_ghz3());
  const NetworkState itcn2 = build_network(Topology::ITCN2, ghzs, std::vector<ComplexMatrix>(4));
  const SystemView v2 = view_of(itcn2);
  CHECK(log_negativity_pure(itcn2.psi, v2.dims, v2.particles_of(1u)) ==
        doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("certification suites pass at smoke-test scale") {
  CHECK(check_i4_zero(Topology::IQN, 6, 1001).pass());
  CHECK(check_i4_zero(Topology::ITCN1, 4, 1002).pass());
  CHECK(check_i4_zero(Topology::ITCN2, 4, 1003).pass());
  CHECK(check_channel_signs(2, 1004).pass());
  CHECK(check_three_channel_bounds(6, 1005).pass());
  CHECK(check_rank_table(Topology::IQN, 4, 1006).pass());
  CHECK(check_rank_table(Topology::ITCN1, 3, 1007).pass());
  CHECK(check_rank_table(Topology::ITCN2, 3, 1008).pass());
  CHECK(check_additivity(Topology::IQN, 4, 1009).pass());
  CHECK(check_additivity(Topology::ITCN1, 3, 1010).pass());
  CHECK(check_additivity(Topology::ITCN2, 2, 1011).pass());
  CHECK(ssa_selftest(10, 1012).pass());
  CHECK(check_identities(10, 1013).pass());
  CHECK(check_structural(Topology::IQN, 4, 1014).pass());
}

TEST_CASE("slack accounting marks violations") {
  CertReport rep;
  rep.suite = "demo";
  rep.add("fails", 2.0, 1.0);
  rep.add("passes", 0.5, 1.0);
  rep.add_info("informational", 99.0, "never gates");
  CHECK_FALSE(rep.pass());
  CHECK(rep.items[0].pass == false);
  CHECK(rep.items[1].pass == true);
  CHECK(rep.items[2].informational);
}
