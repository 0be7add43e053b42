#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "topodof/inner.hpp"
#include "topodof/outer.hpp"
#include "topodof/rng.hpp"

using namespace topodof;

namespace {

Topology fixture(const std::string& name) {
  return Topology::load_file(std::string(FIXTURES_DIR) + "/" + name);
}

TransmissionMatrix tm_fixture(const std::string& name) {
  return TransmissionMatrix::load_file(std::string(FIXTURES_DIR) + "/" + name);
}

Topology random_topology(SplitMix64& rng, std::size_t k, double density) {
  Topology t(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && rng.uniform() < density) t.set(i, j, true);
  return t;
}

}  // namespace

TEST_CASE("rgc bound") {
  CHECK(rgc_bound(fixture("fig3a.topo")) == Rational(1, 3));
  CHECK(rgc_bound(fixture("fig7.topo")) == Rational(1, 4));
  CHECK(rgc_bound(Topology::identity(5)) == Rational(1));
}

TEST_CASE("maximal independent sets") {
  auto sets5 = maximal_independent_sets(conflict_graph(fixture("fig1.topo")));
  // 5-cycle conflict graph 0-2-4-1-3-0: pairs of users two apart.
  std::vector<std::uint32_t> expected5{0b00011, 0b00110, 0b01100, 0b10001, 0b11000};
  std::sort(expected5.begin(), expected5.end());
  CHECK(sets5 == expected5);

  auto sets7 = maximal_independent_sets(conflict_graph(fixture("fig7.topo")));
  std::vector<std::uint32_t> expected7{0b110001, 0b110010, 0b000100, 0b101000};
  std::sort(expected7.begin(), expected7.end());
  CHECK(sets7 == expected7);

  auto sets_k4 = maximal_independent_sets(conflict_graph(Topology::fully_connected(4)));
  CHECK(sets_k4 == std::vector<std::uint32_t>{1, 2, 4, 8});
}

TEST_CASE("fractional chromatic number") {
  CHECK(fractional_chromatic(conflict_graph(fixture("fig1.topo"))).chi_f == Rational(5, 2));
  CHECK(fractional_chromatic(conflict_graph(Topology::fully_connected(4))).chi_f == Rational(4));
  CHECK(fractional_chromatic(conflict_graph(Topology::identity(5))).chi_f == Rational(1));
  CHECK(fractional_chromatic(conflict_graph(fixture("fig7.topo"))).chi_f == Rational(4));
}

TEST_CASE("fractional chromatic is bracketed by clique and coloring numbers") {
  // Sanity bracket on random graphs: a triangle forces chi_f >= 3; an
  // edgeless graph forces chi_f = 1; chi_f <= k always.
  SplitMix64 rng(3);
  for (int iter = 0; iter < 40; ++iter) {
    std::size_t k = 3 + rng.below(4);
    Topology t = random_topology(rng, k, 0.4);
    ConflictGraph g = conflict_graph(t);
    Rational chi = fractional_chromatic(g).chi_f;
    CHECK(chi >= Rational(1));
    CHECK(chi <= Rational((long long)k));
    bool has_edge = false;
    for (std::size_t i = 0; i < k && !has_edge; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (g.edge(i, j)) {
          has_edge = true;
          break;
        }
    if (has_edge) CHECK(chi >= Rational(2));
  }
}

TEST_CASE("matching numbers from the worked effective matrix") {
  // Effective matrix of receiver 3 (0-based) under the 6x3 schedule:
  // rows 2,3 = (1,0,1), row 4 = (1,1,0), rest zero.
  std::vector<std::uint32_t> rows{0, 0, 0b101, 0b101, 0b011, 0};
  CHECK(matching_number(rows, 3) == 3);
  std::vector<std::uint32_t> without{0, 0, 0b101, 0, 0b011, 0};
  CHECK(matching_number(without, 3) == 2);
  CHECK(matching_drop_one(rows, 3, 3));
  CHECK(matching_number(std::vector<std::uint32_t>{}, 4) == 0);
}

TEST_CASE("transmission matrix invariants") {
  TransmissionMatrix eq19 = tm_fixture("eq19.tm");
  CHECK(eq19.malformed_reason().empty());
  CHECK(eq19.ratio() == Rational(1, 3));

  TransmissionMatrix zero;
  zero.m = 1;
  zero.n = 2;
  zero.k = 2;
  zero.rows = {0, 0};
  CHECK_FALSE(zero.malformed_reason().empty());

  TransmissionMatrix twice;
  twice.m = 2;
  twice.n = 2;
  twice.k = 1;
  twice.rows = {0b01, 0b01};  // both symbols in slot 0
  CHECK_FALSE(twice.malformed_reason().empty());

  TransmissionMatrix back = TransmissionMatrix::from_json(eq19.to_json());
  CHECK(back.rows == eq19.rows);
}

TEST_CASE("verify_transmission_matrix on the worked 6-user network") {
  Topology fig7 = fixture("fig7.topo");
  TransmissionMatrix eq19 = tm_fixture("eq19.tm");
  TmVerifyResult result = verify_transmission_matrix(fig7, eq19);
  CHECK(result.malformed.empty());
  CHECK(result.ok);

  // Identity network, one symbol in one slot for everyone.
  Topology id3 = Topology::identity(3);
  TransmissionMatrix all_ones;
  all_ones.m = 1;
  all_ones.n = 1;
  all_ones.k = 3;
  all_ones.rows = {1, 1, 1};
  CHECK(verify_transmission_matrix(id3, all_ones).ok);

  // The same schedule fails once users interfere.
  TmVerifyResult clash = verify_transmission_matrix(Topology::fully_connected(3), all_ones);
  CHECK_FALSE(clash.ok);
  CHECK_FALSE(clash.failures.empty());
}

TEST_CASE("verdict is invariant under slot permutation and symbol relabeling") {
  Topology fig7 = fixture("fig7.topo");
  SplitMix64 rng(9);
  SrcSearchConfig cfg;
  cfg.incumbent = Rational(1, 4);
  SrcSearchResult found = src_search(fig7, cfg);
  REQUIRE(found.matrix.has_value());
  TransmissionMatrix tm = *found.matrix;

  for (int iter = 0; iter < 20; ++iter) {
    TransmissionMatrix shuffled = tm;
    // Random slot permutation.
    std::vector<std::size_t> perm(tm.n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i + 1 < perm.size(); ++i)
      std::swap(perm[i], perm[i + rng.below(perm.size() - i)]);
    for (std::size_t l = 0; l < tm.rows.size(); ++l) {
      std::uint32_t row = 0;
      for (std::size_t s = 0; s < tm.n; ++s)
        if ((tm.rows[l] >> s) & 1U) row |= std::uint32_t(1) << perm[s];
      shuffled.rows[l] = row;
    }
    // Swap two symbol rows inside a random transmitter block.
    if (tm.m > 1) {
      std::size_t i = rng.below(tm.k);
      std::size_t a = i * tm.m + rng.below(tm.m);
      std::size_t b = i * tm.m + rng.below(tm.m);
      std::swap(shuffled.rows[a], shuffled.rows[b]);
    }
    CHECK(verify_transmission_matrix(fig7, shuffled).ok);
  }
}

TEST_CASE("coloring embeddings always verify") {
  SplitMix64 rng(10);
  for (int iter = 0; iter < 60; ++iter) {
    std::size_t k = 3 + rng.below(4);
    Topology t = random_topology(rng, k, 0.4);
    FractionalColoring coloring = fractional_chromatic(conflict_graph(t));
    auto tm = coloring_embedding(t, coloring, 64);
    REQUIRE(tm.has_value());
    CHECK(tm->ratio() == Rational(1) / coloring.chi_f);
    CHECK(verify_transmission_matrix(t, *tm).ok);
  }
}

TEST_CASE("src search golden values") {
  SrcSearchResult id = src_search(Topology::identity(3));
  CHECK(id.value == Rational(1));
  REQUIRE(id.matrix.has_value());
  CHECK(id.matrix->m == 1);
  CHECK(id.matrix->n == 1);

  SrcSearchConfig cfg7;
  cfg7.n_max = 7;
  cfg7.incumbent = Rational(1, 4);
  SrcSearchResult fig7 = src_search(fixture("fig7.topo"), cfg7);
  CHECK(fig7.value == Rational(1, 3));
  REQUIRE(fig7.matrix.has_value());
  CHECK(verify_transmission_matrix(fixture("fig7.topo"), *fig7.matrix).ok);
  CHECK(fig7.exhaustive);

  SrcSearchConfig cfg1;
  cfg1.incumbent = Rational(1, 3);  // rgc value; the search must reach 2/5
  SrcSearchResult fig1 = src_search(fixture("fig1.topo"), cfg1);
  CHECK(fig1.value == Rational(2, 5));
}

TEST_CASE("inner bounds aggregation") {
  InnerBoundsResult fig7 = inner_bounds(fixture("fig7.topo"));
  CHECK(fig7.rgc == Rational(1, 4));
  CHECK(fig7.ia == Rational(1, 4));
  CHECK(fig7.src == Rational(1, 3));
  CHECK(fig7.best == Rational(1, 3));

  InnerBoundsResult fig3a = inner_bounds(fixture("fig3a.topo"));
  CHECK(fig3a.rgc == Rational(1, 3));
  CHECK(fig3a.ia == Rational(1, 4));
  CHECK(fig3a.best == Rational(1, 3));

  InnerBoundsResult id = inner_bounds(Topology::identity(3));
  CHECK(id.rgc == Rational(1));
  CHECK(id.ia == Rational(1));
  CHECK(id.src == Rational(1));
  CHECK(id.best == Rational(1));
}

TEST_CASE("best inner never exceeds the outer bound") {
  SplitMix64 rng(11);
  for (int iter = 0; iter < 25; ++iter) {
    std::size_t k = 3 + rng.below(3);
    Topology t = random_topology(rng, k, 0.4);
    InnerBoundsResult inner = inner_bounds(t);
    OuterBoundResult outer = outer_bound(t);
    CHECK(inner.best <= outer.value);
    if (inner.src_matrix) CHECK(verify_transmission_matrix(t, *inner.src_matrix).ok);
  }
}
