#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "topodof/simulate.hpp"

using namespace topodof;

namespace {

Topology fixture(const std::string& name) {
  return Topology::load_file(std::string(FIXTURES_DIR) + "/" + name);
}

TransmissionMatrix tm_fixture(const std::string& name) {
  return TransmissionMatrix::load_file(std::string(FIXTURES_DIR) + "/" + name);
}

}  // namespace

TEST_CASE("identity network single slot decodes with u = 1/g") {
  Topology id1 = Topology::identity(1);
  TransmissionMatrix tm;
  tm.m = 1;
  tm.n = 1;
  tm.k = 1;
  tm.rows = {1};
  DecodeTrialResult r = decode_trial(id1, tm, 42);
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.all_solved);
  CHECK(r.outcomes[0].residual < 1e-12);
  // u = 1/g, so ||u||^2 = 1/|g|^2 > 0.
  CHECK(r.outcomes[0].norm_sq > 0.0);
}

TEST_CASE("decode trials on the worked 6-user schedule always solve") {
  Topology fig7 = fixture("fig7.topo");
  TransmissionMatrix eq19 = tm_fixture("eq19.tm");
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    DecodeTrialResult r = decode_trial(fig7, eq19, SplitMix64::mix(99, seed));
    CHECK(r.all_solved);
    worst = std::max(worst, r.max_residual);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("identical seeds reproduce identical outcomes") {
  Topology fig7 = fixture("fig7.topo");
  TransmissionMatrix eq19 = tm_fixture("eq19.tm");
  DecodeTrialResult a = decode_trial(fig7, eq19, 1234);
  DecodeTrialResult b = decode_trial(fig7, eq19, 1234);
  REQUIRE(a.outcomes.size() == b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    CHECK(a.outcomes[i].residual == b.outcomes[i].residual);
    CHECK(a.outcomes[i].norm_sq == b.outcomes[i].norm_sq);
  }
}

TEST_CASE("a schedule that fails the matching conditions fails decoding") {
  // Fully-connected 3 users all shouting in one slot: nobody can separate.
  Topology full = Topology::fully_connected(3);
  TransmissionMatrix tm;
  tm.m = 1;
  tm.n = 1;
  tm.k = 3;
  tm.rows = {1, 1, 1};
  DecodeTrialResult r = decode_trial(full, tm, 7);
  CHECK_FALSE(r.all_solved);
}

TEST_CASE("matching oracle agrees with random-gain solvability") {
  OracleReport report = lemma_match_oracle(400, 6, 6, 2024);
  CHECK(report.trials == 400);
  CHECK(report.disagreements == 0);
  // The sample must exercise both outcomes or the oracle is vacuous.
  CHECK(report.predicate_true > 0);
  CHECK(report.predicate_true < 400);
}

TEST_CASE("oracle trivial instances") {
  // All-zero matrix: no matching, no solvable system.
  std::vector<std::uint32_t> zero{0, 0, 0};
  CHECK_FALSE(matching_drop_one(zero, 3, 1));
  // Identity pattern: removing any row always drops the matching.
  std::vector<std::uint32_t> ident{1, 2, 4};
  for (std::size_t l = 0; l < 3; ++l) CHECK(matching_drop_one(ident, 3, l));
}

TEST_CASE("log norm statistics match the closed form on the identity network") {
  // For a single standard complex Gaussian gain, |g|^2 is Exp(1), so
  // E[ln ||u||^2] = E[-ln |g|^2] = Euler-Mascheroni.
  Topology id1 = Topology::identity(1);
  TransmissionMatrix tm;
  tm.m = 1;
  tm.n = 1;
  tm.k = 1;
  tm.rows = {1};
  LogNormStats stats = log_norm_estimate(id1, tm, 100000, 5);
  CHECK(stats.all_finite);
  CHECK(stats.unsolved == 0);
  const double euler_mascheroni = 0.5772156649015329;
  // Var(ln Exp(1)) = pi^2/6, so three sigma at 1e5 samples is ~0.012.
  CHECK(std::abs(stats.mean - euler_mascheroni) < 0.02);
}

TEST_CASE("log norm stays finite on the worked schedule") {
  LogNormStats stats = log_norm_estimate(fixture("fig7.topo"), tm_fixture("eq19.tm"), 2000, 6);
  CHECK(stats.all_finite);
  CHECK(stats.unsolved == 0);
  CHECK(std::isfinite(stats.mean));
  CHECK(std::isfinite(stats.max));
}

TEST_CASE("polynomial tail bound closed-form case") {
  // p(X) = X: Pr[|X| <= eps] = 1 - exp(-eps^2) for CN(0,1).
  MultilinearPoly poly;
  poly.n_vars = 1;
  poly.terms = {{1U, {1.0, 0.0}}};
  double eps = 0.1;
  double p_hat = poly_small_probability(poly, eps, 200000, 8);
  double exact = 1.0 - std::exp(-eps * eps);
  CHECK(std::abs(p_hat - exact) < 1e-3);
  double bound = poly_tail_bound(1, eps, gaussian_modulus_density_max());
  CHECK(p_hat <= bound);
  CHECK(bound == doctest::Approx(4.0 * gaussian_modulus_density_max() * 0.1));
  CHECK(poly_tail_bound(1, 0.0, gaussian_modulus_density_max()) == 0.0);
}

TEST_CASE("random polynomial tails stay under the bound") {
  for (std::size_t n_vars = 1; n_vars <= 4; ++n_vars) {
    PolyTailReport report = poly_tail_check(n_vars, 20000, {0.01, 0.1, 0.5}, 77);
    CHECK(report.violations == 0);
    CHECK(report.checks > 0);
  }
}
