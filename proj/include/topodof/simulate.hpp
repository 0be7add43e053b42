#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "topodof/inner.hpp"
#include "topodof/rng.hpp"
#include "topodof/topology.hpp"

namespace topodof {

// Channel gain distribution, pluggable behind a sampler. The default is the
// standard complex Gaussian CN(0,1), which satisfies the model's regularity
// conditions (finite second moment, symmetric around zero, bounded modulus
// density). Plug-in distributions must declare their own modulus-density
// supremum for the tail checks.
struct GainDistribution {
  std::function<std::complex<double>(SplitMix64&)> sample;
  double modulus_density_max = 0.0;
};

// |CN(0,1)| is Rayleigh with density 2r*exp(-r^2), maximized at r = 1/sqrt(2)
// with value sqrt(2/e).
double gaussian_modulus_density_max();

GainDistribution standard_complex_gaussian();

// ---------------------------------------------------------------------------
// Random-gain decodability of transmission matrices
// ---------------------------------------------------------------------------

struct DecodeOutcome {
  std::size_t receiver = 0;
  std::size_t symbol_row = 0;
  bool solved = false;
  double residual = 0.0;  // max entrywise |G^j u - I_l| over the full system
  double norm_sq = 0.0;   // ||u||^2
};

struct DecodeTrialResult {
  std::vector<DecodeOutcome> outcomes;
  std::size_t singular_events = 0;  // numerically singular matching submatrices
  bool all_solved = false;
  double max_residual = 0.0;
};

// One Monte Carlo trial: samples one gain per (transmitter, receiver, slot)
// triple (shared across the transmitter's symbol rows), then decodes every
// receiver's own symbols through the matching-submatrix construction and
// verifies the full linear system numerically at tolerance 1e-9.
DecodeTrialResult decode_trial(const Topology& t, const TransmissionMatrix& tm,
                               std::uint64_t seed,
                               const GainDistribution& dist = standard_complex_gaussian());

// ---------------------------------------------------------------------------
// Matching-vs-solvability oracle
// ---------------------------------------------------------------------------

struct OracleReport {
  std::size_t trials = 0;
  std::size_t disagreements = 0;
  std::size_t predicate_true = 0;  // how often the matching predicate held
};

// Draws random bipartite 0/1 matrices (rows <= max_rows, cols <= max_cols)
// and a random target row, then compares the combinatorial predicate
// "matching number drops by one without the row" against numeric solvability
// of the random-gain system at rank tolerance 1e-7.
OracleReport lemma_match_oracle(std::size_t trials, std::size_t max_rows, std::size_t max_cols,
                                std::uint64_t seed,
                                const GainDistribution& dist = standard_complex_gaussian());

// ---------------------------------------------------------------------------
// Combining-vector norm statistics
// ---------------------------------------------------------------------------

struct LogNormStats {
  std::size_t samples = 0;
  double mean = 0.0;  // mean of ln(||u||^2) over solved symbols
  double max = 0.0;
  bool all_finite = true;
  std::size_t unsolved = 0;
};

// Empirical statistics of ln(||u||^2) across trials; trial i uses the
// derived seed mix(seed, i).
LogNormStats log_norm_estimate(const Topology& t, const TransmissionMatrix& tm,
                               std::size_t trials, std::uint64_t seed,
                               const GainDistribution& dist = standard_complex_gaussian());

// ---------------------------------------------------------------------------
// Small-value tail of multilinear polynomials
// ---------------------------------------------------------------------------

struct MultilinearPoly {
  std::size_t n_vars = 0;
  // Each term: variable subset bitmask and a coefficient with modulus >= 1.
  std::vector<std::pair<std::uint32_t, std::complex<double>>> terms;
};

// Monte Carlo estimate of Pr[|p(X)| <= eps] with i.i.d. CN(0,1) inputs.
double poly_small_probability(const MultilinearPoly& poly, double eps, std::size_t trials,
                              std::uint64_t seed,
                              const GainDistribution& dist = standard_complex_gaussian());

// The tail bound 2^(n+1) * f_max * eps^(1/2^(n-1)) for eps in [0,1].
double poly_tail_bound(std::size_t n_vars, double eps, double f_max);

struct PolyTailReport {
  std::size_t checks = 0;
  std::size_t violations = 0;  // empirical estimate above bound + 3 sigma
};

// Random multilinear polynomials (distinct monomials, |coefficients| >= 1)
// against the tail bound at each epsilon, allowing three binomial standard
// deviations of sampling slack.
PolyTailReport poly_tail_check(std::size_t n_vars, std::size_t trials,
                               const std::vector<double>& epsilons, std::uint64_t seed,
                               const GainDistribution& dist = standard_complex_gaussian());

}  // namespace topodof
