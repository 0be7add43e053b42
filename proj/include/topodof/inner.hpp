#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topodof/rational.hpp"
#include "topodof/topology.hpp"

namespace topodof {

// ---------------------------------------------------------------------------
// Structured repetition coding: each of the K users repeats m symbols across
// n time slots according to a 0/1 matrix with mK rows (m consecutive rows
// per transmitter) and n columns. A transmitter sends at most one of its
// symbols per slot, and a symbol that is never sent cannot be decoded, so
// both are invariants of the type.
// ---------------------------------------------------------------------------
struct TransmissionMatrix {
  std::size_t m = 0;  // symbols per user
  std::size_t n = 0;  // time slots
  std::size_t k = 0;  // users; rows.size() == m*k
  std::vector<std::uint32_t> rows;  // bit j of rows[l] = symbol row l sent in slot j

  Rational ratio() const { return Rational((long long)m, (long long)n); }

  // Empty string when well-formed, otherwise a reason.
  std::string malformed_reason() const;

  std::string to_json() const;  // {m, n, rows:[bit-strings]}
  static TransmissionMatrix from_json(const std::string& text);
  static TransmissionMatrix load_file(const std::string& path);
};

// Rows of the receiver-j effective matrix: the transmission matrix with the
// blocks of transmitters unheard by receiver j zeroed out.
std::vector<std::uint32_t> effective_rows(const Topology& t, const TransmissionMatrix& tm,
                                          std::size_t receiver);

// Maximum bipartite matching size (rows vs columns) via augmenting paths.
std::size_t matching_number(const std::vector<std::uint32_t>& rows, std::size_t cols);

// True iff removing `row` drops the matching number by one, i.e. the row is
// covered by every maximum matching.
bool matching_drop_one(const std::vector<std::uint32_t>& rows, std::size_t cols,
                       std::size_t row);

struct TmVerifyResult {
  bool ok = false;
  std::string malformed;  // nonempty if the matrix violated its invariants
  std::vector<std::pair<std::size_t, std::size_t>> failures;  // (receiver, symbol row)
};

// Decodability certificate check: for every receiver j and own symbol row l,
// the matching number of the effective matrix must drop by exactly one when
// row l is removed.
TmVerifyResult verify_transmission_matrix(const Topology& t, const TransmissionMatrix& tm);

// ---------------------------------------------------------------------------
// Benchmark inner bounds
// ---------------------------------------------------------------------------

// 1 / (maximum receiver degree).
Rational rgc_bound(const Topology& t);

// All maximal independent sets of the conflict graph, as vertex bitmasks in
// ascending numeric order.
std::vector<std::uint32_t> maximal_independent_sets(const ConflictGraph& g);

struct FractionalColoring {
  Rational chi_f;
  // Optimal covering weights over maximal independent sets; only nonzero
  // entries are kept. Every vertex is covered with total weight >= 1 and the
  // weights sum to chi_f (re-checked after the LP solve).
  std::vector<std::pair<std::uint32_t, Rational>> weights;
};

// Exact fractional chromatic number via the covering LP over maximal
// independent sets (rational simplex). Interference avoidance achieves
// 1/chi_f.
FractionalColoring fractional_chromatic(const ConflictGraph& g);

// Turns a fractional coloring into a transmission matrix: scale the weights
// to integers, give each independent set that many slots, and let each user
// send its r-th symbol in the slot of its r-th covered occurrence. Receivers
// see their own symbols interference-free, so the matrix always verifies.
// Returns nullopt if the schedule needs more than max_slots slots.
std::optional<TransmissionMatrix> coloring_embedding(const Topology& t,
                                                     const FractionalColoring& coloring,
                                                     std::size_t max_slots);

// One slot per user; the universal fallback schedule.
TransmissionMatrix tdma_matrix(const Topology& t);

// ---------------------------------------------------------------------------
// Structured repetition coding search
// ---------------------------------------------------------------------------

struct SrcSearchConfig {
  std::size_t n_max = 0;             // 0 means K+1
  std::uint64_t node_budget = 200'000'000;
  Rational incumbent = Rational(0);  // ratios <= incumbent are skipped
  // Optional sound upper cap (e.g. a proven outer bound): ratios above it
  // cannot be feasible, so they are skipped without affecting exhaustiveness.
  std::optional<Rational> ratio_cap;
};

struct SrcSearchResult {
  Rational value = Rational(0);      // 0 when nothing above the incumbent was found
  std::optional<TransmissionMatrix> matrix;
  bool exhaustive = true;            // false iff the node budget cut a branch
};

// Maximizes m/n over transmission matrices with n <= n_max, enumerating
// (m, n) pairs in decreasing-ratio order (ascending n within a ratio) and
// backtracking over per-transmitter schedules. Symmetry is broken by
// canonical symbol labeling and slot-group ordering; branches die as soon as
// some receiver's matching condition becomes permanently unsatisfiable.
// The first feasible pair wins; its matrix is re-verified independently.
SrcSearchResult src_search(const Topology& t, const SrcSearchConfig& cfg = {});

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct InnerBoundsConfig {
  std::size_t n_max = 0;  // 0 means K+1
  std::uint64_t node_budget = 200'000'000;
  std::optional<Rational> src_ratio_cap;
};

struct InnerBoundsResult {
  Rational rgc;
  Rational ia;
  FractionalColoring coloring;
  Rational src;
  std::optional<TransmissionMatrix> src_matrix;
  bool src_exhaustive = true;
  Rational best;
};

// Computes all three achievable values and their maximum. The repetition
// search starts from incumbent max(rgc, ia); the reported src is the better
// of the search result and the best embedded schedule (fractional coloring
// if it fits within n_max, else one-slot-per-user), so src >= ia whenever
// the coloring embedding fits.
InnerBoundsResult inner_bounds(const Topology& t, const InnerBoundsConfig& cfg = {});

}  // namespace topodof
