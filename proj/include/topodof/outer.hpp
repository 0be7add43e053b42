#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topodof/linalg.hpp"
#include "topodof/rational.hpp"
#include "topodof/topology.hpp"

namespace topodof {

// ---------------------------------------------------------------------------
// Generator machinery.
//
// For a user subset S of a topology, a {0,+1,-1} column matrix A "generates"
// S when the users of S can be decoded sequentially: user i is decodable
// once the column of the sub-adjacency matrix M^S at i lies, up to sign
// tolerance at pivot i, in the span of A plus the identity columns of
// already-decoded users. Since spans only grow as users decode, a greedy
// fixed-point closure decides decodability; order variations are ties.
// ---------------------------------------------------------------------------

struct ClosureResult {
  std::vector<std::size_t> decoded;      // subset of S, ascending (user ids)
  std::vector<std::size_t> order;        // user ids in decode order
  std::vector<RatVector> witnesses;      // one span witness per decode step
  bool complete = false;                 // decoded == S
};

// Greedy fixed-point closure: repeatedly scans undecoded users of S in
// ascending order and decodes every user whose sub-adjacency column passes
// the sign-tolerant membership test against [base | I_decoded].
// base.rows() must equal |S|; base columns are indexed by position in S.
ClosureResult decoding_closure(const Topology& t, const std::vector<std::size_t>& subset,
                               const RatMatrix& base);

struct FractionalPart {
  std::size_t column = 0;                // column index into the generator
  std::vector<std::size_t> sprime;       // maximizing user set, ascending
  std::vector<std::size_t> order;        // decode order over sprime
};

struct GeneratorCertificate {
  std::vector<std::size_t> subset;       // S, ascending user ids
  RatMatrix columns;                     // A: |S| x r over {0,+1,-1}
  std::vector<std::size_t> decode_order;
  std::vector<RatVector> witnesses;
  std::vector<FractionalPart> fractional;  // only columns with nonempty S'

  std::string to_json() const;
  static GeneratorCertificate from_json(const std::string& text);
};

// Present iff decoding_closure(S, A) decodes all of S. The certificate
// carries no fractional parts; outer_bound fills those in.
std::optional<GeneratorCertificate> is_generator(const Topology& t,
                                                 const std::vector<std::size_t>& subset,
                                                 const RatMatrix& columns);

// Largest user set S' (within the zero support of column c) such that the
// single expanded column c + sum of identity columns over S' decodes all of
// S' sequentially. Searches subset sizes descending, lexicographic within a
// size, first feasible wins; the empty set is always feasible.
// c is indexed by position in S with entries in {0,+1,-1}.
struct FractionalSearchResult {
  std::size_t count = 0;
  std::vector<std::size_t> sprime;  // user ids, ascending
  std::vector<std::size_t> order;   // user ids in decode order
};

FractionalSearchResult fractional_generator_max(const Topology& t,
                                                const std::vector<std::size_t>& subset,
                                                const std::vector<int>& c);

// ---------------------------------------------------------------------------
// Outer-bound search
// ---------------------------------------------------------------------------

enum class GeneratorFamily {
  adjacency_subsets,  // A = M^S columns indexed by a subset of S
  extended_signed,    // additionally single-sign-flip variants of those columns
};

struct OuterSearchConfig {
  GeneratorFamily family = GeneratorFamily::adjacency_subsets;
  bool theorem1_only = false;  // drop fractional terms from the objective
  // Caps for the extended family; 0 means unlimited. A capped search is
  // reported as non-exhaustive.
  std::size_t max_columns = 0;
};

struct OuterBoundResult {
  Rational value;
  GeneratorCertificate certificate;
  GeneratorFamily family = GeneratorFamily::adjacency_subsets;
  bool exhaustive = true;
};

// Minimizes c(A) / (|S| + sum_i n_S(A_i)) over subsets S and generator
// matrices A from the configured family (the fractional sum is dropped in
// theorem1_only mode). The result never exceeds 1: a singleton S with its
// own adjacency column always generates.
OuterBoundResult outer_bound(const Topology& t, const OuterSearchConfig& cfg = {});

// Replays a certificate step by step through the exact rational path,
// independent of any search bookkeeping: witnesses must lie in the correct
// spans and satisfy the sign-tolerance constraints, fractional sets must
// re-derive, and the claimed value must match the certificate's shape.
bool verify_certificate(const Topology& t, const GeneratorCertificate& cert,
                        const Rational& claimed_value, bool theorem1_only,
                        std::string* error = nullptr);

}  // namespace topodof
