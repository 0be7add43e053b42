#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "topodof/rational.hpp"

namespace topodof {

using RatVector = std::vector<Rational>;

// Dense row-major rational matrix. Sizes in this project stay tiny
// (at most a few dozen rows/columns), so everything is O(n^3) exact
// Gaussian elimination with no pivot-growth concerns.
class RatMatrix {
 public:
  RatMatrix() : rows_(0), cols_(0) {}
  RatMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  RatVector column(std::size_t c) const {
    RatVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = at(r, c);
    return v;
  }

  void append_column(const RatVector& v);

  static RatMatrix from_columns(std::size_t rows, const std::vector<RatVector>& cols);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Rational> entries_;
};

// Exact rank over the rationals.
std::size_t rank(const RatMatrix& a);

// True iff v lies in the column span of `basis`. Throws std::invalid_argument
// on dimension mismatch.
bool in_span(const RatVector& v, const RatMatrix& basis);

// Incrementally maintained column span in row-echelon form. add() keeps the
// basis reduced; contains() is a single reduction pass. Exact rationals.
class SpanBasis {
 public:
  explicit SpanBasis(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return rows_.size(); }

  // Adds a vector to the span. Returns true if it enlarged the span.
  bool add(const RatVector& v);
  bool contains(const RatVector& v) const;

 private:
  std::size_t dim_;
  // Echelon rows sorted by leading index; each row's leading entry is 1.
  std::vector<RatVector> rows_;
};

// Support pattern of a sign-tolerant span-membership target: the target
// column is 0/1-valued, and `pivot` marks the entry that must be matched
// with magnitude one. Other support entries may be matched, sign-flipped
// or dropped; off-support entries must stay zero.
struct SignConstrainedTarget {
  std::vector<bool> pattern;  // support of the target column
  std::size_t pivot = 0;      // index into pattern; pattern[pivot] must be true
};

// Searches for a witness vector w in span(basis) with |w_pivot| = 1,
// w_j in {0,+1,-1} on the support, w_j = 0 off the support. The pivot sign
// is fixed to +1 (spans are closed under negation). Candidates are tried
// per support entry in the order +1 (match), -1 (flip), 0 (drop), ascending
// index, so the first witness found is deterministic and equals the target
// itself whenever the target already lies in the span.
// Cost: up to 3^(|support|-1) membership tests.
std::optional<RatVector> sign_member(const SignConstrainedTarget& target,
                                     const SpanBasis& basis);

std::optional<RatVector> sign_member(const SignConstrainedTarget& target,
                                     const RatMatrix& basis);

// Variant where every support entry must be matched with magnitude one
// (none may be dropped). Cost: up to 2^(|support|-1) membership tests.
bool sign_member_exact(const std::vector<bool>& target, const RatMatrix& basis);

// ---------------------------------------------------------------------------
// Fast exact integer twin of SpanBasis, used by the bound-search inner loops
// where every vector has entries in {0,+1,-1}. Rows are kept primitive
// (gcd 1) so all arithmetic stays in small integers; overflow is asserted
// against a generous headroom bound. Semantically identical to SpanBasis,
// which the tests cross-check on random inputs.
// ---------------------------------------------------------------------------
class IntSpanBasis {
 public:
  explicit IntSpanBasis(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return rows_.size(); }

  bool add(const std::vector<std::int64_t>& v);
  bool contains(const std::vector<std::int64_t>& v) const;

 private:
  void reduce(std::vector<std::int64_t>& v) const;

  std::size_t dim_;
  std::vector<std::vector<std::int64_t>> rows_;  // echelon, primitive, leading > 0
};

// Integer-kernel variant of sign_member. Inputs restricted to {0,±1} vectors.
std::optional<std::vector<std::int64_t>> sign_member_int(
    const SignConstrainedTarget& target, const IntSpanBasis& basis);

}  // namespace topodof
