#include "topodof/linalg.hpp"

#include <cassert>
#include <numeric>
#include <stdexcept>

namespace topodof {

void RatMatrix::append_column(const RatVector& v) {
  if (rows_ == 0 && cols_ == 0) {
    rows_ = v.size();
  }
  if (v.size() != rows_) throw std::invalid_argument("append_column: dimension mismatch");
  std::vector<Rational> next((cols_ + 1) * rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) next[r * (cols_ + 1) + c] = at(r, c);
    next[r * (cols_ + 1) + cols_] = v[r];
  }
  entries_ = std::move(next);
  cols_ += 1;
}

RatMatrix RatMatrix::from_columns(std::size_t rows, const std::vector<RatVector>& cols) {
  RatMatrix m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != rows) throw std::invalid_argument("from_columns: dimension mismatch");
    for (std::size_t r = 0; r < rows; ++r) m.at(r, c) = cols[c][r];
  }
  return m;
}

std::size_t rank(const RatMatrix& a) {
  SpanBasis basis(a.rows());
  for (std::size_t c = 0; c < a.cols(); ++c) basis.add(a.column(c));
  return basis.rank();
}

bool in_span(const RatVector& v, const RatMatrix& basis) {
  if (v.size() != basis.rows()) throw std::invalid_argument("in_span: dimension mismatch");
  SpanBasis span(basis.rows());
  for (std::size_t c = 0; c < basis.cols(); ++c) span.add(basis.column(c));
  return span.contains(v);
}

namespace {

// Reduces v against echelon rows in place; returns index of first nonzero
// coordinate, or dim if v reduced to zero.
std::size_t reduce_rational(const std::vector<RatVector>& rows, RatVector& v) {
  std::size_t lead = v.size();
  for (const RatVector& row : rows) {
    std::size_t p = 0;
    while (p < row.size() && row[p].is_zero()) ++p;
    if (p < v.size() && !v[p].is_zero()) {
      Rational f = v[p];  // row leading entry is 1
      for (std::size_t j = p; j < v.size(); ++j) v[j] -= f * row[j];
    }
  }
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!v[j].is_zero()) {
      lead = j;
      break;
    }
  }
  return lead;
}

}  // namespace

bool SpanBasis::add(const RatVector& v) {
  if (v.size() != dim_) throw std::invalid_argument("SpanBasis::add: dimension mismatch");
  RatVector w = v;
  std::size_t lead = reduce_rational(rows_, w);
  if (lead == dim_) return false;
  Rational inv = Rational(1) / w[lead];
  for (std::size_t j = lead; j < dim_; ++j) w[j] *= inv;
  // Back-substitute into existing rows to keep the basis fully reduced.
  for (RatVector& row : rows_) {
    if (!row[lead].is_zero()) {
      Rational f = row[lead];
      for (std::size_t j = lead; j < dim_; ++j) row[j] -= f * w[j];
    }
  }
  auto pos = rows_.begin();
  while (pos != rows_.end()) {
    std::size_t p = 0;
    while (p < dim_ && (*pos)[p].is_zero()) ++p;
    if (p > lead) break;
    ++pos;
  }
  rows_.insert(pos, std::move(w));
  return true;
}

bool SpanBasis::contains(const RatVector& v) const {
  if (v.size() != dim_) throw std::invalid_argument("SpanBasis::contains: dimension mismatch");
  RatVector w = v;
  return reduce_rational(rows_, w) == dim_;
}

namespace {

// Shared candidate enumeration for both sign_member flavours. Walks sign
// assignments over the support positions (pivot fixed at +1), trying
// +1, -1 and (if allowed) 0 per position in that order.
template <typename Vec, typename Scalar, typename Contains>
std::optional<Vec> enumerate_witness(const SignConstrainedTarget& target, std::size_t dim,
                                     bool allow_drop, const Contains& contains) {
  if (target.pattern.size() != dim)
    throw std::invalid_argument("sign_member: dimension mismatch");
  if (target.pivot >= dim || !target.pattern[target.pivot])
    throw std::invalid_argument("sign_member: pivot outside target support");

  std::vector<std::size_t> free_positions;
  for (std::size_t j = 0; j < dim; ++j)
    if (target.pattern[j] && j != target.pivot) free_positions.push_back(j);

  Vec candidate(dim, Scalar(0));
  candidate[target.pivot] = Scalar(1);

  const Scalar values_full[2] = {Scalar(1), Scalar(-1)};
  const Scalar values_drop[3] = {Scalar(1), Scalar(-1), Scalar(0)};
  const Scalar* values = allow_drop ? values_drop : values_full;
  const std::size_t n_values = allow_drop ? 3 : 2;

  std::optional<Vec> found;
  auto walk = [&](auto&& self, std::size_t idx) -> bool {
    if (idx == free_positions.size()) {
      if (contains(candidate)) {
        found = candidate;
        return true;
      }
      return false;
    }
    for (std::size_t k = 0; k < n_values; ++k) {
      candidate[free_positions[idx]] = values[k];
      if (self(self, idx + 1)) return true;
    }
    candidate[free_positions[idx]] = Scalar(0);
    return false;
  };
  walk(walk, 0);
  return found;
}

}  // namespace

std::optional<RatVector> sign_member(const SignConstrainedTarget& target,
                                     const SpanBasis& basis) {
  return enumerate_witness<RatVector, Rational>(
      target, basis.dim(), /*allow_drop=*/true,
      [&](const RatVector& c) { return basis.contains(c); });
}

std::optional<RatVector> sign_member(const SignConstrainedTarget& target,
                                     const RatMatrix& basis) {
  SpanBasis span(basis.rows());
  for (std::size_t c = 0; c < basis.cols(); ++c) span.add(basis.column(c));
  return sign_member(target, span);
}

bool sign_member_exact(const std::vector<bool>& target, const RatMatrix& basis) {
  SpanBasis span(basis.rows());
  for (std::size_t c = 0; c < basis.cols(); ++c) span.add(basis.column(c));
  SignConstrainedTarget t;
  t.pattern = target;
  std::size_t first_support = target.size();
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (target[j]) {
      first_support = j;
      break;
    }
  }
  if (first_support == target.size()) {
    // All-zero target: the zero vector is always in the span.
    return true;
  }
  t.pivot = first_support;
  auto witness = enumerate_witness<RatVector, Rational>(
      t, span.dim(), /*allow_drop=*/false,
      [&](const RatVector& c) { return span.contains(c); });
  return witness.has_value();
}

// ---------------------------------------------------------------------------
// Integer kernel
// ---------------------------------------------------------------------------

namespace {

constexpr std::int64_t kOverflowGuard = std::int64_t(1) << 40;

std::int64_t igcd(std::int64_t a, std::int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

void make_primitive(std::vector<std::int64_t>& v) {
  std::int64_t g = 0;
  for (std::int64_t x : v) g = igcd(g, x);
  if (g > 1)
    for (std::int64_t& x : v) x /= g;
  for (std::int64_t x : v) {
    if (x != 0) {
      if (x < 0)
        for (std::int64_t& y : v) y = -y;
      break;
    }
  }
}

}  // namespace

void IntSpanBasis::reduce(std::vector<std::int64_t>& v) const {
  for (const auto& row : rows_) {
    std::size_t p = 0;
    while (p < dim_ && row[p] == 0) ++p;
    if (p < dim_ && v[p] != 0) {
      // v <- row[p]*v - v[p]*row, then strip common factors.
      std::int64_t a = row[p];
      std::int64_t b = v[p];
      for (std::size_t j = 0; j < dim_; ++j) {
        v[j] = a * v[j] - b * row[j];
        assert(v[j] < kOverflowGuard && v[j] > -kOverflowGuard);
      }
      make_primitive(v);
    }
  }
}

bool IntSpanBasis::add(const std::vector<std::int64_t>& v) {
  assert(v.size() == dim_);
  std::vector<std::int64_t> w = v;
  make_primitive(w);
  reduce(w);
  std::size_t lead = dim_;
  for (std::size_t j = 0; j < dim_; ++j) {
    if (w[j] != 0) {
      lead = j;
      break;
    }
  }
  if (lead == dim_) return false;
  auto pos = rows_.begin();
  while (pos != rows_.end()) {
    std::size_t p = 0;
    while (p < dim_ && (*pos)[p] == 0) ++p;
    if (p > lead) break;
    ++pos;
  }
  rows_.insert(pos, std::move(w));
  return true;
}

bool IntSpanBasis::contains(const std::vector<std::int64_t>& v) const {
  assert(v.size() == dim_);
  std::vector<std::int64_t> w = v;
  reduce(w);
  for (std::int64_t x : w)
    if (x != 0) return false;
  return true;
}

std::optional<std::vector<std::int64_t>> sign_member_int(const SignConstrainedTarget& target,
                                                         const IntSpanBasis& basis) {
  return enumerate_witness<std::vector<std::int64_t>, std::int64_t>(
      target, basis.dim(), /*allow_drop=*/true,
      [&](const std::vector<std::int64_t>& c) { return basis.contains(c); });
}

}  // namespace topodof
