#pragma once

#include <vector>

#include "topodof/rational.hpp"

namespace topodof {

// Exact rational simplex for the tiny covering/packing LPs in this project
// (a few dozen rows/columns at most). Bland's rule, so no cycling.
struct SimplexResult {
  Rational objective;
  std::vector<Rational> primal;  // optimal x
  std::vector<Rational> dual;    // shadow prices, one per constraint
};

// maximize c^T x  subject to  A x <= b, x >= 0, with b >= 0 entrywise
// (the all-slack basis is then feasible). Throws std::invalid_argument on
// shape errors or negative b; throws std::runtime_error if unbounded.
SimplexResult simplex_max(const std::vector<std::vector<Rational>>& a,
                          const std::vector<Rational>& b, const std::vector<Rational>& c);

}  // namespace topodof
