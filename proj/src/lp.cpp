#include "topodof/lp.hpp"

#include <stdexcept>

namespace topodof {

SimplexResult simplex_max(const std::vector<std::vector<Rational>>& a,
                          const std::vector<Rational>& b, const std::vector<Rational>& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw std::invalid_argument("simplex_max: b size mismatch");
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("simplex_max: A shape mismatch");
  for (const auto& bi : b)
    if (bi < Rational(0)) throw std::invalid_argument("simplex_max: b must be nonnegative");

  // Tableau: columns [x_0..x_{n-1} | s_0..s_{m-1} | rhs].
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<Rational>> tab(m, std::vector<Rational>(cols));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab[i][j] = a[i][j];
    tab[i][n + i] = Rational(1);
    tab[i][cols - 1] = b[i];
  }
  // Reduced-cost row r_j = c_j - z_j; rhs cell holds -objective.
  std::vector<Rational> cost(cols);
  for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  for (;;) {
    // Bland: entering = smallest column index with positive reduced cost.
    std::size_t enter = cols - 1;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      if (cost[j] > Rational(0)) {
        enter = j;
        break;
      }
    }
    if (enter == cols - 1) break;  // optimal

    // Ratio test; tie broken by smallest basis variable index (Bland).
    std::size_t leave = m;
    Rational best_ratio;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab[i][enter] > Rational(0)) {
        Rational ratio = tab[i][cols - 1] / tab[i][enter];
        if (leave == m || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave == m) throw std::runtime_error("simplex_max: unbounded");

    // Pivot.
    Rational inv = Rational(1) / tab[leave][enter];
    for (auto& x : tab[leave]) x *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || tab[i][enter].is_zero()) continue;
      Rational f = tab[i][enter];
      for (std::size_t j = 0; j < cols; ++j) tab[i][j] -= f * tab[leave][j];
    }
    if (!cost[enter].is_zero()) {
      Rational f = cost[enter];
      for (std::size_t j = 0; j < cols; ++j) cost[j] -= f * tab[leave][j];
    }
    basis[leave] = enter;
  }

  SimplexResult out;
  out.objective = -cost[cols - 1];
  out.primal.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) out.primal[basis[i]] = tab[i][cols - 1];
  out.dual.assign(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i) out.dual[i] = -cost[n + i];
  return out;
}

}  // namespace topodof
