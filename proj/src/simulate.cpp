#include "topodof/simulate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace topodof {

double gaussian_modulus_density_max() { return std::sqrt(2.0 / M_E); }

GainDistribution standard_complex_gaussian() {
  GainDistribution d;
  d.sample = [](SplitMix64& rng) { return rng.complex_gaussian(); };
  d.modulus_density_max = gaussian_modulus_density_max();
  return d;
}

namespace {

using CLD = std::complex<long double>;

// LU with partial pivoting over complex<long double>; the matching
// submatrices are tiny, and the extra precision keeps the full-system
// residuals comfortably below the 1e-9 gate even for ill-conditioned draws.
struct SmallLU {
  std::size_t n = 0;
  std::vector<CLD> a;  // row-major factors
  std::vector<std::size_t> perm;
  bool singular = false;

  explicit SmallLU(std::vector<CLD> matrix, std::size_t size) : n(size), a(std::move(matrix)) {
    perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t best = col;
      long double best_mag = std::abs(a[perm[col] * n + col]);
      for (std::size_t r = col + 1; r < n; ++r) {
        long double mag = std::abs(a[perm[r] * n + col]);
        if (mag > best_mag) {
          best_mag = mag;
          best = r;
        }
      }
      if (best_mag < 1e-300L) {
        singular = true;
        return;
      }
      std::swap(perm[col], perm[best]);
      CLD pivot = a[perm[col] * n + col];
      for (std::size_t r = col + 1; r < n; ++r) {
        CLD f = a[perm[r] * n + col] / pivot;
        a[perm[r] * n + col] = f;
        for (std::size_t c = col + 1; c < n; ++c) a[perm[r] * n + c] -= f * a[perm[col] * n + c];
      }
    }
  }

  std::vector<CLD> solve(const std::vector<CLD>& b) const {
    std::vector<CLD> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      CLD s = b[perm[i]];
      for (std::size_t j = 0; j < i; ++j) s -= a[perm[i] * n + j] * y[j];
      y[i] = s;
    }
    std::vector<CLD> x(n);
    for (std::size_t i = n; i-- > 0;) {
      CLD s = y[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= a[perm[i] * n + j] * x[j];
      x[i] = s / a[perm[i] * n + i];
    }
    return x;
  }
};

// Maximum matching that covers `row`, if the drop-by-one condition holds:
// match everything except `row`, then augment from it.
struct CoveringMatching {
  bool ok = false;
  std::vector<int> match_of_col;
};

bool augment(std::size_t r, const std::vector<std::uint32_t>& rows, std::vector<int>& match,
             std::uint32_t& visited) {
  for (std::uint32_t rest = rows[r] & ~visited; rest; rest &= rest - 1) {
    std::size_t c = std::size_t(__builtin_ctz(rest));
    visited |= std::uint32_t(1) << c;
    if (match[c] < 0 || augment(std::size_t(match[c]), rows, match, visited)) {
      match[c] = int(r);
      return true;
    }
  }
  return false;
}

CoveringMatching covering_matching(const std::vector<std::uint32_t>& rows, std::size_t cols,
                                   std::size_t row) {
  CoveringMatching out;
  out.match_of_col.assign(cols, -1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r == row || rows[r] == 0) continue;
    std::uint32_t visited = 0;
    augment(r, rows, out.match_of_col, visited);
  }
  std::uint32_t visited = 0;
  out.ok = rows[row] != 0 && augment(row, rows, out.match_of_col, visited);
  return out;
}

}  // namespace

DecodeTrialResult decode_trial(const Topology& t, const TransmissionMatrix& tm,
                               std::uint64_t seed, const GainDistribution& dist) {
  DecodeTrialResult result;
  const std::size_t k = t.k();
  const std::size_t m = tm.m;
  const std::size_t n = tm.n;
  const std::size_t mk = m * k;
  SplitMix64 rng(seed);

  result.all_solved = true;
  for (std::size_t j = 0; j < k; ++j) {
    // One gain per (transmitter, receiver, slot); all symbol rows of a
    // transmitter share the slot's physical gain.
    std::vector<std::complex<double>> gain(k * n);
    for (std::size_t i = 0; i < k; ++i) {
      if (!t.get(i, j)) continue;
      for (std::size_t slot = 0; slot < n; ++slot) gain[i * n + slot] = dist.sample(rng);
    }
    std::vector<std::uint32_t> pattern = effective_rows(t, tm, j);
    std::vector<CLD> g(mk * n, CLD(0));
    for (std::size_t l = 0; l < mk; ++l) {
      if (pattern[l] == 0) continue;
      std::size_t i = l / m;
      for (std::size_t slot = 0; slot < n; ++slot)
        if ((pattern[l] >> slot) & 1U) g[l * n + slot] = CLD(gain[i * n + slot]);
    }

    for (std::size_t l = j * m; l < (j + 1) * m; ++l) {
      DecodeOutcome outcome;
      outcome.receiver = j;
      outcome.symbol_row = l;

      CoveringMatching cm = covering_matching(pattern, n, l);
      if (!cm.ok) {
        outcome.solved = false;
        outcome.residual = std::numeric_limits<double>::infinity();
        result.outcomes.push_back(outcome);
        result.all_solved = false;
        continue;
      }
      std::vector<std::size_t> mrows, mcols;
      for (std::size_t c = 0; c < n; ++c)
        if (cm.match_of_col[c] >= 0) {
          mcols.push_back(c);
          mrows.push_back(std::size_t(cm.match_of_col[c]));
        }
      std::sort(mrows.begin(), mrows.end());
      const std::size_t mu = mcols.size();

      std::vector<CLD> sub(mu * mu);
      std::size_t l_index = mu;
      for (std::size_t r = 0; r < mu; ++r) {
        if (mrows[r] == l) l_index = r;
        for (std::size_t c = 0; c < mu; ++c) sub[r * mu + c] = g[mrows[r] * n + mcols[c]];
      }
      assert(l_index < mu);

      SmallLU lu(sub, mu);
      if (lu.singular) {
        ++result.singular_events;
        outcome.solved = false;
        outcome.residual = std::numeric_limits<double>::infinity();
        result.outcomes.push_back(outcome);
        result.all_solved = false;
        continue;
      }
      std::vector<CLD> rhs(mu, CLD(0));
      rhs[l_index] = CLD(1);
      std::vector<CLD> u_sub = lu.solve(rhs);
      // One refinement pass keeps the residual near working precision.
      {
        std::vector<CLD> resid(mu, CLD(0));
        for (std::size_t r = 0; r < mu; ++r) {
          CLD s(0);
          for (std::size_t c = 0; c < mu; ++c) s += sub[r * mu + c] * u_sub[c];
          resid[r] = s - rhs[r];
        }
        std::vector<CLD> corr = lu.solve(resid);
        for (std::size_t c = 0; c < mu; ++c) u_sub[c] -= corr[c];
      }

      std::vector<CLD> u(n, CLD(0));
      for (std::size_t c = 0; c < mu; ++c) u[mcols[c]] = u_sub[c];

      long double residual = 0.0L;
      long double norm_sq = 0.0L;
      for (std::size_t c = 0; c < n; ++c) norm_sq += std::norm(u[c]);
      for (std::size_t r = 0; r < mk; ++r) {
        CLD s(0);
        if (pattern[r] != 0)
          for (std::size_t c = 0; c < n; ++c) s += g[r * n + c] * u[c];
        if (r == l) s -= CLD(1);
        residual = std::max(residual, (long double)std::abs(s));
      }
      outcome.residual = double(residual);
      outcome.norm_sq = double(norm_sq);
      outcome.solved = outcome.residual < 1e-9;
      if (!outcome.solved) result.all_solved = false;
      result.max_residual = std::max(result.max_residual, outcome.residual);
      result.outcomes.push_back(outcome);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

namespace {

// Numeric rank with relative tolerance via row elimination with partial
// pivoting (matrices here are at most 7x7).
std::size_t numeric_rank(std::vector<std::complex<double>> a, std::size_t rows,
                         std::size_t cols, double tol) {
  double scale = 0.0;
  for (const auto& x : a) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0;
  std::size_t rank_count = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t best = row;
    double best_mag = std::abs(a[row * cols + col]);
    for (std::size_t r = row + 1; r < rows; ++r) {
      double mag = std::abs(a[r * cols + col]);
      if (mag > best_mag) {
        best_mag = mag;
        best = r;
      }
    }
    if (best_mag <= tol * scale) continue;
    for (std::size_t c = 0; c < cols; ++c)
      std::swap(a[row * cols + c], a[best * cols + c]);
    std::complex<double> pivot = a[row * cols + col];
    for (std::size_t r = row + 1; r < rows; ++r) {
      std::complex<double> f = a[r * cols + col] / pivot;
      for (std::size_t c = col; c < cols; ++c) a[r * cols + c] -= f * a[row * cols + c];
    }
    ++row;
    ++rank_count;
  }
  return rank_count;
}

}  // namespace

OracleReport lemma_match_oracle(std::size_t trials, std::size_t max_rows, std::size_t max_cols,
                                std::uint64_t seed, const GainDistribution& dist) {
  OracleReport report;
  report.trials = trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    SplitMix64 rng(SplitMix64::mix(seed, trial));
    std::size_t r = 1 + std::size_t(rng.below(max_rows));
    std::size_t c = 1 + std::size_t(rng.below(max_cols));
    std::vector<std::uint32_t> rows(r, 0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (rng.uniform() < 0.5) rows[i] |= std::uint32_t(1) << j;
    std::size_t l = std::size_t(rng.below(r));

    bool predicted = matching_drop_one(rows, c, l);
    if (predicted) ++report.predicate_true;

    // Numeric side: solvability of T~ u = e_l with random gains on the
    // support, i.e. e_l in the column space of T~.
    std::vector<std::complex<double>> mat(r * (c + 1));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        mat[i * (c + 1) + j] =
            ((rows[i] >> j) & 1U) ? dist.sample(rng) : std::complex<double>(0.0);
    std::vector<std::complex<double>> plain(r * c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) plain[i * c + j] = mat[i * (c + 1) + j];
    mat[l * (c + 1) + c] = 1.0;

    std::size_t rank_plain = numeric_rank(plain, r, c, 1e-7);
    std::size_t rank_aug = numeric_rank(mat, r, c + 1, 1e-7);
    bool solvable = rank_plain == rank_aug;

    if (solvable != predicted) ++report.disagreements;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Norm statistics
// ---------------------------------------------------------------------------

LogNormStats log_norm_estimate(const Topology& t, const TransmissionMatrix& tm,
                               std::size_t trials, std::uint64_t seed,
                               const GainDistribution& dist) {
  LogNormStats stats;
  double sum = 0.0;
  stats.max = -std::numeric_limits<double>::infinity();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    DecodeTrialResult r = decode_trial(t, tm, SplitMix64::mix(seed, trial), dist);
    for (const DecodeOutcome& o : r.outcomes) {
      if (!o.solved) {
        ++stats.unsolved;
        continue;
      }
      double v = std::log(o.norm_sq);
      if (!std::isfinite(v)) {
        stats.all_finite = false;
        continue;
      }
      sum += v;
      stats.max = std::max(stats.max, v);
      ++stats.samples;
    }
  }
  stats.mean = stats.samples ? sum / double(stats.samples) : 0.0;
  return stats;
}

// ---------------------------------------------------------------------------
// Polynomial tail checks
// ---------------------------------------------------------------------------

double poly_tail_bound(std::size_t n_vars, double eps, double f_max) {
  if (eps <= 0.0) return 0.0;
  double root = std::pow(eps, 1.0 / std::pow(2.0, double(n_vars) - 1.0));
  return std::pow(2.0, double(n_vars) + 1.0) * f_max * root;
}

double poly_small_probability(const MultilinearPoly& poly, double eps, std::size_t trials,
                              std::uint64_t seed, const GainDistribution& dist) {
  SplitMix64 rng(seed);
  std::size_t hits = 0;
  std::vector<std::complex<double>> x(poly.n_vars);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (auto& xi : x) xi = dist.sample(rng);
    std::complex<double> value(0.0);
    for (const auto& [mask, coeff] : poly.terms) {
      std::complex<double> term = coeff;
      for (std::uint32_t rest = mask; rest; rest &= rest - 1)
        term *= x[std::size_t(__builtin_ctz(rest))];
      value += term;
    }
    if (std::abs(value) <= eps) ++hits;
  }
  return double(hits) / double(trials);
}

PolyTailReport poly_tail_check(std::size_t n_vars, std::size_t trials,
                               const std::vector<double>& epsilons, std::uint64_t seed,
                               const GainDistribution& dist) {
  if (n_vars == 0 || n_vars > 4)
    throw std::invalid_argument("poly_tail_check: n_vars must be in [1,4]");
  PolyTailReport report;
  const std::size_t polys = 12;
  const std::uint32_t all_masks = std::uint32_t(1) << n_vars;
  for (std::size_t p = 0; p < polys; ++p) {
    SplitMix64 rng(SplitMix64::mix(seed, p));
    MultilinearPoly poly;
    poly.n_vars = n_vars;
    std::size_t m_terms = 1 + std::size_t(rng.below(all_masks));
    std::vector<std::uint32_t> masks(all_masks);
    for (std::uint32_t i = 0; i < all_masks; ++i) masks[i] = i;
    for (std::size_t i = 0; i + 1 < masks.size(); ++i)
      std::swap(masks[i], masks[i + std::size_t(rng.below(masks.size() - i))]);
    for (std::size_t i = 0; i < m_terms; ++i) {
      double mag = 1.0 + 2.0 * rng.uniform();
      double phase = 2.0 * M_PI * rng.uniform();
      poly.terms.emplace_back(masks[i],
                              std::polar(mag, phase));
    }
    for (double eps : epsilons) {
      double p_hat =
          poly_small_probability(poly, eps, trials, SplitMix64::mix(seed, 1000 + p), dist);
      double bound = poly_tail_bound(n_vars, eps, dist.modulus_density_max);
      ++report.checks;
      if (bound >= 1.0) continue;  // vacuous region always passes
      double sigma = std::sqrt(std::max(bound * (1.0 - bound), 1e-12) / double(trials));
      if (p_hat > bound + 3.0 * sigma) ++report.violations;
    }
  }
  return report;
}

}  // namespace topodof
