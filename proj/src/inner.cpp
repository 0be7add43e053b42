#include "topodof/inner.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "topodof/lp.hpp"

namespace topodof {

// ---------------------------------------------------------------------------
// Transmission matrices
// ---------------------------------------------------------------------------

std::string TransmissionMatrix::malformed_reason() const {
  if (m == 0 || n == 0 || k == 0) return "m, n and k must be positive";
  if (n > 32) return "more than 32 slots unsupported";
  if (rows.size() != m * k) return "row count must equal m*K";
  for (std::size_t l = 0; l < rows.size(); ++l) {
    if (rows[l] >> n) return "row " + std::to_string(l) + " has bits beyond slot n";
    if (rows[l] == 0) return "symbol row " + std::to_string(l) + " is never sent";
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t slot = 0; slot < n; ++slot) {
      std::size_t ones = 0;
      for (std::size_t r = i * m; r < (i + 1) * m; ++r) ones += (rows[r] >> slot) & 1U;
      if (ones > 1)
        return "transmitter " + std::to_string(i) + " sends two symbols in slot " +
               std::to_string(slot);
    }
  }
  return "";
}

std::string TransmissionMatrix::to_json() const {
  nlohmann::json j;
  j["m"] = m;
  j["n"] = n;
  auto arr = nlohmann::json::array();
  for (std::uint32_t row : rows) {
    std::string bits(n, '0');
    for (std::size_t slot = 0; slot < n; ++slot)
      if ((row >> slot) & 1U) bits[slot] = '1';
    arr.push_back(bits);
  }
  j["rows"] = arr;
  return j.dump();
}

TransmissionMatrix TransmissionMatrix::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  TransmissionMatrix tm;
  tm.m = j.at("m").get<std::size_t>();
  tm.n = j.at("n").get<std::size_t>();
  const auto& arr = j.at("rows");
  if (tm.m == 0 || arr.size() % tm.m != 0)
    throw std::invalid_argument("transmission matrix: rows not divisible by m");
  tm.k = arr.size() / tm.m;
  for (const auto& rj : arr) {
    std::string bits = rj.get<std::string>();
    if (bits.size() != tm.n)
      throw std::invalid_argument("transmission matrix: row length must equal n");
    std::uint32_t row = 0;
    for (std::size_t slot = 0; slot < tm.n; ++slot) {
      if (bits[slot] != '0' && bits[slot] != '1')
        throw std::invalid_argument("transmission matrix: rows must be 0/1 strings");
      if (bits[slot] == '1') row |= std::uint32_t(1) << slot;
    }
    tm.rows.push_back(row);
  }
  return tm;
}

TransmissionMatrix TransmissionMatrix::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open transmission matrix file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::vector<std::uint32_t> effective_rows(const Topology& t, const TransmissionMatrix& tm,
                                          std::size_t receiver) {
  std::vector<std::uint32_t> rows(tm.rows.size(), 0);
  for (std::size_t l = 0; l < tm.rows.size(); ++l) {
    std::size_t transmitter = l / tm.m;
    if (t.get(transmitter, receiver)) rows[l] = tm.rows[l];
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Bipartite matching
// ---------------------------------------------------------------------------

namespace {

bool kuhn_augment(std::size_t r, const std::vector<std::uint32_t>& rows,
                  std::vector<int>& match_of_col, std::uint32_t& visited) {
  for (std::uint32_t rest = rows[r] & ~visited; rest; rest &= rest - 1) {
    std::size_t c = std::size_t(__builtin_ctz(rest));
    visited |= std::uint32_t(1) << c;
    if (match_of_col[c] < 0 ||
        kuhn_augment(std::size_t(match_of_col[c]), rows, match_of_col, visited)) {
      match_of_col[c] = int(r);
      return true;
    }
  }
  return false;
}

}  // namespace

std::size_t matching_number(const std::vector<std::uint32_t>& rows, std::size_t cols) {
  std::vector<int> match_of_col(cols, -1);
  std::size_t size = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::uint32_t visited = 0;
    if (rows[r] && kuhn_augment(r, rows, match_of_col, visited)) ++size;
  }
  return size;
}

bool matching_drop_one(const std::vector<std::uint32_t>& rows, std::size_t cols,
                       std::size_t row) {
  // Maximum matching of the graph without `row`, then one augmentation
  // attempt from `row`: it succeeds iff the full matching number is one
  // larger, i.e. iff removing the row loses a unit of matching.
  std::vector<int> match_of_col(cols, -1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r == row || rows[r] == 0) continue;
    std::uint32_t visited = 0;
    kuhn_augment(r, rows, match_of_col, visited);
  }
  std::uint32_t visited = 0;
  return rows[row] != 0 && kuhn_augment(row, rows, match_of_col, visited);
}

TmVerifyResult verify_transmission_matrix(const Topology& t, const TransmissionMatrix& tm) {
  TmVerifyResult out;
  if (tm.k != t.k()) {
    out.malformed = "matrix is for " + std::to_string(tm.k) + " users, topology has " +
                    std::to_string(t.k());
    return out;
  }
  out.malformed = tm.malformed_reason();
  if (!out.malformed.empty()) return out;

  for (std::size_t j = 0; j < t.k(); ++j) {
    std::vector<std::uint32_t> rows = effective_rows(t, tm, j);
    for (std::size_t l = j * tm.m; l < (j + 1) * tm.m; ++l)
      if (!matching_drop_one(rows, tm.n, l)) out.failures.emplace_back(j, l);
  }
  out.ok = out.failures.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Benchmarks
// ---------------------------------------------------------------------------

Rational rgc_bound(const Topology& t) {
  std::size_t max_degree = 0;
  for (std::size_t j = 0; j < t.k(); ++j)
    max_degree = std::max(max_degree, t.receiver_degree(j));
  return Rational(1, (long long)max_degree);
}

namespace {

// Bron-Kerbosch with pivoting over the "compatible" (non-adjacent) relation.
void bron_kerbosch(std::uint32_t r, std::uint32_t p, std::uint32_t x,
                   const std::vector<std::uint32_t>& compat,
                   std::vector<std::uint32_t>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  std::uint32_t px = p | x;
  std::size_t pivot = std::size_t(__builtin_ctz(px));
  std::size_t best_cover = 0;
  for (std::uint32_t rest = px; rest; rest &= rest - 1) {
    std::size_t v = std::size_t(__builtin_ctz(rest));
    std::size_t cover = std::size_t(__builtin_popcount(p & compat[v]));
    if (cover > best_cover) {
      best_cover = cover;
      pivot = v;
    }
  }
  std::uint32_t candidates = p & ~compat[pivot];
  for (std::uint32_t rest = candidates; rest; rest &= rest - 1) {
    std::size_t v = std::size_t(__builtin_ctz(rest));
    std::uint32_t vbit = std::uint32_t(1) << v;
    bron_kerbosch(r | vbit, p & compat[v], x & compat[v], compat, out);
    p &= ~vbit;
    x |= vbit;
  }
}

}  // namespace

std::vector<std::uint32_t> maximal_independent_sets(const ConflictGraph& g) {
  const std::size_t k = g.k();
  std::vector<std::uint32_t> compat(k);
  const std::uint32_t all = (k >= 32) ? ~0U : ((std::uint32_t(1) << k) - 1);
  for (std::size_t v = 0; v < k; ++v)
    compat[v] = all & ~g.neighbors(v) & ~(std::uint32_t(1) << v);
  std::vector<std::uint32_t> out;
  bron_kerbosch(0, all, 0, compat, out);
  std::sort(out.begin(), out.end());
  return out;
}

FractionalColoring fractional_chromatic(const ConflictGraph& g) {
  const std::size_t k = g.k();
  std::vector<std::uint32_t> sets = maximal_independent_sets(g);

  // Packing dual: maximize sum(y) subject to sum_{i in U} y_i <= 1 per
  // maximal independent set U. Its optimum equals the covering optimum
  // (the fractional chromatic number), and the shadow prices recover the
  // covering weights.
  std::vector<std::vector<Rational>> a(sets.size(), std::vector<Rational>(k, Rational(0)));
  for (std::size_t u = 0; u < sets.size(); ++u)
    for (std::size_t i = 0; i < k; ++i)
      if ((sets[u] >> i) & 1U) a[u][i] = Rational(1);
  std::vector<Rational> b(sets.size(), Rational(1));
  std::vector<Rational> c(k, Rational(1));
  SimplexResult lp = simplex_max(a, b, c);

  FractionalColoring out;
  out.chi_f = lp.objective;
  Rational total(0);
  std::vector<Rational> cover(k, Rational(0));
  for (std::size_t u = 0; u < sets.size(); ++u) {
    if (lp.dual[u].is_zero()) continue;
    out.weights.emplace_back(sets[u], lp.dual[u]);
    total += lp.dual[u];
    for (std::size_t i = 0; i < k; ++i)
      if ((sets[u] >> i) & 1U) cover[i] += lp.dual[u];
  }
  if (!(total == out.chi_f)) throw std::logic_error("fractional_chromatic: weight sum mismatch");
  for (std::size_t i = 0; i < k; ++i)
    if (cover[i] < Rational(1))
      throw std::logic_error("fractional_chromatic: vertex not covered by the weights");
  return out;
}

std::optional<TransmissionMatrix> coloring_embedding(const Topology& t,
                                                     const FractionalColoring& coloring,
                                                     std::size_t max_slots) {
  const std::size_t k = t.k();
  BigInt scale(1);
  for (const auto& [mask, w] : coloring.weights)
    scale = boost::multiprecision::lcm(scale, w.den());
  // Slot count = scale * chi_f; symbols per user = scale.
  BigInt slots_big = coloring.chi_f.num() * (scale / coloring.chi_f.den());
  if (scale > 64 || slots_big > (long long)max_slots) return std::nullopt;
  std::size_t symbols = scale.convert_to<std::size_t>();
  std::size_t slots = slots_big.convert_to<std::size_t>();

  TransmissionMatrix tm;
  tm.m = symbols;
  tm.n = slots;
  tm.k = k;
  tm.rows.assign(symbols * k, 0);
  std::vector<std::size_t> sent(k, 0);
  std::size_t slot = 0;
  for (const auto& [mask, w] : coloring.weights) {
    BigInt reps_big = w.num() * (scale / w.den());
    std::size_t reps = reps_big.convert_to<std::size_t>();
    for (std::size_t r = 0; r < reps; ++r, ++slot) {
      for (std::size_t i = 0; i < k; ++i) {
        if (!((mask >> i) & 1U) || sent[i] >= symbols) continue;
        tm.rows[i * symbols + sent[i]] |= std::uint32_t(1) << slot;
        ++sent[i];
      }
    }
  }
  assert(slot == slots);
  for (std::size_t i = 0; i < k; ++i)
    if (sent[i] < symbols) return std::nullopt;  // coverage shortfall cannot happen
  return tm;
}

TransmissionMatrix tdma_matrix(const Topology& t) {
  TransmissionMatrix tm;
  tm.m = 1;
  tm.n = t.k();
  tm.k = t.k();
  for (std::size_t i = 0; i < t.k(); ++i) tm.rows.push_back(std::uint32_t(1) << i);
  return tm;
}

// ---------------------------------------------------------------------------
// Structured repetition coding search
// ---------------------------------------------------------------------------

namespace {

// Transmitters are assigned in an order that completes receiver
// in-neighborhoods early, so the per-receiver matching conditions start
// pruning as soon as possible.
std::vector<std::size_t> assignment_order(const Topology& t) {
  const std::size_t k = t.k();
  std::vector<std::size_t> order;
  std::vector<bool> assigned(k, false);
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = k;
    long best_score = -1;
    for (std::size_t cand = 0; cand < k; ++cand) {
      if (assigned[cand]) continue;
      long completed = 0;
      for (std::size_t j = 0; j < k; ++j) {
        bool complete = true;
        bool involves = false;
        for (std::size_t i = 0; i < k; ++i) {
          if (!t.get(i, j)) continue;
          if (i == cand) involves = true;
          if (!assigned[i] && i != cand) complete = false;
        }
        if (involves && complete) ++completed;
      }
      if (completed > best_score) {
        best_score = completed;
        best = cand;
      }
    }
    order.push_back(best);
    assigned[best] = true;
  }
  return order;
}

struct PairSearcher {
  const Topology& topo;
  std::size_t k, m, n;
  std::uint64_t* budget;
  bool* budget_hit;

  std::vector<std::size_t> order;          // transmitter assignment order
  std::vector<std::size_t> depth_of;       // transmitter -> depth
  std::vector<std::vector<std::uint8_t>> sched;  // per depth, slot -> 0..m
  std::vector<std::vector<std::uint8_t>> groups;  // per depth, slot -> group id
  // Receivers that hear the transmitter at each depth and already have an
  // assigned interferer, for the mid-schedule interference prune.
  std::vector<std::vector<std::size_t>> watch;
  std::optional<TransmissionMatrix> found;

  PairSearcher(const Topology& t, std::size_t m_, std::size_t n_, std::uint64_t* budget_,
               bool* hit_)
      : topo(t), k(t.k()), m(m_), n(n_), budget(budget_), budget_hit(hit_) {
    order = assignment_order(t);
    depth_of.assign(k, 0);
    for (std::size_t d = 0; d < k; ++d) depth_of[order[d]] = d;
    sched.assign(k, std::vector<std::uint8_t>(n, 0));
    groups.assign(k + 1, std::vector<std::uint8_t>(n, 0));
    watch.assign(k, {});
    for (std::size_t d = 0; d < k; ++d) {
      std::size_t tx = order[d];
      for (std::size_t j = 0; j < k; ++j) {
        if (j == tx || !topo.get(tx, j)) continue;
        for (std::size_t e = 0; e < d; ++e) {
          std::size_t other = order[e];
          if (other != j && topo.get(other, j)) {
            watch[d].push_back(j);
            break;
          }
        }
      }
    }
  }

  // Lower bound on the interference matching at receiver j while the
  // transmitter at `depth` is still mid-schedule: completed interferers'
  // rows plus the partial rows placed so far. The matching only grows as
  // slots fill in, so exceeding n - m here is already fatal.
  bool interference_fits(std::size_t depth, std::size_t j) {
    std::vector<std::uint32_t> rows;
    for (std::size_t d = 0; d <= depth; ++d) {
      std::size_t i = order[d];
      if (i == j || !topo.get(i, j)) continue;
      for (std::size_t r = 0; r < m; ++r) {
        std::uint32_t mask = 0;
        for (std::size_t slot = 0; slot < n; ++slot)
          if (sched[d][slot] == r + 1) mask |= std::uint32_t(1) << slot;
        if (mask) rows.push_back(mask);
      }
    }
    return matching_number(rows, n) + m <= n;
  }

  // Per-receiver matching conditions on the partially assigned matrix.
  // Two prunes, both permanent as more rows arrive:
  //  - the feasibility target needs every own row essential, which forces
  //    mu(full) = m + mu(interference rows); mu(interference) only grows
  //    with assignments and mu(full) <= n, so mu(assigned interference)
  //    above n - m is fatal;
  //  - once an own-symbol row fails the drop-by-one test it can never
  //    recover (adding rows cannot make an inessential row essential).
  bool partial_ok(std::size_t depth) {
    std::size_t just = order[depth];
    for (std::size_t j = 0; j < k; ++j) {
      if (!topo.get(just, j)) continue;
      std::vector<std::uint32_t> rows(m * k, 0);
      std::vector<std::uint32_t> interference;
      for (std::size_t d = 0; d <= depth; ++d) {
        std::size_t i = order[d];
        if (!topo.get(i, j)) continue;
        for (std::size_t slot = 0; slot < n; ++slot) {
          std::uint8_t v = sched[d][slot];
          if (v != 0) rows[i * m + (v - 1)] |= std::uint32_t(1) << slot;
        }
        if (i != j)
          for (std::size_t r = 0; r < m; ++r) interference.push_back(rows[i * m + r]);
      }
      if (!interference.empty() && matching_number(interference, n) + m > n) return false;
      if (depth_of[j] > depth) continue;  // own transmitter not assigned yet
      for (std::size_t l = j * m; l < (j + 1) * m; ++l)
        if (!matching_drop_one(rows, n, l)) return false;
    }
    return true;
  }

  void refine_groups(std::size_t depth) {
    // Slots remain interchangeable only while their value prefixes agree.
    std::vector<std::uint8_t>& next = groups[depth + 1];
    std::vector<std::pair<std::uint16_t, std::uint8_t>> key_to_id;
    for (std::size_t slot = 0; slot < n; ++slot) {
      std::uint16_t key =
          std::uint16_t(groups[depth][slot]) << 8 | std::uint16_t(sched[depth][slot]);
      std::uint8_t id = 255;
      for (auto& [kk, vv] : key_to_id)
        if (kk == key) {
          id = vv;
          break;
        }
      if (id == 255) {
        id = std::uint8_t(key_to_id.size());
        key_to_id.emplace_back(key, id);
      }
      next[slot] = id;
    }
  }

  bool dfs(std::size_t depth) {
    if (depth == k) {
      TransmissionMatrix tm;
      tm.m = m;
      tm.n = n;
      tm.k = k;
      tm.rows.assign(m * k, 0);
      for (std::size_t d = 0; d < k; ++d) {
        std::size_t i = order[d];
        for (std::size_t slot = 0; slot < n; ++slot) {
          std::uint8_t v = sched[d][slot];
          if (v != 0) tm.rows[i * m + (v - 1)] |= std::uint32_t(1) << slot;
        }
      }
      if (verify_transmission_matrix(topo, tm).ok) {
        found = tm;
        return true;
      }
      return false;
    }
    return gen_schedule(depth, 0, 0);
  }

  // Enumerates canonical schedules for the transmitter at `depth` slot by
  // slot: symbol labels appear in first-use order, and within each group of
  // interchangeable slots the digits are non-increasing (full symbol order
  // at depth 0, occupied-before-silent at later depths where relabeling
  // would otherwise interfere).
  bool gen_schedule(std::size_t depth, std::size_t slot, std::size_t seen_max) {
    if (*budget == 0) {
      *budget_hit = true;
      return false;
    }
    --*budget;
    if (slot == n) {
      if (seen_max != m) return false;
      if (!partial_ok(depth)) return false;
      refine_groups(depth);
      return dfs(depth + 1);
    }
    // Remaining slots must still be able to introduce the missing symbols.
    std::size_t missing_floor = m - seen_max;
    if (missing_floor > n - slot) return false;

    std::size_t limit = std::min(seen_max + 1, m);
    for (std::size_t v = 0; v <= limit; ++v) {
      if (v == 0 && missing_floor == n - slot) continue;
      // Group ordering against the previous slot of the same group.
      bool ok = true;
      for (std::size_t prev = slot; prev-- > 0;) {
        if (groups[depth][prev] != groups[depth][slot]) continue;
        std::size_t pv = sched[depth][prev];
        if (depth == 0) {
          std::size_t dig_prev = pv == 0 ? 0 : m + 1 - pv;
          std::size_t dig_cur = v == 0 ? 0 : m + 1 - v;
          ok = dig_cur <= dig_prev;
        } else {
          ok = !(pv == 0 && v != 0);  // occupied slots come first in a group
        }
        break;
      }
      if (!ok) continue;
      sched[depth][slot] = std::uint8_t(v);
      bool viable = true;
      if (v != 0 && !watch[depth].empty()) {
        for (std::size_t j : watch[depth]) {
          if (!interference_fits(depth, j)) {
            viable = false;
            break;
          }
        }
      }
      if (viable && gen_schedule(depth, slot + 1, std::max(seen_max, v))) return true;
      if (*budget_hit) return false;
    }
    sched[depth][slot] = 0;
    return false;
  }
};

}  // namespace

SrcSearchResult src_search(const Topology& t, const SrcSearchConfig& cfg) {
  if (auto bad = validate(t))
    throw std::invalid_argument("src_search: diagonal zero at user " + std::to_string(*bad));
  const std::size_t k = t.k();
  const std::size_t n_max = cfg.n_max == 0 ? k + 1 : cfg.n_max;
  if (n_max > 32) throw std::invalid_argument("src_search: n_max above 32 unsupported");

  // Any receiver with an interferer caps the ratio at 1/2: the interferer's
  // m rows are pairwise slot-disjoint, so the interference part of the
  // effective matrix alone matches m columns, and decodability needs
  // mu(full) = m + mu(interference) <= n.
  bool has_interference = false;
  for (std::size_t j = 0; j < k && !has_interference; ++j)
    if (t.receiver_degree(j) > 1) has_interference = true;

  struct Pair {
    std::size_t m, n;
    Rational ratio;
  };
  std::vector<Pair> pairs;
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (std::size_t m = 1; m <= n; ++m) {
      Rational ratio((long long)m, (long long)n);
      if (ratio <= cfg.incumbent) continue;
      if (cfg.ratio_cap && ratio > *cfg.ratio_cap) continue;
      if (has_interference && ratio > Rational(1, 2)) continue;
      pairs.push_back({m, n, ratio});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.ratio != b.ratio) return b.ratio < a.ratio;
    return a.n < b.n;
  });

  SrcSearchResult out;
  for (const Pair& pair : pairs) {
    // The node budget applies per (m, n) pair: a cut on one pair marks the
    // result non-exhaustive but still lets lower ratios produce a valid
    // certificate, which is what makes a budget-capped value a sound lower
    // bound.
    std::uint64_t budget = cfg.node_budget;
    bool budget_hit = false;
    PairSearcher searcher(t, pair.m, pair.n, &budget, &budget_hit);
    bool ok = searcher.dfs(0);
    if (budget_hit) out.exhaustive = false;
    if (ok) {
      out.value = pair.ratio;
      out.matrix = searcher.found;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

InnerBoundsResult inner_bounds(const Topology& t, const InnerBoundsConfig& cfg) {
  InnerBoundsResult out;
  out.rgc = rgc_bound(t);
  out.coloring = fractional_chromatic(conflict_graph(t));
  out.ia = Rational(1) / out.coloring.chi_f;

  const std::size_t n_max = cfg.n_max == 0 ? t.k() + 1 : cfg.n_max;
  Rational base_value(0);
  std::optional<TransmissionMatrix> base_matrix;
  if (auto embed = coloring_embedding(t, out.coloring, n_max)) {
    base_value = embed->ratio();
    base_matrix = std::move(embed);
  } else if (t.k() <= n_max) {
    TransmissionMatrix tdma = tdma_matrix(t);
    base_value = tdma.ratio();
    base_matrix = std::move(tdma);
  }

  SrcSearchConfig scfg;
  scfg.n_max = n_max;
  scfg.node_budget = cfg.node_budget;
  scfg.incumbent = std::max(out.rgc, out.ia);
  scfg.ratio_cap = cfg.src_ratio_cap;
  SrcSearchResult search = src_search(t, scfg);
  out.src_exhaustive = search.exhaustive;

  if (search.matrix && search.value > base_value) {
    out.src = search.value;
    out.src_matrix = std::move(search.matrix);
  } else {
    out.src = base_value;
    out.src_matrix = std::move(base_matrix);
  }
  out.best = std::max({out.rgc, out.ia, out.src});
  return out;
}

}  // namespace topodof
