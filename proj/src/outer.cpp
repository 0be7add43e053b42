#include "topodof/outer.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace topodof {

namespace {

// Per-subset working state for the integer fast path: the sub-adjacency
// columns of M^S by position, plus ready-made sign targets.
struct SubsetContext {
  std::size_t s = 0;
  std::vector<std::size_t> users;  // ascending user ids
  std::vector<std::vector<std::int64_t>> mcol;
  std::vector<SignConstrainedTarget> target;
};

SubsetContext make_context(const Topology& t, const std::vector<std::size_t>& users) {
  SubsetContext ctx;
  ctx.s = users.size();
  ctx.users = users;
  ctx.mcol.resize(ctx.s);
  ctx.target.resize(ctx.s);
  for (std::size_t p = 0; p < ctx.s; ++p) {
    std::vector<std::int64_t> col(ctx.s, 0);
    std::vector<bool> pat(ctx.s, false);
    for (std::size_t q = 0; q < ctx.s; ++q) {
      bool bit = t.get(users[q], users[p]);
      col[q] = bit ? 1 : 0;
      pat[q] = bit;
    }
    ctx.mcol[p] = std::move(col);
    ctx.target[p] = SignConstrainedTarget{std::move(pat), p};
  }
  return ctx;
}

struct IntClosure {
  std::vector<std::size_t> order_pos;
  std::vector<std::vector<std::int64_t>> witnesses;
  std::uint32_t decoded = 0;
  bool complete = false;
};

// Greedy fixed point over the positions in `universe`; identity columns of
// decoded users join the span immediately, so one decodable user never
// blocks another (membership is monotone in the span).
IntClosure closure_int(const SubsetContext& ctx, std::uint32_t universe,
                       const std::vector<const std::vector<std::int64_t>*>& base) {
  IntClosure out;
  IntSpanBasis basis(ctx.s);
  for (const auto* col : base) basis.add(*col);

  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t p = 0; p < ctx.s; ++p) {
      if (!((universe >> p) & 1U) || ((out.decoded >> p) & 1U)) continue;
      if (auto w = sign_member_int(ctx.target[p], basis)) {
        out.decoded |= 1U << p;
        out.order_pos.push_back(p);
        out.witnesses.push_back(std::move(*w));
        std::vector<std::int64_t> unit(ctx.s, 0);
        unit[p] = 1;
        basis.add(unit);
        progress = true;
      }
    }
  }
  out.complete = out.decoded == universe;
  return out;
}

std::uint32_t full_mask(std::size_t s) { return s >= 32 ? ~0U : ((std::uint32_t(1) << s) - 1); }

RatVector to_rational(const std::vector<std::int64_t>& v) {
  RatVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rational(v[i]);
  return out;
}

// Descending-size, lexicographic-within-size combination walk used by the
// fractional search; `fn` gets position subsets of `pool` and returns true
// to stop.
bool for_each_combination(const std::vector<std::size_t>& pool, std::size_t size,
                          const std::function<bool(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(size);
  for (std::size_t i = 0; i < size; ++i) idx[i] = i;
  std::vector<std::size_t> chosen(size);
  for (;;) {
    for (std::size_t i = 0; i < size; ++i) chosen[i] = pool[idx[i]];
    if (fn(chosen)) return true;
    std::size_t i = size;
    while (i > 0) {
      --i;
      if (idx[i] != i + pool.size() - size) {
        ++idx[i];
        for (std::size_t j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return false;
    }
    if (size == 0) return false;
  }
}

struct FractionalInternal {
  std::size_t count = 0;
  std::vector<std::size_t> sprime_pos;
  std::vector<std::size_t> order_pos;
};

FractionalInternal fractional_max_int(const SubsetContext& ctx,
                                      const std::vector<std::int64_t>& c) {
  std::vector<std::size_t> zeros;
  for (std::size_t p = 0; p < ctx.s; ++p)
    if (c[p] == 0) zeros.push_back(p);

  FractionalInternal best;
  for (std::size_t size = zeros.size(); size >= 1; --size) {
    bool found = for_each_combination(zeros, size, [&](const std::vector<std::size_t>& sp) {
      std::vector<std::int64_t> base = c;
      std::uint32_t universe = 0;
      for (std::size_t p : sp) {
        base[p] += 1;
        universe |= 1U << p;
      }
      IntClosure cl = closure_int(ctx, universe, {&base});
      if (!cl.complete) return false;
      best.count = size;
      best.sprime_pos = sp;
      best.order_pos = cl.order_pos;
      return true;
    });
    if (found) break;
    if (size == 1) break;
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public exact-rational operations
// ---------------------------------------------------------------------------

ClosureResult decoding_closure(const Topology& t, const std::vector<std::size_t>& subset,
                               const RatMatrix& base) {
  if (base.rows() != subset.size())
    throw std::invalid_argument("decoding_closure: base rows must equal |S|");
  SubsetContext ctx = make_context(t, subset);

  SpanBasis basis(ctx.s);
  for (std::size_t c = 0; c < base.cols(); ++c) basis.add(base.column(c));

  ClosureResult out;
  std::vector<bool> done(ctx.s, false);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t p = 0; p < ctx.s; ++p) {
      if (done[p]) continue;
      if (auto w = sign_member(ctx.target[p], basis)) {
        done[p] = true;
        out.order.push_back(subset[p]);
        out.witnesses.push_back(std::move(*w));
        RatVector unit(ctx.s);
        unit[p] = Rational(1);
        basis.add(unit);
        progress = true;
      }
    }
  }
  for (std::size_t p = 0; p < ctx.s; ++p)
    if (done[p]) out.decoded.push_back(subset[p]);
  out.complete = out.decoded.size() == subset.size();
  return out;
}

std::optional<GeneratorCertificate> is_generator(const Topology& t,
                                                 const std::vector<std::size_t>& subset,
                                                 const RatMatrix& columns) {
  ClosureResult cl = decoding_closure(t, subset, columns);
  if (!cl.complete) return std::nullopt;
  GeneratorCertificate cert;
  cert.subset = subset;
  cert.columns = columns;
  cert.decode_order = cl.order;
  cert.witnesses = cl.witnesses;
  return cert;
}

FractionalSearchResult fractional_generator_max(const Topology& t,
                                                const std::vector<std::size_t>& subset,
                                                const std::vector<int>& c) {
  if (c.size() != subset.size())
    throw std::invalid_argument("fractional_generator_max: column size must equal |S|");
  SubsetContext ctx = make_context(t, subset);
  std::vector<std::int64_t> col(c.begin(), c.end());
  FractionalInternal fi = fractional_max_int(ctx, col);
  FractionalSearchResult out;
  out.count = fi.count;
  for (std::size_t p : fi.sprime_pos) out.sprime.push_back(subset[p]);
  for (std::size_t p : fi.order_pos) out.order.push_back(subset[p]);
  return out;
}

// ---------------------------------------------------------------------------
// Search driver
// ---------------------------------------------------------------------------

namespace {

struct PoolColumn {
  std::vector<std::int64_t> values;
  std::size_t zeros = 0;  // candidate budget for the fractional term
};

// Candidate generator columns for one subset S. The default family is the
// sub-adjacency columns themselves; the extended family adds every variant
// with a single support entry flipped to -1 (deduplicated up to negation).
std::vector<PoolColumn> build_pool(const SubsetContext& ctx, GeneratorFamily family) {
  std::vector<PoolColumn> pool;
  auto push_unique = [&](std::vector<std::int64_t> v) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] != 0) {
        if (v[j] < 0)
          for (auto& x : v) x = -x;
        break;
      }
    }
    for (const auto& p : pool)
      if (p.values == v) return;
    std::size_t z = 0;
    for (auto x : v)
      if (x == 0) ++z;
    pool.push_back(PoolColumn{std::move(v), z});
  };

  for (std::size_t p = 0; p < ctx.s; ++p) push_unique(ctx.mcol[p]);
  if (family == GeneratorFamily::extended_signed) {
    for (std::size_t p = 0; p < ctx.s; ++p) {
      for (std::size_t q = 0; q < ctx.s; ++q) {
        if (ctx.mcol[p][q] == 0) continue;
        auto v = ctx.mcol[p];
        v[q] = -1;
        push_unique(std::move(v));
      }
    }
  }
  return pool;
}

}  // namespace

OuterBoundResult outer_bound(const Topology& t, const OuterSearchConfig& cfg) {
  if (auto bad = validate(t))
    throw std::invalid_argument("outer_bound: diagonal zero at user " + std::to_string(*bad));
  const std::size_t k = t.k();

  struct BestState {
    bool set = false;
    Rational value;
    std::vector<std::size_t> users;
    std::vector<std::size_t> pool_pick;  // indices into the pool for that S
    GeneratorFamily family;
  } best;

  bool exhaustive = true;

  // Subsets by size descending (larger subsets can reach smaller ratios),
  // numeric mask order within a size; generator column subsets by size
  // ascending, lexicographic. First strict improvement wins ties, so the
  // certificate choice is deterministic.
  for (std::size_t size = k; size >= 1; --size) {
    if (best.set) {
      // Any value from subsets of this size is at least 1/(2s-1)
      // (one column, at most s-1 fractional users); sizes only shrink from
      // here, so stop once even that cannot improve.
      Rational floor_val = cfg.theorem1_only ? Rational(1, (long long)size)
                                             : Rational(1, 2 * (long long)size - 1);
      if (floor_val >= best.value) break;
    }
    for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
      if (__builtin_popcount(mask) != (int)size) continue;
      std::vector<std::size_t> users;
      for (std::size_t i = 0; i < k; ++i)
        if ((mask >> i) & 1U) users.push_back(i);

      SubsetContext ctx = make_context(t, users);
      std::vector<PoolColumn> pool = build_pool(ctx, cfg.family);
      std::size_t pool_n = pool.size();
      if (cfg.max_columns != 0 && pool_n > cfg.max_columns) {
        pool_n = cfg.max_columns;
        exhaustive = false;
      }

      std::vector<int> n_cache(pool_n, -1);  // fractional counts, lazily filled
      std::vector<std::uint64_t> known_generators;
      std::vector<std::uint64_t> known_nongenerators;
      const std::uint32_t universe = full_mask(ctx.s);

      std::vector<std::size_t> all_idx(pool_n);
      for (std::size_t i = 0; i < pool_n; ++i) all_idx[i] = i;

      for (std::size_t a = 1; a <= std::min(pool_n, ctx.s); ++a) {
        if (cfg.theorem1_only && best.set && Rational((long long)a, (long long)size) >= best.value)
          break;  // a/s only grows with a

        for_each_combination(all_idx, a, [&](const std::vector<std::size_t>& pick) {
          std::uint64_t amask = 0;
          for (std::size_t i : pick) amask |= std::uint64_t(1) << i;

          // Value floor using cached fractional counts where available.
          if (best.set) {
            std::size_t fr_ub = 0;
            if (!cfg.theorem1_only)
              for (std::size_t i : pick)
                fr_ub += n_cache[i] >= 0 ? std::size_t(n_cache[i]) : pool[i].zeros;
            if (Rational((long long)a, (long long)(size + fr_ub)) >= best.value) return false;
          }

          // Generator test with up-set / down-set caching: supersets of a
          // known generator generate; subsets of a known non-generator don't.
          int isgen = -1;
          for (std::uint64_t g : known_generators)
            if ((amask & g) == g) {
              isgen = 1;
              break;
            }
          if (isgen < 0)
            for (std::uint64_t ng : known_nongenerators)
              if ((amask | ng) == ng) {
                isgen = 0;
                break;
              }
          if (isgen < 0) {
            std::vector<const std::vector<std::int64_t>*> base;
            for (std::size_t i : pick) base.push_back(&pool[i].values);
            IntClosure cl = closure_int(ctx, universe, base);
            isgen = cl.complete ? 1 : 0;
            if (cl.complete)
              known_generators.push_back(amask);
            else
              known_nongenerators.push_back(amask);
          }
          if (isgen != 1) return false;

          Rational value;
          if (cfg.theorem1_only) {
            value = Rational((long long)a, (long long)size);
          } else {
            std::size_t fsum = 0;
            for (std::size_t i : pick) {
              if (n_cache[i] < 0)
                n_cache[i] = (int)fractional_max_int(ctx, pool[i].values).count;
              fsum += std::size_t(n_cache[i]);
            }
            value = Rational((long long)a, (long long)(size + fsum));
          }
          if (!best.set || value < best.value) {
            best.set = true;
            best.value = value;
            best.users = users;
            best.pool_pick = pick;
            best.family = cfg.family;
          }
          return false;
        });
      }
    }
  }

  assert(best.set);  // singletons always produce a generator

  // Rebuild the winning certificate with witnesses and fractional details.
  SubsetContext ctx = make_context(t, best.users);
  std::vector<PoolColumn> pool = build_pool(ctx, cfg.family);
  std::vector<const std::vector<std::int64_t>*> base;
  for (std::size_t i : best.pool_pick) base.push_back(&pool[i].values);
  IntClosure cl = closure_int(ctx, full_mask(ctx.s), base);
  assert(cl.complete);

  GeneratorCertificate cert;
  cert.subset = best.users;
  cert.columns = RatMatrix(ctx.s, best.pool_pick.size());
  for (std::size_t c = 0; c < best.pool_pick.size(); ++c)
    for (std::size_t r = 0; r < ctx.s; ++r)
      cert.columns.at(r, c) = Rational(pool[best.pool_pick[c]].values[r]);
  for (std::size_t p : cl.order_pos) cert.decode_order.push_back(best.users[p]);
  for (const auto& w : cl.witnesses) cert.witnesses.push_back(to_rational(w));
  if (!cfg.theorem1_only) {
    for (std::size_t c = 0; c < best.pool_pick.size(); ++c) {
      FractionalInternal fi = fractional_max_int(ctx, pool[best.pool_pick[c]].values);
      if (fi.count == 0) continue;
      FractionalPart part;
      part.column = c;
      for (std::size_t p : fi.sprime_pos) part.sprime.push_back(best.users[p]);
      for (std::size_t p : fi.order_pos) part.order.push_back(best.users[p]);
      cert.fractional.push_back(std::move(part));
    }
  }

  OuterBoundResult result;
  result.value = best.value;
  result.certificate = std::move(cert);
  result.family = cfg.family;
  result.exhaustive = exhaustive;

  std::string why;
  if (!verify_certificate(t, result.certificate, result.value, cfg.theorem1_only, &why))
    throw std::logic_error("outer_bound: certificate replay failed: " + why);
  return result;
}

// ---------------------------------------------------------------------------
// Certificate replay
// ---------------------------------------------------------------------------

namespace {

bool fail(std::string* error, const std::string& msg) {
  if (error) *error = msg;
  return false;
}

}  // namespace

bool verify_certificate(const Topology& t, const GeneratorCertificate& cert,
                        const Rational& claimed_value, bool theorem1_only,
                        std::string* error) {
  const auto& S = cert.subset;
  const std::size_t s = S.size();
  if (s == 0) return fail(error, "empty subset");
  for (std::size_t i = 0; i < s; ++i) {
    if (S[i] >= t.k()) return fail(error, "subset user out of range");
    if (i > 0 && S[i] <= S[i - 1]) return fail(error, "subset not strictly ascending");
  }
  if (cert.columns.rows() != s) return fail(error, "column dimension mismatch");
  const std::size_t r = cert.columns.cols();
  if (r == 0) return fail(error, "generator has no columns");
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t c = 0; c < r; ++c) {
      const Rational& e = cert.columns.at(i, c);
      if (!(e == Rational(0) || e == Rational(1) || e == Rational(-1)))
        return fail(error, "generator entry outside {0,+1,-1}");
    }

  auto pos_of = [&](std::size_t user) -> std::size_t {
    auto it = std::lower_bound(S.begin(), S.end(), user);
    return std::size_t(it - S.begin());
  };

  if (cert.decode_order.size() != s) return fail(error, "decode order must cover S");
  {
    auto sorted = cert.decode_order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != S) return fail(error, "decode order is not a permutation of S");
  }
  if (cert.witnesses.size() != s) return fail(error, "one witness required per decode step");

  // Replay the generator steps through the public rational path.
  SpanBasis basis(s);
  for (std::size_t c = 0; c < r; ++c) basis.add(cert.columns.column(c));
  for (std::size_t step = 0; step < s; ++step) {
    std::size_t user = cert.decode_order[step];
    std::size_t p = pos_of(user);
    if (p >= s || S[p] != user) return fail(error, "decode order user not in S");
    const RatVector& w = cert.witnesses[step];
    if (w.size() != s) return fail(error, "witness dimension mismatch");
    if (!basis.contains(w)) return fail(error, "witness not in span at its step");
    // Sign-tolerance constraints against the sub-adjacency column of `user`.
    for (std::size_t q = 0; q < s; ++q) {
      bool connected = t.get(S[q], user);
      if (q == p) {
        if (!(w[q] == Rational(1) || w[q] == Rational(-1)))
          return fail(error, "witness pivot magnitude must be one");
      } else if (connected) {
        if (!(w[q] == Rational(0) || w[q] == Rational(1) || w[q] == Rational(-1)))
          return fail(error, "witness support entry outside {0,+1,-1}");
      } else {
        if (!w[q].is_zero()) return fail(error, "witness nonzero off the target support");
      }
    }
    RatVector unit(s);
    unit[p] = Rational(1);
    basis.add(unit);
  }

  // Fractional parts.
  std::size_t fractional_total = 0;
  std::vector<bool> seen_column(r, false);
  for (const FractionalPart& part : cert.fractional) {
    if (part.column >= r) return fail(error, "fractional column out of range");
    if (seen_column[part.column]) return fail(error, "duplicate fractional column");
    seen_column[part.column] = true;
    if (part.sprime.empty()) return fail(error, "fractional part with empty S'");
    {
      auto sorted = part.order;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != part.sprime) return fail(error, "fractional order mismatch");
    }
    RatVector base_vec = cert.columns.column(part.column);
    for (std::size_t user : part.sprime) {
      std::size_t p = pos_of(user);
      if (p >= s || S[p] != user) return fail(error, "fractional user outside S");
      if (!base_vec[p].is_zero())
        return fail(error, "fractional column nonzero on its S'");
      base_vec[p] += Rational(1);
    }
    SpanBasis fbasis(s);
    fbasis.add(base_vec);
    for (std::size_t user : part.order) {
      std::size_t p = pos_of(user);
      SignConstrainedTarget target;
      target.pattern.resize(s);
      for (std::size_t q = 0; q < s; ++q) target.pattern[q] = t.get(S[q], user);
      target.pivot = p;
      if (!sign_member(target, fbasis))
        return fail(error, "fractional decode step failed to replay");
      RatVector unit(s);
      unit[p] = Rational(1);
      fbasis.add(unit);
    }
    fractional_total += part.sprime.size();
  }

  Rational expect = theorem1_only
                        ? Rational((long long)r, (long long)s)
                        : Rational((long long)r, (long long)(s + fractional_total));
  if (theorem1_only && !cert.fractional.empty())
    return fail(error, "fractional parts present in a theorem-1-only certificate");
  if (!(expect == claimed_value)) return fail(error, "claimed value does not match certificate");
  return true;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string GeneratorCertificate::to_json() const {
  nlohmann::json j;
  j["S"] = subset;
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < columns.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t c = 0; c < columns.cols(); ++c) {
      const Rational& e = columns.at(i, c);
      row.push_back(e.sign() * (e.is_zero() ? 0 : 1));
    }
    rows.push_back(row);
  }
  j["A"] = rows;
  j["order"] = decode_order;
  auto wits = nlohmann::json::array();
  for (const auto& w : witnesses) {
    auto vec = nlohmann::json::array();
    for (const auto& e : w) vec.push_back(e.to_string());
    wits.push_back(vec);
  }
  j["witnesses"] = wits;
  auto fr = nlohmann::json::array();
  for (const auto& part : fractional) {
    nlohmann::json pj;
    pj["col"] = part.column;
    pj["Sprime"] = part.sprime;
    pj["order"] = part.order;
    fr.push_back(pj);
  }
  j["fractional"] = fr;
  return j.dump();
}

GeneratorCertificate GeneratorCertificate::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GeneratorCertificate cert;
  cert.subset = j.at("S").get<std::vector<std::size_t>>();
  const auto& rows = j.at("A");
  std::size_t r = rows.empty() ? 0 : rows[0].size();
  cert.columns = RatMatrix(rows.size(), r);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < r; ++c)
      cert.columns.at(i, c) = Rational(rows[i][c].get<long long>());
  cert.decode_order = j.at("order").get<std::vector<std::size_t>>();
  for (const auto& wj : j.at("witnesses")) {
    RatVector w;
    for (const auto& e : wj) w.push_back(Rational::parse(e.get<std::string>()));
    cert.witnesses.push_back(std::move(w));
  }
  for (const auto& pj : j.at("fractional")) {
    FractionalPart part;
    part.column = pj.at("col").get<std::size_t>();
    part.sprime = pj.at("Sprime").get<std::vector<std::size_t>>();
    part.order = pj.at("order").get<std::vector<std::size_t>>();
    cert.fractional.push_back(std::move(part));
  }
  return cert;
}

}  // namespace topodof
