#include "topodof/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "topodof/rng.hpp"
#include "json.hpp"

namespace topodof {

std::size_t Topology::receiver_degree(std::size_t j) const {
  std::size_t d = 0;
  for (std::size_t i = 0; i < k_; ++i) d += get(i, j);
  return d;
}

std::size_t Topology::cross_link_count() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < k_; ++i)
    for (std::size_t j = 0; j < k_; ++j)
      if (i != j && get(i, j)) ++c;
  return c;
}

Topology Topology::relabeled(const std::vector<std::size_t>& perm) const {
  if (perm.size() != k_) throw std::invalid_argument("relabeled: permutation size mismatch");
  Topology out(k_);
  for (std::size_t i = 0; i < k_; ++i)
    for (std::size_t j = 0; j < k_; ++j) out.set(perm[i], perm[j], get(i, j));
  return out;
}

std::string Topology::to_text() const {
  std::ostringstream os;
  os << k_ << "\n";
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) os << (get(i, j) ? '1' : '0');
    os << "\n";
  }
  return os.str();
}

Topology Topology::from_text(const std::string& text) {
  std::istringstream is(text);
  std::size_t k = 0;
  if (!(is >> k) || k == 0 || k > 16)
    throw std::invalid_argument("topology text: bad user count");
  Topology t(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::string line;
    if (!(is >> line) || line.size() != k)
      throw std::invalid_argument("topology text: bad row " + std::to_string(i + 1));
    for (std::size_t j = 0; j < k; ++j) {
      if (line[j] != '0' && line[j] != '1')
        throw std::invalid_argument("topology text: bad character in row " +
                                    std::to_string(i + 1));
      t.set(i, j, line[j] == '1');
    }
  }
  return t;
}

Topology Topology::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open topology file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  // Accept the JSON form as well; sniff the first non-space character.
  for (char ch : text) {
    if (ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r') continue;
    return ch == '{' ? from_json(text) : from_text(text);
  }
  throw std::invalid_argument("empty topology file: " + path);
}

std::string Topology::to_json() const {
  nlohmann::json j;
  j["k"] = k_;
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < k_; ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t c = 0; c < k_; ++c) row.push_back(get(i, c) ? 1 : 0);
    rows.push_back(row);
  }
  j["adj"] = rows;
  return j.dump();
}

Topology Topology::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::size_t k = j.at("k").get<std::size_t>();
  if (k == 0 || k > 16) throw std::invalid_argument("topology json: bad user count");
  Topology t(k);
  const auto& adj = j.at("adj");
  if (adj.size() != k) throw std::invalid_argument("topology json: bad adjacency shape");
  for (std::size_t i = 0; i < k; ++i) {
    if (adj[i].size() != k) throw std::invalid_argument("topology json: bad adjacency shape");
    for (std::size_t c = 0; c < k; ++c) t.set(i, c, adj[i][c].get<int>() != 0);
  }
  return t;
}

std::optional<std::size_t> validate(const Topology& t) {
  for (std::size_t i = 0; i < t.k(); ++i)
    if (!t.get(i, i)) return i;
  return std::nullopt;
}

std::vector<std::size_t> interferers(const Topology& t, std::size_t j) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.k(); ++i)
    if (i != j && t.get(i, j)) out.push_back(i);
  return out;
}

ConflictGraph conflict_graph(const Topology& t) {
  ConflictGraph g(t.k());
  for (std::size_t i = 0; i < t.k(); ++i)
    for (std::size_t j = i + 1; j < t.k(); ++j)
      if (t.get(i, j) || t.get(j, i)) g.add_edge(i, j);
  return g;
}

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Packs P*M*P^T into a row-major integer, MSB first, for fast comparisons.
std::uint64_t permuted_bits(const Topology& t, const std::vector<std::size_t>& p) {
  const std::size_t k = t.k();
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) v = (v << 1) | std::uint64_t(t.get(p[i], p[j]));
  return v;
}

}  // namespace

CanonicalForm canonicalize(const Topology& t) {
  const std::size_t k = t.k();
  if (k * k > 64) throw std::invalid_argument("canonicalize: k too large");
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = permuted_bits(t, perm);
  while (std::next_permutation(perm.begin(), perm.end()))
    best = std::min(best, permuted_bits(t, perm));

  std::string bits(k * k, '0');
  for (std::size_t b = 0; b < k * k; ++b)
    if ((best >> (k * k - 1 - b)) & 1U) bits[b] = '1';
  return CanonicalForm{bits, fnv1a64(bits)};
}

Topology canonical_representative(const Topology& t) {
  CanonicalForm cf = canonicalize(t);
  Topology out(t.k());
  for (std::size_t i = 0; i < t.k(); ++i)
    for (std::size_t j = 0; j < t.k(); ++j) out.set(i, j, cf.bits[i * t.k() + j] == '1');
  return out;
}

// ---------------------------------------------------------------------------
// Six-cell enumeration
// ---------------------------------------------------------------------------

namespace {

// Neighbor candidate sets per cell on the 2x3 grid (see header diagram).
// Middle cells carry two alternative triples (left half / right half).
struct CellChoices {
  std::vector<std::uint32_t> options;  // bitmask of interferer sets (nonempty)
};

std::vector<std::uint32_t> nonempty_subsets(std::initializer_list<int> users) {
  std::vector<int> v(users);
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 1; m < (1U << v.size()); ++m) {
    std::uint32_t mask = 0;
    for (std::size_t b = 0; b < v.size(); ++b)
      if ((m >> b) & 1U) mask |= 1U << (v[b] - 1);
    out.push_back(mask);
  }
  return out;
}

CellChoices cell_choices(std::size_t cell) {
  CellChoices c;
  switch (cell) {
    case 1: c.options = nonempty_subsets({2, 3, 4}); break;
    case 2: c.options = nonempty_subsets({1, 3, 4}); break;
    case 5: c.options = nonempty_subsets({3, 4, 6}); break;
    case 6: c.options = nonempty_subsets({3, 4, 5}); break;
    case 3: {
      c.options = nonempty_subsets({1, 2, 4});
      for (std::uint32_t m : nonempty_subsets({4, 5, 6}))
        if (std::find(c.options.begin(), c.options.end(), m) == c.options.end())
          c.options.push_back(m);
      break;
    }
    case 4: {
      c.options = nonempty_subsets({1, 2, 3});
      for (std::uint32_t m : nonempty_subsets({3, 5, 6}))
        if (std::find(c.options.begin(), c.options.end(), m) == c.options.end())
          c.options.push_back(m);
      break;
    }
    default: throw std::logic_error("six_cell: bad cell");
  }
  return c;
}

}  // namespace

std::size_t six_cell_raw_count() {
  std::size_t n = 1;
  for (std::size_t cell = 1; cell <= 6; ++cell) n *= cell_choices(cell).options.size();
  return n;
}

void six_cell_enumerate(const std::function<void(const Topology&)>& sink) {
  std::array<CellChoices, 6> cells;
  for (std::size_t c = 0; c < 6; ++c) cells[c] = cell_choices(c + 1);

  std::array<std::size_t, 6> idx{};
  for (;;) {
    Topology t(6);
    for (std::size_t j = 0; j < 6; ++j) {
      std::uint32_t mask = cells[j].options[idx[j]];
      for (std::size_t i = 0; i < 6; ++i)
        if ((mask >> i) & 1U) t.set(i, j, true);
    }
    sink(t);
    std::size_t c = 6;
    while (c > 0) {
      --c;
      if (++idx[c] < cells[c].options.size()) break;
      idx[c] = 0;
      if (c == 0) return;
    }
  }
}

// ---------------------------------------------------------------------------
// Ring sampling
// ---------------------------------------------------------------------------

std::vector<Topology> ring_sample(double radius, std::uint64_t seed, std::size_t count) {
  if (!(radius > 0.0) || !(radius < 1.0))
    throw std::invalid_argument("ring_sample: radius must satisfy 0 < r < 1");

  struct Point {
    double x, y;
  };
  std::array<Point, 6> bs;
  bs[0] = {0.0, 0.0};
  for (std::size_t k = 0; k < 5; ++k)
    bs[k + 1] = {std::cos(2.0 * M_PI * double(k) / 5.0),
                 std::sin(2.0 * M_PI * double(k) / 5.0)};

  std::vector<Topology> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    SplitMix64 rng(SplitMix64::mix(seed, n));
    std::array<Point, 6> client;
    for (std::size_t j = 0; j < 6; ++j) {
      // Uniform in the disk around BS_j via polar sampling.
      double rho = radius * std::sqrt(rng.uniform());
      double phi = 2.0 * M_PI * rng.uniform();
      client[j] = {bs[j].x + rho * std::cos(phi), bs[j].y + rho * std::sin(phi)};
    }
    Topology t(6);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        double dx = bs[i].x - client[j].x;
        double dy = bs[i].y - client[j].y;
        if (std::sqrt(dx * dx + dy * dy) <= radius) t.set(i, j, true);
      }
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace topodof
