#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace topodof {

// A K-user partially-connected interference network.
//
// adj[i][j] == 1 means transmitter i reaches receiver j. ROWS ARE
// TRANSMITTERS, COLUMNS ARE RECEIVERS -- the text file format below follows
// the same orientation, and mixing it up is the single easiest integration
// mistake to make with this type. Direct links always exist: adj[i][i] == 1.
//
// Rows are stored as bitmasks (bit j of row(i) is adj[i][j]); k <= 16.
class Topology {
 public:
  Topology() : k_(0) {}
  explicit Topology(std::size_t k) : k_(k), rows_(k, 0) {
    for (std::size_t i = 0; i < k; ++i) set(i, i, true);
  }

  static Topology identity(std::size_t k) { return Topology(k); }
  static Topology fully_connected(std::size_t k) {
    Topology t(k);
    for (std::size_t i = 0; i < k; ++i) t.rows_[i] = (std::uint32_t(1) << k) - 1;
    return t;
  }

  std::size_t k() const { return k_; }
  bool get(std::size_t i, std::size_t j) const { return (rows_[i] >> j) & 1U; }
  void set(std::size_t i, std::size_t j, bool v) {
    if (v)
      rows_[i] |= std::uint32_t(1) << j;
    else
      rows_[i] &= ~(std::uint32_t(1) << j);
  }
  std::uint32_t row_mask(std::size_t i) const { return rows_[i]; }
  std::uint32_t column_mask(std::size_t j) const {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < k_; ++i) m |= std::uint32_t(get(i, j)) << i;
    return m;
  }

  std::size_t receiver_degree(std::size_t j) const;
  std::size_t cross_link_count() const;  // off-diagonal ones

  bool operator==(const Topology& o) const { return k_ == o.k_ && rows_ == o.rows_; }
  bool operator<(const Topology& o) const {
    return k_ != o.k_ ? k_ < o.k_ : rows_ < o.rows_;
  }

  Topology relabeled(const std::vector<std::size_t>& perm) const;

  // Text format: line 1 is K, then K lines of K '0'/'1' characters,
  // row i / column j = adj[i][j] (transmitter-rows, receiver-columns).
  std::string to_text() const;
  static Topology from_text(const std::string& text);
  static Topology load_file(const std::string& path);

  std::string to_json() const;  // {"k":K,"adj":[[...]]}
  static Topology from_json(const std::string& text);

 private:
  std::size_t k_;
  std::vector<std::uint32_t> rows_;
};

// Diagonal check. Returns the first offending user index, or nullopt if ok.
std::optional<std::size_t> validate(const Topology& t);

// IF_j: transmitters other than j that reach receiver j.
std::vector<std::size_t> interferers(const Topology& t, std::size_t j);

// Undirected conflict graph: edge {i,j} iff adj[i][j] or adj[j][i], i != j.
class ConflictGraph {
 public:
  ConflictGraph() : k_(0) {}
  explicit ConflictGraph(std::size_t k) : k_(k), adj_(k, 0) {}

  std::size_t k() const { return k_; }
  bool edge(std::size_t i, std::size_t j) const { return (adj_[i] >> j) & 1U; }
  void add_edge(std::size_t i, std::size_t j) {
    adj_[i] |= std::uint32_t(1) << j;
    adj_[j] |= std::uint32_t(1) << i;
  }
  std::uint32_t neighbors(std::size_t i) const { return adj_[i]; }

  bool operator==(const ConflictGraph& o) const { return k_ == o.k_ && adj_ == o.adj_; }

 private:
  std::size_t k_;
  std::vector<std::uint32_t> adj_;
};

ConflictGraph conflict_graph(const Topology& t);

// Canonical form under simultaneous row/column relabeling: the
// lexicographically smallest row-major bit-string of P*M*P^T over all K!
// permutations P. Two topologies are isomorphic iff their canonical bits
// are equal. Brute force over permutations; intended for k <= 8.
struct CanonicalForm {
  std::string bits;    // row-major '0'/'1' string of the canonical matrix
  std::uint64_t hash;  // 64-bit digest of bits

  bool operator==(const CanonicalForm& o) const { return bits == o.bits; }
  bool operator<(const CanonicalForm& o) const { return bits < o.bits; }
};

CanonicalForm canonicalize(const Topology& t);

// The canonical representative itself (the matrix whose bit-string is
// CanonicalForm::bits).
Topology canonical_representative(const Topology& t);

// ---------------------------------------------------------------------------
// Survey scenario generators
// ---------------------------------------------------------------------------

// Six-user networks on a 2x3 grid of square cells, odd cells on top:
//
//        +---+---+---+
//        | 1 | 3 | 5 |
//        +---+---+---+
//        | 2 | 4 | 6 |
//        +---+---+---+
//
// Each user j hears its own base station plus a nonempty subset of
// neighboring base stations. Corner cells choose any nonempty subset of
// their three neighbors (cell 1: {2,3,4}, cell 2: {1,3,4}, cell 5: {3,4,6},
// cell 6: {3,4,5}). Middle cells choose a nonempty subset of either their
// left-half or right-half neighbor triple (cell 3: {1,2,4} or {4,5,6},
// cell 4: {1,2,3} or {3,5,6}). Receiver degrees land in [2,4].
//
// Emits 7^4 * 13^2 = 405,769 topologies in a fixed deterministic order.
void six_cell_enumerate(const std::function<void(const Topology&)>& sink);

std::size_t six_cell_raw_count();  // combinatorial product, for cross-checks

// Six-user networks with one central base station at the origin and five on
// the unit circle at angles 2*pi*k/5. Each instance places one client
// uniformly at random in the disk of radius r around its base station;
// adj[i][j] = 1 iff |BS_i - client_j| <= r. User 1 is the central station.
//
// Deterministic given the seed: instance n uses a splitmix64 stream seeded
// with mix(seed, n) (documented in rng.hpp). Throws std::invalid_argument
// unless 0 < r < 1.
std::vector<Topology> ring_sample(double radius, std::uint64_t seed, std::size_t count);

}  // namespace topodof
