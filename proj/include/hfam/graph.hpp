#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hfam/probability.hpp"

namespace hfam {

inline constexpr int kMaxVertices = 64;

/// A set of vertices drawn from {0, ..., ambient-1}.
struct VertexSet {
  std::uint64_t mask = 0;
  int ambient = 0;

  int size() const noexcept { return std::popcount(mask); }
  bool empty() const noexcept { return mask == 0; }
  bool contains(int v) const noexcept {
    return v >= 0 && v < 64 && ((mask >> v) & 1U);
  }
  /// Members in increasing order.
  std::vector<int> members() const;

  friend bool operator==(const VertexSet&, const VertexSet&) = default;
};

/// Undirected simple graph on at most 64 labeled vertices, stored as one
/// neighbor mask per vertex.
///
/// Invariants: no loops, adjacency is symmetric, no bit at or above n.
class Graph {
 public:
  /// Throws kCapacity when n is outside [0, 64].
  explicit Graph(int n = 0);

  static Graph complete(int n);

  int order() const noexcept { return n_; }
  std::uint64_t vertex_mask() const noexcept {
    return n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
  }
  std::uint64_t neighbor_mask(int v) const noexcept { return adj_[v]; }
  int degree(int v) const noexcept { return std::popcount(adj_[v]); }

  bool has_edge(int u, int v) const;
  std::int64_t edge_count() const noexcept;

  /// Edges of the subgraph induced by `mask` (bits must lie below n).
  std::int64_t edge_count_within(std::uint64_t mask) const noexcept;

  /// Both throw kLoop for u == v and kRange for out-of-range endpoints.
  void add_edge(int u, int v);
  void remove_edge(int u, int v);

  /// Unchecked toggle for enumeration inner loops.
  void toggle_edge(int u, int v) noexcept {
    adj_[u] ^= std::uint64_t{1} << v;
    adj_[v] ^= std::uint64_t{1} << u;
  }

  /// Edges as (u, v) pairs with u < v, lexicographic.
  std::vector<std::pair<int, int>> edges() const;

  friend bool operator==(const Graph& a, const Graph& b) noexcept {
    return a.n_ == b.n_ && a.adj_ == b.adj_;
  }

 private:
  void check_pair(int u, int v) const;

  int n_ = 0;
  std::array<std::uint64_t, kMaxVertices> adj_{};
};

Graph empty_graph(int n);
/// Copy of g with {u,v} added.
Graph add_edge(Graph g, int u, int v);
std::int64_t edge_count(const Graph& g);
Graph complement(const Graph& g);

/// Edge-wise intersection; throws kMismatchedOrder when orders differ.
Graph intersect(const Graph& a, const Graph& b);

/// Subgraph induced by s, relabeled so that the i-th smallest member of s
/// becomes vertex i.
Graph induced_subgraph(const Graph& g, const VertexSet& s);
Graph induced_subgraph(const Graph& g, std::uint64_t mask);

/// Lowest-indexed vertex among those of maximum degree. Throws kEmptyGraph
/// when n == 0.
int max_degree_vertex(const Graph& g);

VertexSet neighbors(const Graph& g, int v);

/// Whether g has k pairwise-adjacent vertices (k <= 0 is trivially true).
bool contains_clique(const Graph& g, int k);

/// The first k-clique in lexicographic order of sorted vertex lists, or
/// nullopt. Agrees with contains_clique.
std::optional<VertexSet> find_clique(const Graph& g, int k);

/// Size of a maximum clique.
int clique_number(const Graph& g);

inline constexpr int kDefaultPatternCap = 8;

/// Whether some injective map sends every edge of h onto an edge of g
/// (not necessarily induced). Throws kCapExceeded when h has more than
/// `pattern_cap` vertices.
bool contains_subgraph(const Graph& g, const Graph& h, int pattern_cap = kDefaultPatternCap);

/// G(n,p): pairs (u,v), u < v, visited in lexicographic order, each kept
/// with probability exactly p using a SplitMix64 stream seeded by `seed`.
Graph sample_gnp(int n, const Probability& p, std::uint64_t seed);

/// graph6 encoding; only the single-byte size header (n <= 62) is supported.
std::string to_graph6(const Graph& g);
Graph parse_graph6(std::string_view text);

/// Relabels vertex v as perm[v]. Throws kNotBijection.
Graph permute(const Graph& g, std::span<const int> perm);

}  // namespace hfam
