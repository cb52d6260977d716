#include "hfam/graph.hpp"

#include <algorithm>

#include "hfam/error.hpp"
#include "hfam/random.hpp"

namespace hfam {
namespace {

constexpr std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

int lowest(std::uint64_t m) { return std::countr_zero(m); }

// Lower bound on colors needed by a greedy coloring of `cand`, stopping
// once `enough` colors are reached. Any k-clique inside cand needs k colors.
int greedy_color_count(const Graph& g, std::uint64_t cand, int enough) {
  int colors = 0;
  while (cand != 0 && colors < enough) {
    ++colors;
    std::uint64_t avail = cand;
    while (avail != 0) {
      const int v = lowest(avail);
      cand &= ~bit(v);
      avail &= ~(g.neighbor_mask(v) | bit(v));
    }
  }
  return colors;
}

bool find_clique_rec(const Graph& g, std::uint64_t cand, int need, std::uint64_t& acc) {
  if (need == 0) return true;
  if (std::popcount(cand) < need) return false;
  if (greedy_color_count(g, cand, need) < need) return false;
  while (cand != 0) {
    const int v = lowest(cand);
    cand &= ~bit(v);
    // Only higher-indexed vertices remain in cand, so the first clique found
    // is the lexicographically smallest sorted list.
    const std::uint64_t next = cand & g.neighbor_mask(v);
    acc |= bit(v);
    if (find_clique_rec(g, next, need - 1, acc)) return true;
    acc &= ~bit(v);
    if (std::popcount(cand) < need) return false;
  }
  return false;
}

void max_clique_rec(const Graph& g, std::uint64_t cand, int size, int& best) {
  if (cand == 0) {
    best = std::max(best, size);
    return;
  }
  while (cand != 0) {
    if (size + std::popcount(cand) <= best) return;
    if (size + greedy_color_count(g, cand, best - size + 1) <= best) return;
    const int v = lowest(cand);
    cand &= ~bit(v);
    max_clique_rec(g, cand & g.neighbor_mask(v), size + 1, best);
  }
}

}  // namespace

std::vector<int> VertexSet::members() const {
  std::vector<int> out;
  out.reserve(size());
  for (std::uint64_t m = mask; m != 0; m &= m - 1) out.push_back(lowest(m));
  return out;
}

Graph::Graph(int n) : n_(n) {
  if (n < 0 || n > kMaxVertices) {
    throw Error(ErrorCode::kCapacity,
                "vertex count " + std::to_string(n) + " outside [0, 64]");
  }
}

Graph Graph::complete(int n) {
  Graph g(n);
  for (int v = 0; v < n; ++v) g.adj_[v] = g.vertex_mask() & ~bit(v);
  return g;
}

void Graph::check_pair(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw Error(ErrorCode::kRange, "vertex pair (" + std::to_string(u) + "," +
                                       std::to_string(v) + ") outside graph of order " +
                                       std::to_string(n_));
  }
  if (u == v) throw Error(ErrorCode::kLoop, "self-loop at vertex " + std::to_string(u));
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw Error(ErrorCode::kRange, "vertex outside graph");
  }
  return (adj_[u] >> v) & 1U;
}

std::int64_t Graph::edge_count() const noexcept {
  std::int64_t twice = 0;
  for (int v = 0; v < n_; ++v) twice += std::popcount(adj_[v]);
  return twice / 2;
}

std::int64_t Graph::edge_count_within(std::uint64_t mask) const noexcept {
  std::int64_t twice = 0;
  for (std::uint64_t m = mask; m != 0; m &= m - 1) {
    twice += std::popcount(adj_[lowest(m)] & mask);
  }
  return twice / 2;
}

void Graph::add_edge(int u, int v) {
  check_pair(u, v);
  adj_[u] |= bit(v);
  adj_[v] |= bit(u);
}

void Graph::remove_edge(int u, int v) {
  check_pair(u, v);
  adj_[u] &= ~bit(v);
  adj_[v] &= ~bit(u);
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n_; ++u) {
    const std::uint64_t higher = ~((bit(u) << 1) - 1);
    for (std::uint64_t m = adj_[u] & higher; m != 0; m &= m - 1) out.emplace_back(u, lowest(m));
  }
  return out;
}

Graph empty_graph(int n) { return Graph(n); }

Graph add_edge(Graph g, int u, int v) {
  g.add_edge(u, v);
  return g;
}

std::int64_t edge_count(const Graph& g) { return g.edge_count(); }

Graph complement(const Graph& g) {
  Graph out = Graph::complete(g.order());
  for (auto [u, v] : g.edges()) out.toggle_edge(u, v);
  return out;
}

Graph intersect(const Graph& a, const Graph& b) {
  if (a.order() != b.order()) {
    throw Error(ErrorCode::kMismatchedOrder, "cannot intersect graphs of orders " +
                                                 std::to_string(a.order()) + " and " +
                                                 std::to_string(b.order()));
  }
  Graph out(a.order());
  for (int u = 0; u < a.order(); ++u) {
    for (std::uint64_t m = a.neighbor_mask(u) & b.neighbor_mask(u); m != 0; m &= m - 1) {
      const int v = lowest(m);
      if (v > u) out.toggle_edge(u, v);
    }
  }
  return out;
}

Graph induced_subgraph(const Graph& g, std::uint64_t mask) {
  if ((mask & ~g.vertex_mask()) != 0) {
    throw Error(ErrorCode::kRange, "vertex set exceeds graph order");
  }
  std::array<int, kMaxVertices> local{};
  std::vector<int> members;
  members.reserve(std::popcount(mask));
  for (std::uint64_t m = mask; m != 0; m &= m - 1) {
    local[lowest(m)] = static_cast<int>(members.size());
    members.push_back(lowest(m));
  }
  Graph out(static_cast<int>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::uint64_t m = g.neighbor_mask(members[i]) & mask; m != 0; m &= m - 1) {
      const int j = local[lowest(m)];
      if (j > static_cast<int>(i)) out.toggle_edge(static_cast<int>(i), j);
    }
  }
  return out;
}

Graph induced_subgraph(const Graph& g, const VertexSet& s) {
  if (s.ambient != g.order()) {
    throw Error(ErrorCode::kRange, "vertex set ambient order does not match graph");
  }
  return induced_subgraph(g, s.mask);
}

int max_degree_vertex(const Graph& g) {
  if (g.order() == 0) throw Error(ErrorCode::kEmptyGraph, "graph has no vertices");
  int best = 0;
  for (int v = 1; v < g.order(); ++v) {
    if (g.degree(v) > g.degree(best)) best = v;
  }
  return best;
}

VertexSet neighbors(const Graph& g, int v) {
  if (v < 0 || v >= g.order()) throw Error(ErrorCode::kRange, "vertex outside graph");
  return {g.neighbor_mask(v), g.order()};
}

std::optional<VertexSet> find_clique(const Graph& g, int k) {
  if (k <= 0) return VertexSet{0, g.order()};
  std::uint64_t acc = 0;
  if (find_clique_rec(g, g.vertex_mask(), k, acc)) return VertexSet{acc, g.order()};
  return std::nullopt;
}

bool contains_clique(const Graph& g, int k) { return find_clique(g, k).has_value(); }

int clique_number(const Graph& g) {
  int best = 0;
  max_clique_rec(g, g.vertex_mask(), 0, best);
  return best;
}

bool contains_subgraph(const Graph& g, const Graph& h, int pattern_cap) {
  const int k = h.order();
  if (k > pattern_cap) {
    throw Error(ErrorCode::kCapExceeded, "pattern has " + std::to_string(k) +
                                             " vertices, cap is " + std::to_string(pattern_cap));
  }
  if (k > g.order()) return false;
  if (h.edge_count() > g.edge_count()) return false;

  // Order pattern vertices so each one has as many earlier neighbors as
  // possible; this keeps candidate masks small early in the search.
  std::vector<int> order;
  std::uint64_t placed = 0;
  for (int step = 0; step < k; ++step) {
    int pick = -1;
    int pick_back = -1;
    int pick_deg = -1;
    for (int v = 0; v < k; ++v) {
      if ((placed >> v) & 1U) continue;
      const int back = std::popcount(h.neighbor_mask(v) & placed);
      if (back > pick_back || (back == pick_back && h.degree(v) > pick_deg)) {
        pick = v;
        pick_back = back;
        pick_deg = h.degree(v);
      }
    }
    order.push_back(pick);
    placed |= bit(pick);
  }

  std::array<int, kMaxVertices> image{};
  auto search = [&](auto&& self, int pos, std::uint64_t used) -> bool {
    if (pos == k) return true;
    const int hv = order[pos];
    std::uint64_t cand = g.vertex_mask() & ~used;
    for (std::uint64_t m = h.neighbor_mask(hv); m != 0; m &= m - 1) {
      const int hw = lowest(m);
      // Only neighbors already placed constrain the candidates.
      for (int q = 0; q < pos; ++q) {
        if (order[q] == hw) cand &= g.neighbor_mask(image[hw]);
      }
    }
    for (; cand != 0; cand &= cand - 1) {
      const int gv = lowest(cand);
      if (g.degree(gv) < h.degree(hv)) continue;
      image[hv] = gv;
      if (self(self, pos + 1, used | bit(gv))) return true;
    }
    return false;
  };
  return search(search, 0, 0);
}

Graph sample_gnp(int n, const Probability& p, std::uint64_t seed) {
  Graph g(n);
  SplitMix64 rng(seed);
  const auto num = static_cast<std::uint64_t>(p.num());
  const auto den = static_cast<std::uint64_t>(p.den());
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.bernoulli(num, den)) g.toggle_edge(u, v);
    }
  }
  return g;
}

std::string to_graph6(const Graph& g) {
  const int n = g.order();
  if (n > 62) {
    throw Error(ErrorCode::kUnsupportedSize, "graph6 multi-byte sizes are not supported (n=" +
                                                 std::to_string(n) + ")");
  }
  std::string out(1, static_cast<char>(63 + n));
  int acc = 0;
  int filled = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      acc = (acc << 1) | static_cast<int>((g.neighbor_mask(i) >> j) & 1U);
      if (++filled == 6) {
        out.push_back(static_cast<char>(63 + acc));
        acc = 0;
        filled = 0;
      }
    }
  }
  if (filled > 0) out.push_back(static_cast<char>(63 + (acc << (6 - filled))));
  return out;
}

Graph parse_graph6(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
  if (text.starts_with(">>graph6<<")) text.remove_prefix(10);
  if (text.empty()) throw Error(ErrorCode::kMalformed, "empty graph6 string");
  const int head = static_cast<unsigned char>(text[0]);
  if (head == 126) {
    throw Error(ErrorCode::kUnsupportedSize, "graph6 multi-byte sizes are not supported");
  }
  if (head < 63 || head > 126) throw Error(ErrorCode::kMalformed, "bad graph6 size byte");
  const int n = head - 63;
  const std::int64_t bits = choose2(n);
  const std::size_t expected = 1 + static_cast<std::size_t>((bits + 5) / 6);
  if (text.size() != expected) {
    throw Error(ErrorCode::kMalformed, "graph6 string for n=" + std::to_string(n) + " must have " +
                                           std::to_string(expected) + " bytes, got " +
                                           std::to_string(text.size()));
  }
  Graph g(n);
  std::int64_t idx = 0;
  for (std::size_t c = 1; c < text.size(); ++c) {
    const int chunk = static_cast<unsigned char>(text[c]) - 63;
    if (chunk < 0 || chunk > 63) throw Error(ErrorCode::kMalformed, "bad graph6 data byte");
    for (int b = 5; b >= 0; --b, ++idx) {
      const bool set = (chunk >> b) & 1;
      if (idx >= bits) {
        if (set) throw Error(ErrorCode::kMalformed, "nonzero graph6 padding bits");
        continue;
      }
      if (set) {
        // idx enumerates (i, j), i < j, column by column.
        int j = 1;
        std::int64_t start = 0;
        while (start + j <= idx) {
          start += j;
          ++j;
        }
        g.toggle_edge(static_cast<int>(idx - start), j);
      }
    }
  }
  return g;
}

Graph permute(const Graph& g, std::span<const int> perm) {
  const int n = g.order();
  if (static_cast<int>(perm.size()) != n) {
    throw Error(ErrorCode::kNotBijection, "permutation length does not match graph order");
  }
  std::uint64_t seen = 0;
  for (int x : perm) {
    if (x < 0 || x >= n || ((seen >> x) & 1U)) {
      throw Error(ErrorCode::kNotBijection, "permutation is not a bijection");
    }
    seen |= bit(x);
  }
  Graph out(n);
  for (auto [u, v] : g.edges()) out.toggle_edge(perm[u], perm[v]);
  return out;
}

}  // namespace hfam
