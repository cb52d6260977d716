#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hfam/graph.hpp"
#include "hfam/probability.hpp"

namespace hfam {

/// Largest n for which the recursive oracle will run. Exact evaluation
/// visits up to 3^n (level, subset) pairs.
struct RecursionLimits {
  int max_n_t3 = 20;
  int max_n_deeper = 16;

  int max_n_for(int t) const { return t <= 2 ? kMaxVertices : (t == 3 ? max_n_t3 : max_n_deeper); }
};

/// Scratch memo for one recursive-membership evaluation, keyed by
/// (recursion level, subset mask of the original vertex set).
///
/// A context remembers the graph and parameters it was filled for; handing
/// it a different graph resets it. Not thread-safe: use one per thread.
class MembershipContext {
 public:
  MembershipContext() = default;

  /// Number of memo entries filled since the last reset.
  std::size_t entries() const noexcept { return entries_; }

 private:
  friend class RecursiveEvaluator;

  void bind(const Graph& g, int t, const Probability& p);

  std::optional<Graph> graph_;
  int t_ = 0;
  std::int64_t p_num_ = 0;
  std::int64_t p_den_ = 0;
  // memo_[level][mask]: 0 unknown, 1 member, 2 non-member.
  std::vector<std::vector<std::uint8_t>> memo_;
  std::vector<std::int64_t> min_edges_;
  std::vector<std::int64_t> min_size_;
  std::size_t entries_ = 0;
};

/// Strict majority: 2 |E(G)| > C(n,2). Empty for n <= 1.
bool f2_member(const Graph& g);

/// The recursive family at level t >= 2 with bias p > 1/2. t = 2 is the
/// majority family. For t >= 3 a graph belongs when it has at least
/// ((p + 1/2)/2) C(n,2) edges and every nonempty vertex subset S with
/// |S| >= (p - 1/2)(n - 1) induces a level t-1 member. The graph on zero
/// vertices is a member of no level.
///
/// Throws kInvalidProbability for p <= 1/2, kRange for t < 2 and
/// kCapExceeded above the recursion limits.
bool ft_member(const Graph& g, int t, const Probability& p, MembershipContext& ctx,
               const RecursionLimits& limits = {});
bool ft_member(const Graph& g, int t, const Probability& p, const RecursionLimits& limits = {});

/// ex(n, K_{t+1}): edge count of the balanced complete t-partite graph.
std::int64_t turan_number(std::int64_t n, std::int64_t t);

/// 2 |E(G)| > C(n,2) + ex(n, K_{t+1}). Any two members share more than
/// ex(n, K_{t+1}) edges and hence a K_{t+1}.
bool turan_member(const Graph& g, int t);

/// Every edge of the labeled pattern is present. Throws kRange when the
/// pattern mentions a vertex >= n.
bool fixed_copy_member(const Graph& g, std::span<const std::pair<int, int>> pattern);

enum class FamilyKind { kMajority, kRecursive, kTuranThreshold, kFixedCopy };

std::string_view to_string(FamilyKind kind);

/// A membership predicate over graphs of any order.
class FamilyOracle {
 public:
  static FamilyOracle majority();
  static FamilyOracle recursive(int t, const Probability& p);
  static FamilyOracle turan(int t);
  static FamilyOracle fixed_copy(std::vector<std::pair<int, int>> pattern);

  /// `f2`, `ft:t=3,p=3/4`, `turan:t=2`, `fixed:edges=0-1,1-2,0-2`.
  static FamilyOracle parse(std::string_view text);

  FamilyKind kind() const noexcept { return kind_; }
  int t() const noexcept { return t_; }
  const std::optional<Probability>& p() const noexcept { return p_; }
  const std::vector<std::pair<int, int>>& pattern() const noexcept { return pattern_; }

  RecursionLimits& limits() noexcept { return limits_; }
  const RecursionLimits& limits() const noexcept { return limits_; }

  /// Canonical text form; parse(spec()) reproduces the oracle.
  std::string spec() const;

  /// Whether membership is invariant under vertex relabeling.
  bool label_invariant() const noexcept { return kind_ != FamilyKind::kFixedCopy; }

  /// Throws kCapExceeded (or kRange for patterns) if graphs of order n
  /// cannot be evaluated.
  void check_feasible(int n) const;

  bool contains(const Graph& g) const;
  bool contains(const Graph& g, MembershipContext& ctx) const;

 private:
  FamilyOracle() = default;

  FamilyKind kind_ = FamilyKind::kMajority;
  int t_ = 2;
  std::optional<Probability> p_;
  std::vector<std::pair<int, int>> pattern_;
  RecursionLimits limits_;
};

/// Upper limit on C(n,2) for exhaustive enumeration (2^28 graphs).
inline constexpr int kDefaultEnumerationSlots = 28;

/// Calls `visit` on every member on n vertices, in increasing order of the
/// edge-subset index (bit i = i-th pair in lexicographic (u,v) order).
/// Throws kCapExceeded when C(n,2) > max_slots.
void for_each_member(const FamilyOracle& oracle, int n,
                     const std::function<void(const Graph&)>& visit,
                     int max_slots = kDefaultEnumerationSlots);

std::vector<Graph> enumerate_members(const FamilyOracle& oracle, int n,
                                     int max_slots = kDefaultEnumerationSlots);

/// Pairs (u, v), u < v, in lexicographic order: the edge slots of K_n.
std::vector<std::pair<int, int>> edge_slots(int n);

}  // namespace hfam
