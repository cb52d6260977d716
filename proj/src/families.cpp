#include "hfam/families.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "hfam/error.hpp"

namespace hfam {
namespace {

constexpr std::uint8_t kUnknown = 0;
constexpr std::uint8_t kMember = 1;
constexpr std::uint8_t kNonMember = 2;

void check_recursive_params(int t, const Probability& p) {
  if (t < 2) throw Error(ErrorCode::kRange, "recursive family needs t >= 2");
  if (!p.exceeds_half()) {
    throw Error(ErrorCode::kInvalidProbability,
                "recursive family needs p > 1/2, got " + p.str());
  }
}

// Scatters the low bits of `local` onto the positions listed in `members`.
std::uint64_t deposit(std::uint64_t local, const std::array<int, kMaxVertices>& members) {
  std::uint64_t out = 0;
  for (; local != 0; local &= local - 1) out |= std::uint64_t{1} << members[std::countr_zero(local)];
  return out;
}

int parse_int(std::string_view s, std::string_view whole) {
  if (s.empty() || s.size() > 9 ||
      !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw Error(ErrorCode::kMalformed, "bad integer in family spec '" + std::string(whole) + "'");
  }
  return std::stoi(std::string(s));
}

}  // namespace

void MembershipContext::bind(const Graph& g, int t, const Probability& p) {
  if (graph_ && *graph_ == g && t_ == t && p_num_ == p.num() && p_den_ == p.den()) return;
  graph_ = g;
  t_ = t;
  p_num_ = p.num();
  p_den_ = p.den();
  const int n = g.order();
  const std::size_t slots = std::size_t{1} << n;
  memo_.resize(static_cast<std::size_t>(t + 1));
  for (int level = 0; level <= t; ++level) {
    auto& m = memo_[level];
    if (level >= 2) {
      m.assign(slots, kUnknown);
    } else {
      m.clear();
    }
  }
  min_edges_.resize(static_cast<std::size_t>(n) + 1);
  min_size_.resize(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    min_edges_[m] = dense_min_edges(m, p);
    min_size_[m] = min_subset_size(m, p);
  }
  entries_ = 0;
}

class RecursiveEvaluator {
 public:
  RecursiveEvaluator(const Graph& g, int t, const Probability& p, MembershipContext& ctx)
      : g_(g), ctx_(ctx) {
    ctx_.bind(g, t, p);
  }

  bool member(int level, std::uint64_t mask) {
    if (mask == 0) return false;
    const int m = std::popcount(mask);
    auto& slot = ctx_.memo_[level][mask];
    if (slot != kUnknown) return slot == kMember;
    const bool result = evaluate(level, mask, m);
    slot = result ? kMember : kNonMember;
    ++ctx_.entries_;
    return result;
  }

 private:
  bool evaluate(int level, std::uint64_t mask, int m) {
    const std::int64_t edges = g_.edge_count_within(mask);
    if (level == 2) return 2 * edges > choose2(m);
    if (edges < ctx_.min_edges_[m]) return false;

    std::array<int, kMaxVertices> members{};
    int i = 0;
    for (std::uint64_t r = mask; r != 0; r &= r - 1) members[i++] = std::countr_zero(r);

    // Smallest subsets first: they fail most often.
    const std::uint64_t full_local = (m == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
    for (int k = static_cast<int>(ctx_.min_size_[m]); k <= m; ++k) {
      std::uint64_t local = (k == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
      while (true) {
        if (!member(level - 1, deposit(local, members))) return false;
        if (local == full_local || k == m) break;
        // Gosper's hack: next k-subset of an m-set.
        const std::uint64_t c = local & (0 - local);
        const std::uint64_t r = local + c;
        if (r == 0 || (r & ~full_local) != 0) break;
        local = (((r ^ local) >> 2) / c) | r;
        if ((local & ~full_local) != 0) break;
      }
    }
    return true;
  }

  const Graph& g_;
  MembershipContext& ctx_;
};

bool f2_member(const Graph& g) { return 2 * g.edge_count() > choose2(g.order()); }

bool ft_member(const Graph& g, int t, const Probability& p, MembershipContext& ctx,
               const RecursionLimits& limits) {
  check_recursive_params(t, p);
  if (t == 2) return f2_member(g);
  const int n = g.order();
  if (n > limits.max_n_for(t)) {
    throw Error(ErrorCode::kCapExceeded, "recursive membership at t=" + std::to_string(t) +
                                             " is capped at n=" +
                                             std::to_string(limits.max_n_for(t)) + ", got n=" +
                                             std::to_string(n));
  }
  if (n == 0) return false;
  // Condition (1) alone rejects most graphs; test it before touching the memo.
  if (g.edge_count() < dense_min_edges(n, p)) return false;
  RecursiveEvaluator eval(g, t, p, ctx);
  return eval.member(t, g.vertex_mask());
}

bool ft_member(const Graph& g, int t, const Probability& p, const RecursionLimits& limits) {
  MembershipContext ctx;
  return ft_member(g, t, p, ctx, limits);
}

std::int64_t turan_number(std::int64_t n, std::int64_t t) {
  if (n < 0 || t < 1) throw Error(ErrorCode::kRange, "turan_number needs n >= 0 and t >= 1");
  const std::int64_t q = n / t;
  const std::int64_t r = n % t;
  return choose2(n) - r * choose2(q + 1) - (t - r) * choose2(q);
}

bool turan_member(const Graph& g, int t) {
  if (t < 1) throw Error(ErrorCode::kRange, "turan family needs t >= 1");
  const std::int64_t n = g.order();
  return 2 * g.edge_count() > choose2(n) + turan_number(n, t);
}

bool fixed_copy_member(const Graph& g, std::span<const std::pair<int, int>> pattern) {
  for (auto [u, v] : pattern) {
    if (u < 0 || v < 0 || u >= g.order() || v >= g.order()) {
      throw Error(ErrorCode::kRange, "pattern edge " + std::to_string(u) + "-" +
                                         std::to_string(v) + " outside graph of order " +
                                         std::to_string(g.order()));
    }
    if (!((g.neighbor_mask(u) >> v) & 1U)) return false;
  }
  return true;
}

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kMajority: return "majority";
    case FamilyKind::kRecursive: return "recursive";
    case FamilyKind::kTuranThreshold: return "turan";
    case FamilyKind::kFixedCopy: return "fixed-copy";
  }
  return "unknown";
}

FamilyOracle FamilyOracle::majority() { return FamilyOracle(); }

FamilyOracle FamilyOracle::recursive(int t, const Probability& p) {
  check_recursive_params(t, p);
  FamilyOracle o;
  o.kind_ = FamilyKind::kRecursive;
  o.t_ = t;
  o.p_ = p;
  return o;
}

FamilyOracle FamilyOracle::turan(int t) {
  if (t < 1) throw Error(ErrorCode::kRange, "turan family needs t >= 1");
  FamilyOracle o;
  o.kind_ = FamilyKind::kTuranThreshold;
  o.t_ = t;
  return o;
}

FamilyOracle FamilyOracle::fixed_copy(std::vector<std::pair<int, int>> pattern) {
  for (auto& [u, v] : pattern) {
    if (u < 0 || v < 0 || u >= kMaxVertices || v >= kMaxVertices) {
      throw Error(ErrorCode::kRange, "pattern vertex out of range");
    }
    if (u == v) throw Error(ErrorCode::kLoop, "pattern has a self-loop");
    if (u > v) std::swap(u, v);
  }
  std::sort(pattern.begin(), pattern.end());
  pattern.erase(std::unique(pattern.begin(), pattern.end()), pattern.end());
  FamilyOracle o;
  o.kind_ = FamilyKind::kFixedCopy;
  o.t_ = 0;
  o.pattern_ = std::move(pattern);
  return o;
}

FamilyOracle FamilyOracle::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kMalformed, "family spec '" + std::string(text) + "': " + why);
  };

  if (name == "f2") {
    if (!rest.empty()) throw bad("f2 takes no parameters");
    return majority();
  }
  if (name == "fixed") {
    if (!rest.starts_with("edges=")) throw bad("expected edges=u-v,...");
    std::vector<std::pair<int, int>> edges;
    std::string_view list = rest.substr(6);
    while (!list.empty()) {
      const auto comma = list.find(',');
      const std::string_view item = list.substr(0, comma);
      const auto dash = item.find('-');
      if (dash == std::string_view::npos) throw bad("edge '" + std::string(item) + "' lacks '-'");
      edges.emplace_back(parse_int(item.substr(0, dash), text), parse_int(item.substr(dash + 1), text));
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
      if (list.empty()) throw bad("trailing comma");
    }
    if (edges.empty()) throw bad("empty pattern");
    return fixed_copy(std::move(edges));
  }

  std::optional<int> t;
  std::optional<Probability> p;
  std::string_view list = rest;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const std::string_view item = list.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw bad("expected key=value");
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "t") {
      t = parse_int(value, text);
    } else if (key == "p") {
      p = Probability::parse(value);
    } else {
      throw bad("unknown key '" + std::string(key) + "'");
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (name == "ft") {
    if (!t || !p) throw bad("ft needs t and p");
    return recursive(*t, *p);
  }
  if (name == "turan") {
    if (!t) throw bad("turan needs t");
    if (p) throw bad("turan takes no p");
    return turan(*t);
  }
  throw bad("unknown family kind '" + std::string(name) + "'");
}

std::string FamilyOracle::spec() const {
  switch (kind_) {
    case FamilyKind::kMajority: return "f2";
    case FamilyKind::kRecursive: return "ft:t=" + std::to_string(t_) + ",p=" + p_->str();
    case FamilyKind::kTuranThreshold: return "turan:t=" + std::to_string(t_);
    case FamilyKind::kFixedCopy: {
      std::string s = "fixed:edges=";
      for (std::size_t i = 0; i < pattern_.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(pattern_[i].first) + "-" + std::to_string(pattern_[i].second);
      }
      return s;
    }
  }
  return {};
}

void FamilyOracle::check_feasible(int n) const {
  if (kind_ == FamilyKind::kRecursive && n > limits_.max_n_for(t_)) {
    throw Error(ErrorCode::kCapExceeded, "recursive membership at t=" + std::to_string(t_) +
                                             " is capped at n=" +
                                             std::to_string(limits_.max_n_for(t_)));
  }
  if (kind_ == FamilyKind::kFixedCopy) {
    for (auto [u, v] : pattern_) {
      if (v >= n) {
        throw Error(ErrorCode::kRange, "pattern vertex " + std::to_string(v) +
                                           " outside graphs of order " + std::to_string(n));
      }
    }
  }
}

bool FamilyOracle::contains(const Graph& g, MembershipContext& ctx) const {
  switch (kind_) {
    case FamilyKind::kMajority: return f2_member(g);
    case FamilyKind::kRecursive: return ft_member(g, t_, *p_, ctx, limits_);
    case FamilyKind::kTuranThreshold: return turan_member(g, t_);
    case FamilyKind::kFixedCopy: return fixed_copy_member(g, pattern_);
  }
  return false;
}

bool FamilyOracle::contains(const Graph& g) const {
  MembershipContext ctx;
  return contains(g, ctx);
}

std::vector<std::pair<int, int>> edge_slots(int n) {
  std::vector<std::pair<int, int>> slots;
  slots.reserve(static_cast<std::size_t>(choose2(n)));
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) slots.emplace_back(u, v);
  }
  return slots;
}

void for_each_member(const FamilyOracle& oracle, int n,
                     const std::function<void(const Graph&)>& visit, int max_slots) {
  Graph g(n);
  const auto slots = edge_slots(n);
  if (static_cast<int>(slots.size()) > max_slots) {
    throw Error(ErrorCode::kCapExceeded, "enumeration over " + std::to_string(slots.size()) +
                                             " edge slots exceeds cap " +
                                             std::to_string(max_slots));
  }
  oracle.check_feasible(n);
  MembershipContext ctx;
  const std::uint64_t total = std::uint64_t{1} << slots.size();
  for (std::uint64_t index = 0; index < total; ++index) {
    if (index != 0) {
      // Incrementing flips exactly the bits of index ^ (index - 1).
      for (std::uint64_t flips = index ^ (index - 1); flips != 0; flips &= flips - 1) {
        const auto [u, v] = slots[std::countr_zero(flips)];
        g.toggle_edge(u, v);
      }
    }
    if (oracle.contains(g, ctx)) visit(g);
  }
}

std::vector<Graph> enumerate_members(const FamilyOracle& oracle, int n, int max_slots) {
  std::vector<Graph> out;
  for_each_member(oracle, n, [&](const Graph& g) { out.push_back(g); }, max_slots);
  return out;
}

}  // namespace hfam
