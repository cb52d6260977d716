#include "hfam/verify.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <sstream>
#include <thread>

#include "hfam/error.hpp"

namespace hfam {
namespace {

struct PairChunkResult {
  std::vector<PairFailure> failures;
  std::map<int, std::uint64_t> sizes;
};

// Checks one pair, recording a failure or the clique number of G1 & G2.
void check_pair(const Graph& a, const Graph& b, int target_t, std::uint64_t index,
                PairChunkResult& out) {
  const Graph common = intersect(a, b);
  if (!contains_clique(common, target_t)) {
    out.failures.push_back({index, to_graph6(a), to_graph6(b)});
    return;
  }
  ++out.sizes[clique_number(common)];
}

template <class Body>
std::vector<PairChunkResult> run_chunks(std::uint64_t chunks, unsigned threads, Body&& body) {
  std::vector<PairChunkResult> results(chunks);
  threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), chunks));
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) body(c, results[c]);
    return results;
  }
  std::atomic<std::uint64_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) body(c, results[c]);
      });
    }
  }
  return results;
}

void merge(VerificationReport& report, std::vector<PairChunkResult>& parts) {
  for (auto& part : parts) {
    for (auto& f : part.failures) report.failures.push_back(std::move(f));
    for (auto [size, count] : part.sizes) report.witness_sizes[size] += count;
  }
  std::sort(report.failures.begin(), report.failures.end(),
            [](const PairFailure& x, const PairFailure& y) { return x.pair_index < y.pair_index; });
}

void check_target(int target_t) {
  if (target_t < 1) throw Error(ErrorCode::kRange, "target clique size must be positive");
}

Graph draw_member(const FamilyOracle& oracle, int n, const RejectionSource& source,
                  std::uint64_t stream, MembershipContext& ctx) {
  for (std::uint64_t attempt = 0; attempt < source.max_attempts_per_member; ++attempt) {
    Graph g = sample_gnp(n, source.p, derive_seed(stream, attempt));
    if (oracle.contains(g, ctx)) return g;
  }
  throw Error(ErrorCode::kInfeasible,
              "rejection sampling found no member in " +
                  std::to_string(source.max_attempts_per_member) + " draws of G(" +
                  std::to_string(n) + ", " + source.p.str() + ")");
}

std::vector<int> replay(const Graph& g1, const Graph& g2, int t, const Probability& p,
                        const WitnessOptions& options, std::vector<WitnessStep>& steps) {
  const Graph common = intersect(g1, g2);
  if (t == 2) {
    for (int u = 0; u < common.order(); ++u) {
      const std::uint64_t higher = common.neighbor_mask(u) & ~((std::uint64_t{2} << u) - 1);
      if (higher != 0) return {u, std::countr_zero(higher)};
    }
    throw Error(ErrorCode::kWitnessNotFound, "no common edge at the base level");
  }
  if (common.order() == 0) {
    throw Error(ErrorCode::kWitnessNotFound, "empty vertex set at level " + std::to_string(t));
  }
  WitnessStep step;
  step.level = t;
  step.order = common.order();
  step.pivot = max_degree_vertex(common);
  const VertexSet hood = neighbors(common, step.pivot);
  step.neighborhood = hood.size();
  // |T| >= (p - 1/2)(order - 1), exactly.
  step.degree_bound_holds = static_cast<__int128>(2 * p.den()) * step.neighborhood >=
                            static_cast<__int128>(2 * p.num() - p.den()) * (step.order - 1);
  steps.push_back(step);
  if (options.check_degree_bound && !step.degree_bound_holds) {
    throw Error(ErrorCode::kWitnessNotFound,
                "max degree " + std::to_string(step.neighborhood) + " below (p-1/2)(n-1) at level " +
                    std::to_string(t) + "; inputs are not both members");
  }
  const std::vector<int> local = replay(induced_subgraph(g1, hood.mask),
                                        induced_subgraph(g2, hood.mask), t - 1, p, options, steps);
  const std::vector<int> members = hood.members();
  std::vector<int> out{step.pivot};
  for (int i : local) out.push_back(members[i]);
  return out;
}

}  // namespace

std::string_view to_string(VerifyMode mode) {
  return mode == VerifyMode::kExhaustive ? "exhaustive" : "sampled";
}

VerificationReport verify_exhaustive(const FamilyOracle& oracle, int n, int target_t,
                                     const VerifyOptions& options) {
  check_target(target_t);
  const auto start = std::chrono::steady_clock::now();
  VerificationReport report;
  report.family = oracle.spec();
  report.n = n;
  report.target_t = target_t;
  report.mode = VerifyMode::kExhaustive;

  const std::vector<Graph> members = enumerate_members(oracle, n, options.max_slots);
  const std::uint64_t m = members.size();
  report.members = m;
  if (m == 0) {
    report.empty_family = true;
    report.elapsed = std::chrono::steady_clock::now() - start;
    return report;
  }
  const std::uint64_t pairs = m * (m + 1) / 2;
  if (pairs > options.max_exhaustive_pairs) {
    throw Error(ErrorCode::kInfeasible, std::to_string(pairs) + " member pairs exceed the cap of " +
                                            std::to_string(options.max_exhaustive_pairs));
  }
  // Row i covers pairs (i, j) for j >= i; its first index is i*m - i(i-1)/2.
  auto parts = run_chunks(m, options.threads, [&](std::uint64_t i, PairChunkResult& out) {
    const std::uint64_t base = i * m - i * (i - 1) / 2;
    for (std::uint64_t j = i; j < m; ++j) check_pair(members[i], members[j], target_t, base + (j - i), out);
  });
  merge(report, parts);
  report.pairs_checked = pairs;
  report.elapsed = std::chrono::steady_clock::now() - start;
  return report;
}

VerificationReport verify_sampled(const FamilyOracle& oracle, int n, int target_t,
                                  const MemberSource& source, std::uint64_t budget,
                                  std::uint64_t seed, const VerifyOptions& options) {
  check_target(target_t);
  const auto start = std::chrono::steady_clock::now();
  VerificationReport report;
  report.family = oracle.spec();
  report.n = n;
  report.target_t = target_t;
  report.mode = VerifyMode::kSampled;

  constexpr std::uint64_t kChunk = 256;
  const std::uint64_t chunks = (budget + kChunk - 1) / kChunk;

  if (const auto* list = std::get_if<MemberList>(&source)) {
    for (const auto& g : *list) {
      if (g.order() != n) throw Error(ErrorCode::kMismatchedOrder, "member list has wrong order");
    }
    report.members = list->size();
    if (list->empty()) {
      report.empty_family = true;
      report.elapsed = std::chrono::steady_clock::now() - start;
      return report;
    }
    auto parts = run_chunks(chunks, options.threads, [&](std::uint64_t c, PairChunkResult& out) {
      for (std::uint64_t i = c * kChunk; i < std::min(budget, (c + 1) * kChunk); ++i) {
        SplitMix64 rng(derive_seed(seed, i));
        const std::uint64_t a = rng.below(list->size());
        const std::uint64_t b = rng.below(list->size());
        check_pair((*list)[std::min(a, b)], (*list)[std::max(a, b)], target_t, i, out);
      }
    });
    merge(report, parts);
  } else {
    const auto& rejection = std::get<RejectionSource>(source);
    oracle.check_feasible(n);
    auto parts = run_chunks(chunks, options.threads, [&](std::uint64_t c, PairChunkResult& out) {
      MembershipContext ctx;
      for (std::uint64_t i = c * kChunk; i < std::min(budget, (c + 1) * kChunk); ++i) {
        const std::uint64_t stream = derive_seed(seed, i);
        const Graph a = draw_member(oracle, n, rejection, derive_seed(stream, 0), ctx);
        const Graph b = draw_member(oracle, n, rejection, derive_seed(stream, 1), ctx);
        check_pair(a, b, target_t, i, out);
      }
    });
    merge(report, parts);
    report.members = 2 * budget;
  }
  report.pairs_checked = budget;
  report.elapsed = std::chrono::steady_clock::now() - start;
  return report;
}

VerificationReport verify_intersecting(const FamilyOracle& oracle, int n, int target_t,
                                       VerifyMode mode, std::uint64_t budget, std::uint64_t seed,
                                       const MemberSource& source, const VerifyOptions& options) {
  if (mode == VerifyMode::kExhaustive) return verify_exhaustive(oracle, n, target_t, options);
  return verify_sampled(oracle, n, target_t, source, budget, seed, options);
}

std::string to_text(const VerificationReport& report) {
  std::ostringstream out;
  out << "family " << report.family << "\n";
  out << "n " << report.n << "\n";
  out << "target_t " << report.target_t << "\n";
  out << "mode " << to_string(report.mode) << "\n";
  out << "members " << report.members << "\n";
  out << "pairs_checked " << report.pairs_checked << "\n";
  out << "status "
      << (report.empty_family ? "empty-family" : (report.failures.empty() ? "verified" : "FAILED"))
      << "\n";
  out << "failures " << report.failures.size() << "\n";
  for (const auto& f : report.failures) out << "failure " << f.pair_index << " " << f.g1 << " " << f.g2 << "\n";
  out << "witness_sizes";
  for (auto [size, count] : report.witness_sizes) out << " " << size << ":" << count;
  out << "\n";
  out << "elapsed_seconds " << format_decimal(report.elapsed.count()) << "\n";
  return out.str();
}

CliqueWitness extract_witness(const Graph& g1, const Graph& g2, int t, const Probability& p,
                              const WitnessOptions& options) {
  if (t < 2) throw Error(ErrorCode::kRange, "witness extraction needs t >= 2");
  if (!p.exceeds_half()) throw Error(ErrorCode::kInvalidProbability, "witness extraction needs p > 1/2");
  if (g1.order() != g2.order()) throw Error(ErrorCode::kMismatchedOrder, "graphs differ in order");
  if (options.verify_membership && (!ft_member(g1, t, p) || !ft_member(g2, t, p))) {
    throw Error(ErrorCode::kWitnessNotFound, "an input is not a member of the family");
  }
  CliqueWitness witness;
  witness.t = t;
  const std::vector<int> vertices = replay(g1, g2, t, p, options, witness.steps);
  const Graph common = intersect(g1, g2);
  witness.vertices.ambient = common.order();
  for (int v : vertices) witness.vertices.mask |= std::uint64_t{1} << v;
  if (witness.vertices.size() != t) throw Error(ErrorCode::kWitnessNotFound, "witness has repeated vertices");
  for (int v : vertices) {
    if ((common.neighbor_mask(v) & witness.vertices.mask) != (witness.vertices.mask & ~(std::uint64_t{1} << v))) {
      throw Error(ErrorCode::kWitnessNotFound, "extracted set is not a clique of the intersection");
    }
  }
  return witness;
}

Graph matching_complement(int n, SplitMix64& rng, int edges) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Fisher-Yates with the project generator keeps results platform-independent.
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  if (edges < 0) edges = static_cast<int>(rng.below(n / 2 + 1));
  if (edges > n / 2) throw Error(ErrorCode::kRange, "matching larger than n/2");
  Graph g = Graph::complete(n);
  for (int i = 0; i < edges; ++i) g.remove_edge(order[2 * i], order[2 * i + 1]);
  return g;
}

Graph two_path_complement(int n, SplitMix64& rng) {
  if (n < 3) throw Error(ErrorCode::kRange, "two-path needs three vertices");
  Graph g = Graph::complete(n);
  const int u = static_cast<int>(rng.below(n));
  int v = static_cast<int>(rng.below(n - 1));
  if (v >= u) ++v;
  int w = static_cast<int>(rng.below(n - 2));
  for (int x : {std::min(u, v), std::max(u, v)}) {
    if (w >= x) ++w;
  }
  g.remove_edge(u, v);
  g.remove_edge(v, w);
  const int extra = static_cast<int>(rng.below(4));
  for (int i = 0; i < extra; ++i) {
    const int a = static_cast<int>(rng.below(n));
    const int b = static_cast<int>(rng.below(n));
    if (a != b) g.remove_edge(a, b);
  }
  return g;
}

std::vector<Probability> probability_grid(const BigRational& from, const BigRational& to, int steps) {
  if (steps < 1) throw Error(ErrorCode::kRange, "grid needs at least one step");
  std::vector<Probability> grid;
  for (int i = 0; i < steps; ++i) {
    const BigRational x = steps == 1 ? from : from + (to - from) * i / (steps - 1);
    const BigInt num = boost::multiprecision::numerator(x);
    const BigInt den = boost::multiprecision::denominator(x);
    if (num <= 0 || num >= den) {
      throw Error(ErrorCode::kInvalidProbability, "grid value " + format_rational(x) + " outside (0,1)");
    }
    grid.emplace_back(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  }
  return grid;
}

std::vector<SweepRow> sharp_threshold_sweep(const FamilyOracle& oracle_template, int n,
                                            const std::vector<Probability>& grid,
                                            std::uint64_t samples, std::uint64_t seed,
                                            unsigned threads) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Probability& p = grid[i];
    if (oracle_template.kind() == FamilyKind::kMajority) {
      rows.push_back({p, mu_closed_form_f2(n, p)});
      continue;
    }
    FamilyOracle oracle = oracle_template.kind() == FamilyKind::kRecursive
                              ? FamilyOracle::recursive(oracle_template.t(), p)
                              : oracle_template;
    oracle.limits() = oracle_template.limits();
    rows.push_back({p, mu_monte_carlo(oracle, n, p, samples, derive_seed(seed, i), threads)});
  }
  return rows;
}

}  // namespace hfam
