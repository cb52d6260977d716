// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hfam/bounds.hpp"
#include "hfam/families.hpp"
#include "hfam/graph.hpp"
#include "hfam/measure.hpp"
#include "hfam/random.hpp"
#include "hfam/verify.hpp"
#include "test_util.hpp"

namespace {

using namespace hfam;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> body;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

bool missing_edges_form_matching(const Graph& g) {
  for (int v = 0; v < g.order(); ++v) {
    if (g.order() - 1 - g.degree(v) > 1) return false;
  }
  return true;
}

bool pairwise_adjacent(const VertexSet& s, const Graph& g) {
  const auto vs = s.members();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      if (!g.has_edge(vs[i], vs[j])) return false;
    }
  }
  return true;
}

const std::vector<Probability> kMajorityGrid = {Probability(11, 20), Probability(3, 5), Probability(3, 4)};

Outcome exactness_cross_check() {
  Outcome out;
  int checked = 0;
  for (const auto& p : kMajorityGrid) {
    for (int n = 2; n <= 7; ++n) {
      const auto e = mu_exact(FamilyOracle::majority(), n, p);
      const auto c = mu_closed_form_f2(n, p);
      out.require(e.exact && c.exact && *e.exact == *c.exact,
                  "n=" + std::to_string(n) + " p=" + p.str() + " differ");
      ++checked;
    }
  }
  out.detail = out.ok ? std::to_string(checked) + " (n,p) cases equal as rationals" : out.detail;
  return out;
}

Outcome baseline_measure_identity() {
  Outcome out;
  const auto tri = FamilyOracle::fixed_copy({{0, 1}, {1, 2}, {0, 2}});
  for (const auto& p : {Probability(1, 2), Probability(3, 5), Probability(3, 4)}) {
    const auto e = mu_exact(tri, 5, p);
    out.require(e.exact && *e.exact == p.exact() * p.exact() * p.exact(), "p=" + p.str() + " is not p^3");
  }
  const auto half = mu_exact(tri, 5, Probability(1, 2));
  out.require(half.exact && *half.exact == BigRational(1, 8), "p=1/2 is not 1/8");
  if (out.ok) out.detail = "triangle family at n=5 measures exactly p^3; 1/8 at p=1/2";
  return out;
}

Outcome monte_carlo_calibration() {
  Outcome out;
  const Probability p(3, 5);
  const double truth = mu_closed_form_f2(6, p).value;
  const auto first = mu_monte_carlo(FamilyOracle::majority(), 6, p, 100000, 20240101);
  out.require(first.ci_low <= truth && truth <= first.ci_high, "seed 20240101 interval misses");
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto e = mu_monte_carlo(FamilyOracle::majority(), 6, p, 100000, seed);
    if (e.ci_low <= truth && truth <= e.ci_high) ++covered;
  }
  out.require(covered >= 90, "coverage " + std::to_string(covered) + "/100");
  if (out.ok) out.detail = "coverage " + std::to_string(covered) + "/100 of " + num(truth);
  return out;
}

Outcome exhaustive_intersection() {
  Outcome out;
  const auto report = verify_exhaustive(FamilyOracle::majority(), 4, 2);
  out.require(report.members == 22, "members " + std::to_string(report.members));
  out.require(report.pairs_checked == 253, "pairs " + std::to_string(report.pairs_checked));
  out.require(report.failures.empty(), std::to_string(report.failures.size()) + " failures");
  const auto members = enumerate_members(FamilyOracle::majority(), 4);
  std::uint64_t witnessed = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i; j < members.size(); ++j) {
      const auto w = extract_witness(members[i], members[j], 2, Probability(3, 4));
      const auto vs = w.vertices.members();
      out.require(vs.size() == 2 && members[i].has_edge(vs[0], vs[1]) && members[j].has_edge(vs[0], vs[1]),
                  "bad witness for pair " + std::to_string(i) + "," + std::to_string(j));
      ++witnessed;
    }
  }
  out.require(witnessed == 253, "witnessed " + std::to_string(witnessed));
  if (out.ok) out.detail = "22 members, 253 pairs, 0 failures, 253 common edges verified";
  return out;
}

Outcome recursive_first_scale() {
  Outcome out;
  const Probability p(3, 4);
  const auto oracle = FamilyOracle::recursive(3, p);
  SplitMix64 rng(5150);
  int agree = 0;
  for (int i = 0; i < 100; ++i) {
    const Graph pos = matching_complement(10, rng);
    const Graph neg = two_path_complement(10, rng);
    out.require(missing_edges_form_matching(pos) && !missing_edges_form_matching(neg), "generator mislabeled");
    out.require(oracle.contains(pos), "positive " + to_graph6(pos) + " rejected");
    out.require(!oracle.contains(neg), "negative " + to_graph6(neg) + " accepted");
    agree += 2;
  }
  int triangles = 0;
  for (int i = 0; i < 1000; ++i) {
    const Graph a = matching_complement(10, rng);
    const Graph b = matching_complement(10, rng);
    const Graph common = intersect(a, b);
    const auto w = extract_witness(a, b, 3, p);
    out.require(w.vertices.size() == 3 && pairwise_adjacent(w.vertices, common) &&
                    contains_clique(induced_subgraph(common, w.vertices), 3),
                "pair " + std::to_string(i) + " has no verified triangle");
    ++triangles;
  }
  if (out.ok) {
    out.detail = std::to_string(agree) + "/200 characterization agreements, " + std::to_string(triangles) +
                 "/1000 triangles verified";
  }
  return out;
}

Outcome falsification_certificate() {
  Outcome out;
  const Probability p(3, 4);
  const auto res = find_counterexample_n(3, p, BigRational(27, 64));
  out.require(res.found, "no n_star within the cap");
  if (!out.ok) return out;
  const auto& c = res.certificate;
  double acc = 1.0 - c.term_cond1;
  for (const auto& term : c.terms) acc -= term.product;
  const double resummed = std::max(0.0, acc);
  out.require(resummed == c.lower_bound, "terms re-sum to " + num(resummed));
  out.require(resummed > 0.421875, "lower bound " + num(resummed) + " <= 27/64");
  const double cond1 = binom_tail_le(c.pairs, p, c.cond1_min_edges - 1);
  out.require(std::fabs(cond1 - c.term_cond1) <= 1e-12 * cond1, "term_cond1 mismatch");
  for (std::size_t idx : {std::size_t{0}, c.terms.size() / 2, c.terms.size() - 1}) {
    const auto& term = c.terms[idx];
    const std::int64_t sp = term.size * (term.size - 1) / 2;
    const double b = binom_tail_le(sp, p, sp / 2);
    out.require(std::fabs(b - term.failure) <= 1e-12 * b, "B_s mismatch at s=" + std::to_string(term.size));
  }
  if (out.ok) {
    out.detail = "n_star=" + std::to_string(res.n_star) + " lower_bound=" + format_decimal(c.lower_bound) +
                 " > 27/64, 4 terms re-derived";
  }
  return out;
}

// Measure of the level-3 family at p = 3/4: K_n for 6 <= n <= 9, complements
// of matchings for 10 <= n <= 13.
BigRational level_three_measure(int n) {
  const BigRational p(3, 4);
  const BigRational q(1, 4);
  const std::int64_t pairs = n * (n - 1) / 2;
  auto power = [](BigRational x, std::int64_t e) {
    BigRational r = 1;
    for (std::int64_t i = 0; i < e; ++i) r *= x;
    return r;
  };
  if (n <= 9) return power(p, pairs);
  // Matchings with m edges: n! / ((n-2m)! m! 2^m).
  BigRational total = 0;
  for (int m = 0; 2 * m <= n; ++m) {
    BigInt count = 1;
    for (int i = 0; i < 2 * m; ++i) count *= n - i;
    for (int i = 1; i <= m; ++i) count /= 2 * i;
    total += BigRational(count) * power(p, pairs - m) * power(q, m);
  }
  return total;
}

Outcome bound_soundness() {
  Outcome out;
  int cases = 0;
  for (const auto& p : kMajorityGrid) {
    for (int n = 0; n <= 7; ++n) {
      const double exact = mu_exact(FamilyOracle::majority(), n, p).value;
      const double lb = mu_lower_bound(2, n, p).lower_bound;
      out.require(lb <= exact + 1e-12, "t=2 n=" + std::to_string(n) + " p=" + p.str());
      ++cases;
    }
  }
  const Probability p(3, 4);
  const auto oracle = FamilyOracle::recursive(3, p);
  for (int n = 0; n <= 12; ++n) {
    double exact;
    if (n <= 8) {
      exact = mu_exact(oracle, n, p).value;
      if (n >= 6) {
        const double want = testing::to_double(level_three_measure(n));
        out.require(std::fabs(exact - want) <= 1e-12 * want,
                    "enumeration disagrees with K_n at n=" + std::to_string(n));
      }
    } else {
      exact = testing::to_double(level_three_measure(n));
    }
    const double lb = mu_lower_bound(3, n, p).lower_bound;
    out.require(lb <= exact + 1e-12, "t=3 n=" + std::to_string(n));
    ++cases;
  }
  if (out.ok) out.detail = std::to_string(cases) + " cases, bound never above the exact measure";
  return out;
}

Graph random_density_graph(int n, SplitMix64& rng) {
  return testing::random_graph(n, static_cast<double>(rng.below(1001)) / 1000, rng);
}

// Complete graph minus a few random edges: where recursive members live.
Graph near_complete(int n, int max_missing, SplitMix64& rng) {
  Graph g = Graph::complete(n);
  const int missing = static_cast<int>(rng.below(max_missing + 1));
  for (int i = 0; i < missing; ++i) {
    const int u = static_cast<int>(rng.below(n));
    const int v = static_cast<int>(rng.below(n));
    if (u != v && g.has_edge(u, v)) g.remove_edge(u, v);
  }
  return g;
}

Outcome property_suites() {
  Outcome out;
  SplitMix64 rng(8088);
  struct Kind {
    FamilyOracle oracle;
    int n;
    bool dense;
  };
  const std::vector<Kind> kinds = {
      {FamilyOracle::majority(), 9, false},
      {FamilyOracle::recursive(3, Probability(3, 4)), 10, true},
      {FamilyOracle::recursive(4, Probability(9, 10)), 10, true},
      {FamilyOracle::turan(2), 9, false},
      {FamilyOracle::fixed_copy({{0, 1}, {1, 2}, {0, 2}}), 8, false},
  };
  std::uint64_t monotone_trials = 0;
  std::uint64_t monotone_members = 0;
  for (const auto& kind : kinds) {
    for (int trial = 0; trial < 10000; ++trial) {
      Graph g = kind.dense ? near_complete(kind.n, 6, rng) : random_density_graph(kind.n, rng);
      const auto missing = complement(g).edges();
      if (missing.empty()) {
        ++monotone_trials;
        continue;
      }
      const auto [u, v] = missing[rng.below(missing.size())];
      const bool before = kind.oracle.contains(g);
      g.add_edge(u, v);
      if (before) ++monotone_members;
      out.require(!before || kind.oracle.contains(g), kind.oracle.spec() + " lost a member");
      ++monotone_trials;
    }
  }
  std::uint64_t relabelings = 0;
  for (const auto& kind : kinds) {
    if (!kind.oracle.label_invariant()) continue;
    for (int trial = 0; trial < 1000; ++trial) {
      const Graph g = kind.dense ? near_complete(kind.n, 6, rng) : random_density_graph(kind.n, rng);
      const Graph h = permute(g, testing::random_permutation(kind.n, rng));
      out.require(kind.oracle.contains(g) == kind.oracle.contains(h), kind.oracle.spec() + " not label invariant");
      ++relabelings;
    }
  }
  int chernoff = 0;
  for (std::int64_t trials : {10, 100, 1000}) {
    for (const auto& p : {Probability(11, 20), Probability(3, 5), Probability(3, 4), Probability(9, 10)}) {
      for (const auto& pp : {Probability(1, 2), Probability(p.num() * 20 - p.den(), p.den() * 20)}) {
        const BigRational kq = pp.exact() * trials;
        const auto k = static_cast<std::int64_t>(boost::multiprecision::numerator(kq) /
                                                 boost::multiprecision::denominator(kq));
        const double tail = testing::to_double(binom_tail_le_exact(trials, p, k));
        out.require(tail <= chernoff_upper(trials, p, pp), "Chernoff fails at N=" + std::to_string(trials));
        ++chernoff;
      }
    }
  }
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = static_cast<int>(rng.below(63));
    const Graph g = random_density_graph(n, rng);
    const std::string text = to_graph6(g);
    out.require(parse_graph6(text) == g && to_graph6(parse_graph6(text)) == text, "graph6 round trip " + text);
  }
  if (out.ok) {
    out.detail = std::to_string(monotone_trials) + " edge additions (" + std::to_string(monotone_members) +
                 " from members), " + std::to_string(relabelings) + " relabelings, " +
                 std::to_string(chernoff) + " Chernoff cases, 10000 graph6 round trips";
  }
  return out;
}

Outcome sharp_threshold() {
  Outcome out;
  const auto grid = probability_grid(BigRational(2, 5), BigRational(3, 5), 21);
  const auto rows = sharp_threshold_sweep(FamilyOracle::majority(), 20, grid, 0, 0);
  out.require(rows.size() == 21, "grid size");
  double at45 = -1, at55 = -1;
  for (const auto& r : rows) {
    if (r.p == Probability(9, 20)) at45 = r.estimate.value;
    if (r.p == Probability(11, 20)) at55 = r.estimate.value;
  }
  out.require(at45 >= 0 && at45 <= 0.45, "value(0.45) = " + num(at45));
  out.require(at55 >= 0.85, "value(0.55) = " + num(at55));
  out.require(std::fabs(at55 - testing::golden_double("majority.n20.p0.55")) <= 1e-15, "value(0.55) moved");
  if (out.ok) out.detail = "value(0.45)=" + num(at45) + " value(0.55)=" + num(at55);
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exactness cross-check", 10, exactness_cross_check},
      {2, "baseline measure identity", 5, baseline_measure_identity},
      {3, "Monte Carlo calibration", 30, monte_carlo_calibration},
      {4, "exhaustive intersection", 5, exhaustive_intersection},
      {5, "recursive family at n=10", 60, recursive_first_scale},
      {6, "falsification certificate", 60, falsification_certificate},
      {7, "bound soundness at small n", 300, bound_soundness},
      {8, "property suites", 120, property_suites},
      {9, "sharp threshold", 5, sharp_threshold},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.ok && secs > c.limit_seconds) {
      out.ok = false;
      out.detail = "took " + num(secs) + " s, limit " + num(c.limit_seconds) + " s";
    }
    if (!out.ok) ++failed;
    std::printf("%s criterion %d (%s) %.2fs: %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
