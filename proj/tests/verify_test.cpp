#include "hfam/verify.hpp"

#include <gtest/gtest.h>

#include "hfam/error.hpp"
#include "test_util.hpp"

namespace hfam {
namespace {

using testing::brute_force_clique;

int brute_force_clique_number(const Graph& g) {
  int k = 0;
  while (brute_force_clique(g, k + 1)) ++k;
  return k;
}

bool is_clique_of(const VertexSet& s, const Graph& g) {
  const auto vs = s.members();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      if (!g.has_edge(vs[i], vs[j])) return false;
    }
  }
  return true;
}

std::vector<Graph> matching_complements(int n, int count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Graph> out;
  for (int i = 0; i < count; ++i) out.push_back(matching_complement(n, rng));
  return out;
}

TEST(ExhaustiveTest, MajorityOnFourVertices) {
  const auto report = verify_exhaustive(FamilyOracle::majority(), 4, 2);
  EXPECT_EQ(report.members, static_cast<std::uint64_t>(testing::golden_int("majority.n4.members")));
  EXPECT_EQ(report.pairs_checked, 253u);
  EXPECT_TRUE(report.failures.empty());
  EXPECT_TRUE(report.passed());
  EXPECT_FALSE(report.empty_family);

  // Witness histogram, recomputed pair by pair.
  const auto members = enumerate_members(FamilyOracle::majority(), 4);
  std::map<int, std::uint64_t> want;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i; j < members.size(); ++j) {
      ++want[brute_force_clique_number(intersect(members[i], members[j]))];
    }
  }
  EXPECT_EQ(report.witness_sizes, want);
}

TEST(ExhaustiveTest, ReportsFailuresInPairOrder) {
  // Strict-majority graphs are edge-intersecting but not triangle-intersecting.
  const auto report = verify_exhaustive(FamilyOracle::majority(), 4, 3);
  const auto members = enumerate_members(FamilyOracle::majority(), 4);
  std::uint64_t bad = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i; j < members.size(); ++j) {
      if (!brute_force_clique(intersect(members[i], members[j]), 3)) ++bad;
    }
  }
  ASSERT_GT(bad, 0u);
  EXPECT_EQ(report.failures.size(), bad);
  EXPECT_FALSE(report.passed());
  for (std::size_t i = 0; i < report.failures.size(); ++i) {
    if (i > 0) EXPECT_LT(report.failures[i - 1].pair_index, report.failures[i].pair_index);
    const Graph g1 = parse_graph6(report.failures[i].g1);
    const Graph g2 = parse_graph6(report.failures[i].g2);
    EXPECT_TRUE(f2_member(g1) && f2_member(g2));
    EXPECT_FALSE(brute_force_clique(intersect(g1, g2), 3));
  }
  const auto serial = verify_exhaustive(FamilyOracle::majority(), 4, 3, {.threads = 1});
  ASSERT_EQ(serial.failures.size(), report.failures.size());
  for (std::size_t i = 0; i < bad; ++i) {
    EXPECT_EQ(serial.failures[i].pair_index, report.failures[i].pair_index);
  }
  EXPECT_NE(to_text(report).find("status FAILED"), std::string::npos);
}

TEST(ExhaustiveTest, EmptyFamilyIsFlagged) {
  const auto report = verify_exhaustive(FamilyOracle::recursive(3, Probability(3, 4)), 4, 3);
  EXPECT_TRUE(report.empty_family);
  EXPECT_EQ(report.members, 0u);
  EXPECT_EQ(report.pairs_checked, 0u);
  EXPECT_FALSE(report.passed());
  EXPECT_NE(to_text(report).find("status empty-family"), std::string::npos);
}

TEST(ExhaustiveTest, TuranAndFixedCopyFamilies) {
  EXPECT_TRUE(verify_exhaustive(FamilyOracle::turan(2), 5, 3).passed());
  EXPECT_TRUE(verify_exhaustive(FamilyOracle::fixed_copy({{0, 1}, {1, 2}, {0, 2}}), 5, 3).passed());
  EXPECT_TRUE(verify_exhaustive(FamilyOracle::recursive(3, Probability(3, 4)), 7, 3).passed());
}

TEST(ExhaustiveTest, Caps) {
  EXPECT_THROW(verify_exhaustive(FamilyOracle::majority(), 9, 2), Error);
  VerifyOptions small;
  small.max_exhaustive_pairs = 100;
  EXPECT_THROW(verify_exhaustive(FamilyOracle::majority(), 4, 2, small), Error);
}

TEST(SampledTest, MatchingComplementsAreTriangleIntersecting) {
  const Probability p(3, 4);
  const auto oracle = FamilyOracle::recursive(3, p);
  const auto members = matching_complements(10, 200, 5);
  for (const auto& g : members) ASSERT_TRUE(oracle.contains(g));
  const auto report = verify_sampled(oracle, 10, 3, members, 1000, 17);
  EXPECT_EQ(report.pairs_checked, 1000u);
  EXPECT_TRUE(report.passed());
  std::uint64_t total = 0;
  for (auto [size, count] : report.witness_sizes) {
    EXPECT_GE(size, 3);
    total += count;
  }
  EXPECT_EQ(total, 1000u);
  const auto again = verify_sampled(oracle, 10, 3, members, 1000, 17, {.threads = 1});
  EXPECT_EQ(again.witness_sizes, report.witness_sizes);
}

TEST(SampledTest, RejectionSource) {
  const auto report = verify_intersecting(FamilyOracle::majority(), 6, 2, VerifyMode::kSampled, 300, 4,
                                          RejectionSource{Probability(1, 2)});
  EXPECT_EQ(report.mode, VerifyMode::kSampled);
  EXPECT_EQ(report.pairs_checked, 300u);
  EXPECT_TRUE(report.passed());
  const auto failing = verify_intersecting(FamilyOracle::majority(), 6, 4, VerifyMode::kSampled, 300, 4,
                                           RejectionSource{Probability(1, 2)});
  EXPECT_FALSE(failing.failures.empty());
}

TEST(WitnessTest, CompleteGraph) {
  const Graph k5 = Graph::complete(5);
  const auto w = extract_witness(k5, k5, 3, Probability(3, 4));
  EXPECT_EQ(w.vertices.members(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(w.t, 3);
  ASSERT_EQ(w.steps.size(), 1u);
  EXPECT_EQ(w.steps[0].pivot, 0);
  EXPECT_EQ(w.steps[0].neighborhood, 4);
}

TEST(WitnessTest, MajorityPairsShareAnEdge) {
  const auto members = enumerate_members(FamilyOracle::majority(), 4);
  for (const auto& a : members) {
    for (const auto& b : members) {
      const auto w = extract_witness(a, b, 2, Probability(3, 4));
      ASSERT_EQ(w.vertices.size(), 2);
      const auto vs = w.vertices.members();
      EXPECT_TRUE(a.has_edge(vs[0], vs[1]) && b.has_edge(vs[0], vs[1]));
      // Lexicographically smallest common edge.
      const Graph common = intersect(a, b);
      EXPECT_EQ(common.edges().front(), std::make_pair(vs[0], vs[1]));
    }
  }
}

TEST(WitnessTest, MatchingComplementPairs) {
  const Probability p(3, 4);
  const auto left = matching_complements(10, 1000, 1);
  const auto right = matching_complements(10, 1000, 2);
  for (std::size_t i = 0; i < left.size(); ++i) {
    const auto w = extract_witness(left[i], right[i], 3, p);
    const Graph common = intersect(left[i], right[i]);
    ASSERT_EQ(w.vertices.size(), 3);
    EXPECT_TRUE(is_clique_of(w.vertices, common));
    for (const auto& step : w.steps) {
      EXPECT_TRUE(step.degree_bound_holds);
      if (step.level == 3) EXPECT_GE(step.neighborhood, 3);  // >= 2.25
    }
  }
}

TEST(WitnessTest, LevelFour) {
  // At p = 9/10 the level-4 family already contains K_10.
  const Probability p(9, 10);
  const Graph k = Graph::complete(10);
  const auto w = extract_witness(k, k, 4, p, {.verify_membership = true});
  EXPECT_EQ(w.vertices.members(), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(w.steps.size(), 2u);
}

TEST(WitnessTest, NonMembersAreRejected) {
  const Probability p(3, 4);
  const Graph empty(10);
  const Graph full = Graph::complete(10);
  try {
    extract_witness(empty, full, 3, p);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWitnessNotFound);
  }
  SplitMix64 rng(3);
  const Graph bad = two_path_complement(10, rng);
  try {
    extract_witness(bad, full, 3, p, {.verify_membership = true});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWitnessNotFound);
  }
  EXPECT_THROW(extract_witness(Graph(4), Graph(5), 3, p), Error);
  EXPECT_THROW(extract_witness(full, full, 3, Probability(1, 2)), Error);
}

TEST(GeneratorTest, Characterization) {
  const auto oracle = FamilyOracle::recursive(3, Probability(3, 4));
  SplitMix64 rng(8);
  for (int n = 10; n <= 11; ++n) {
    for (int i = 0; i < 30; ++i) {
      const Graph g = matching_complement(n, rng);
      const Graph missing = complement(g);
      for (int v = 0; v < n; ++v) EXPECT_LE(missing.degree(v), 1);
      EXPECT_TRUE(oracle.contains(g));
      const Graph h = two_path_complement(n, rng);
      int deg2 = 0;
      for (int v = 0; v < n; ++v) deg2 += complement(h).degree(v) >= 2;
      EXPECT_GT(deg2, 0);
      EXPECT_FALSE(oracle.contains(h));
    }
  }
  EXPECT_EQ(matching_complement(6, rng, 0), Graph::complete(6));
  EXPECT_EQ(edge_count(matching_complement(6, rng, 3)), 12);
}

TEST(SweepTest, MajorityThreshold) {
  const std::vector<Probability> grid = {Probability(9, 20), Probability(1, 2), Probability(11, 20)};
  const auto rows = sharp_threshold_sweep(FamilyOracle::majority(), 20, grid, 0, 0);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[0].estimate.value, 0.45);
  EXPECT_LT(rows[1].estimate.value, 0.5);
  EXPECT_GT(rows[2].estimate.value, 0.85);
  EXPECT_EQ(rows[2].estimate.method, MeasureMethod::kClosedForm);
  const auto single = sharp_threshold_sweep(FamilyOracle::majority(), 20, {Probability(1, 2)}, 0, 0);
  EXPECT_EQ(single.size(), 1u);
  double prev = 0;
  for (int n : {10, 15, 20}) {
    const double v = sharp_threshold_sweep(FamilyOracle::majority(), n, {Probability(11, 20)}, 0, 0)[0].estimate.value;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(SweepTest, MonteCarloRowsAreSeeded) {
  const auto grid = probability_grid(BigRational(3, 10), BigRational(7, 10), 5);
  const auto a = sharp_threshold_sweep(FamilyOracle::turan(2), 7, grid, 2000, 42);
  const auto b = sharp_threshold_sweep(FamilyOracle::turan(2), 7, grid, 2000, 42, 1);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].estimate.method, MeasureMethod::kMonteCarlo);
    EXPECT_EQ(to_record(a[i].estimate), to_record(b[i].estimate));
    const auto direct = mu_monte_carlo(FamilyOracle::turan(2), 7, grid[i], 2000, derive_seed(42, i));
    EXPECT_EQ(direct.value, a[i].estimate.value);
  }
  // Recursive templates follow the grid value.
  const auto rec = sharp_threshold_sweep(FamilyOracle::recursive(3, Probability(3, 4)), 8,
                                         {Probability(3, 5), Probability(9, 10)}, 200, 1);
  EXPECT_EQ(rec.size(), 2u);
}

TEST(SweepTest, Grid) {
  const auto grid = probability_grid(BigRational(2, 5), BigRational(3, 5), 21);
  ASSERT_EQ(grid.size(), 21u);
  EXPECT_EQ(grid.front(), Probability(2, 5));
  EXPECT_EQ(grid[5], Probability(9, 20));
  EXPECT_EQ(grid[10], Probability(1, 2));
  EXPECT_EQ(grid.back(), Probability(3, 5));
  EXPECT_EQ(probability_grid(BigRational(1, 3), BigRational(1, 3), 1).size(), 1u);
  EXPECT_THROW(probability_grid(BigRational(0), BigRational(1, 2), 3), Error);
  EXPECT_THROW(probability_grid(BigRational(1, 4), BigRational(1, 2), 0), Error);
}

}  // namespace
}  // namespace hfam
