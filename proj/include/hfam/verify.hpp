#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hfam/families.hpp"
#include "hfam/graph.hpp"
#include "hfam/measure.hpp"
#include "hfam/probability.hpp"
#include "hfam/random.hpp"

namespace hfam {

enum class VerifyMode { kExhaustive, kSampled };

std::string_view to_string(VerifyMode mode);

struct PairFailure {
  std::uint64_t pair_index = 0;
  std::string g1;  // graph6
  std::string g2;
};

struct VerificationReport {
  std::string family;
  int n = 0;
  int target_t = 0;
  VerifyMode mode = VerifyMode::kExhaustive;
  std::uint64_t members = 0;  // distinct members seen (exhaustive) or drawn
  bool empty_family = false;
  std::uint64_t pairs_checked = 0;
  std::vector<PairFailure> failures;  // sorted by pair_index
  // Clique number of each checked intersection.
  std::map<int, std::uint64_t> witness_sizes;
  std::chrono::duration<double> elapsed{};

  bool passed() const { return !empty_family && failures.empty(); }
};

/// Draws members by rejection from G(n, p).
struct RejectionSource {
  Probability p;
  std::uint64_t max_attempts_per_member = 100000;
};

/// Explicit members, e.g. from a characterization-based generator.
using MemberList = std::vector<Graph>;

using MemberSource = std::variant<RejectionSource, MemberList>;

struct VerifyOptions {
  int max_slots = kDefaultEnumerationSlots;
  std::uint64_t max_exhaustive_pairs = 50'000'000;
  unsigned threads = 0;
};

/// Every unordered pair of members (self-pairs included) must intersect in a
/// K_{target_t}. Throws kCapExceeded/kInfeasible when enumeration is out of
/// reach. An empty family yields a report with empty_family set.
VerificationReport verify_exhaustive(const FamilyOracle& oracle, int n, int target_t,
                                     const VerifyOptions& options = {});

/// `budget` random pairs drawn from `source`; pair i is fully determined by
/// (seed, i). Members of an explicit list are not re-checked here.
VerificationReport verify_sampled(const FamilyOracle& oracle, int n, int target_t,
                                  const MemberSource& source, std::uint64_t budget,
                                  std::uint64_t seed, const VerifyOptions& options = {});

VerificationReport verify_intersecting(const FamilyOracle& oracle, int n, int target_t,
                                       VerifyMode mode, std::uint64_t budget, std::uint64_t seed,
                                       const MemberSource& source, const VerifyOptions& options = {});

std::string to_text(const VerificationReport& report);

/// One level of the proof replay.
struct WitnessStep {
  int level = 0;        // clique size sought at this level
  int order = 0;        // vertices in the current graphs
  int pivot = -1;       // max-degree vertex in the local intersection
  int neighborhood = 0; // |T|
  bool degree_bound_holds = true;  // |T| >= (p - 1/2)(order - 1)
};

struct CliqueWitness {
  VertexSet vertices;
  int t = 0;
  std::vector<WitnessStep> steps;
};

struct WitnessOptions {
  bool verify_membership = false;  // re-run ft_member on both inputs first
  bool check_degree_bound = true;  // throw if a step violates the bound
};

/// Replays the inductive argument: take the max-degree vertex v of
/// G1 & G2, recurse into its neighborhood T at level t-1, and at t = 2 pick
/// the smallest common edge. The result is checked to be a clique of
/// G1 & G2 before it is returned. Throws kWitnessNotFound when the inputs
/// are not both members.
CliqueWitness extract_witness(const Graph& g1, const Graph& g2, int t, const Probability& p,
                              const WitnessOptions& options = {});

/// Complement of a uniformly random matching with `edges` edges (or a random
/// size in [0, n/2] when edges < 0). For t = 3, p = 3/4 and 10 <= n <= 13
/// these are exactly the members of the recursive family.
Graph matching_complement(int n, SplitMix64& rng, int edges = -1);

/// Complement of a graph containing a path u-v-w plus random extra missing
/// edges; never a member of the t = 3, p = 3/4 family for n in [10, 13].
Graph two_path_complement(int n, SplitMix64& rng);

struct SweepRow {
  Probability p;
  MeasureEstimate estimate;
};

/// mu_p at each grid point: closed form for the majority family, Monte
/// Carlo (seeded by derive_seed(seed, index)) otherwise. Recursive
/// templates are re-instantiated at each grid p.
std::vector<SweepRow> sharp_threshold_sweep(const FamilyOracle& oracle_template, int n,
                                            const std::vector<Probability>& grid,
                                            std::uint64_t samples, std::uint64_t seed,
                                            unsigned threads = 0);

/// `steps` evenly spaced exact rationals from `from` to `to` inclusive.
std::vector<Probability> probability_grid(const BigRational& from, const BigRational& to, int steps);

}  // namespace hfam
