#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hfam/probability.hpp"

namespace hfam {

/// Largest N accepted by the exact-rational tail.
inline constexpr std::int64_t kExactTailMaxTrials = 2000;

/// Pr[Bin(N,p) <= k]. Away from the mean the tail is summed outward from
/// k with incremental ratios, anchored on Loader's saddle-point form of the
/// pmf; near the mean, where that would take ~sqrt(N) steps, the regularized
/// incomplete beta function is used instead. Throws kRange unless 0 <= k <= N.
double binom_tail_le(std::int64_t trials, const Probability& p, std::int64_t k);

/// Natural log of binom_tail_le, finite even where the tail underflows.
double log_binom_tail_le(std::int64_t trials, const Probability& p, std::int64_t k);

/// Exact Pr[Bin(N,p) <= k]. Throws kCapExceeded for N > max_trials.
BigRational binom_tail_le_exact(std::int64_t trials, const Probability& p, std::int64_t k,
                                std::int64_t max_trials = kExactTailMaxTrials);

/// log Pr[Bin(N,p) = k].
double log_binom_pmf(std::int64_t trials, const Probability& p, std::int64_t k);

/// D(a || b) in nats. Throws kDomain unless both lie in (0,1).
double kl_divergence(double a, double b);

/// exp(-N D(p' || p)), the Chernoff bound on Pr[Bin(N,p) <= p' N].
/// Throws kOrdering unless p' < p.
double chernoff_upper(std::int64_t trials, const Probability& p, const Probability& p_prime);

/// ln C(n, k).
double log_choose(std::int64_t n, std::int64_t k);

/// One row of the condition-(2) union bound: all C(n,s) subsets of size s,
/// each failing with probability at most `failure`.
struct SubsetTerm {
  std::int64_t size = 0;
  double log_count = 0;    // ln C(n, s)
  double log_failure = 0;  // ln of the per-subset failure bound
  double failure = 0;      // min(1, exp(log_failure))
  double product = 0;      // exp(log_count + log_failure); may be +inf
};

/// Itemized lower bound on the measure of the level-t recursive family.
///
/// lower_bound = max(0, 1 - term_cond1 - sum of products), summed in
/// ascending size order. At t = 2 there are no subset terms and term_cond1
/// is the exact probability that G(n,p) is not a strict-majority graph.
struct BoundCertificate {
  int t = 2;
  std::int64_t n = 0;
  Probability p{3, 4};
  std::int64_t pairs = 0;            // C(n,2)
  std::int64_t cond1_min_edges = 0;  // integer form of the edge-count threshold
  double log_term_cond1 = 0;
  double term_cond1 = 0;
  std::int64_t min_subset_size = 0;
  std::vector<SubsetTerm> terms;
  double lower_bound = 0;
};

/// Recomputes max(0, 1 - term_cond1 - sum products) from the stored terms.
double recompute_lower_bound(const BoundCertificate& cert);

/// Checks the structural invariants: subset sizes cover exactly the
/// qualifying range, failures lie in [0,1], products and the lower bound
/// agree with the logged values. Returns an empty string when valid, else a
/// description of the first problem found.
std::string check_certificate(const BoundCertificate& cert);

/// Line-oriented text form, one key per line followed by the terms table.
std::string to_text(const BoundCertificate& cert);
BoundCertificate parse_certificate(std::string_view text);

/// Memoizing evaluator for the recursive union bound at a fixed p.
///
/// Sub-level failure probabilities are cached by (level, size) and held in
/// log space so that terms such as C(n,s) * 1e-400 stay finite.
class BoundEngine {
 public:
  explicit BoundEngine(const Probability& p);

  const Probability& p() const noexcept { return p_; }

  /// Full certificate. Throws kRange for t < 2 or n < 0.
  BoundCertificate certificate(int t, std::int64_t n);

  /// ln of min(1, failure bound) for the level-t family on n vertices.
  double log_failure(int t, std::int64_t n);

  /// Whether the certified lower bound exceeds `target` by more than 1e-12;
  /// stops summing as soon as the answer is known.
  bool exceeds(int t, std::int64_t n, const BigRational& target);

 private:
  double compute_log_failure(int t, std::int64_t n, double stop_above);

  Probability p_;
  std::vector<std::vector<double>> cache_;  // [t][n], NaN = not computed
};

/// Certificate from a fresh engine. Throws kInvalidProbability for p <= 1/2.
BoundCertificate mu_lower_bound(int t, std::int64_t n, const Probability& p);

inline constexpr std::int64_t kDefaultSearchCap = 100000;

struct CounterexampleSearch {
  bool found = false;
  std::int64_t n_star = 0;  // cap when not found
  BoundCertificate certificate;
  std::int64_t evaluations = 0;
};

/// Smallest n <= cap whose certified lower bound exceeds `target`: doubling,
/// then binary search, then a scan of every smaller n to catch
/// non-monotone stretches. When nothing crosses, returns found = false with
/// the certificate at the cap.
CounterexampleSearch find_counterexample_n(int t, const Probability& p, const BigRational& target,
                                           std::int64_t cap = kDefaultSearchCap);

}  // namespace hfam
