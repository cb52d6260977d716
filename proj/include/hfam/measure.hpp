#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hfam/families.hpp"
#include "hfam/probability.hpp"

namespace hfam {

enum class MeasureMethod { kExactEnumeration, kClosedForm, kMonteCarlo };

std::string_view to_string(MeasureMethod method);

/// mu_p of a family on n vertices. Exact methods have ci_low == value ==
/// ci_high, zero samples and no seed; `exact` holds the rational value when
/// it was accumulated without rounding.
struct MeasureEstimate {
  MeasureMethod method = MeasureMethod::kExactEnumeration;
  double value = 0;
  std::optional<BigRational> exact;
  double ci_low = 0;
  double ci_high = 0;
  std::uint64_t samples = 0;
  std::optional<std::uint64_t> seed;
};

struct Interval {
  double low = 0;
  double high = 0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for `hits` successes in `trials` trials.
Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = kZ95);

struct ExactOptions {
  int max_slots = kDefaultEnumerationSlots;
  int rational_max_slots = 21;  // exact-rational accumulation up to C(n,2) = 21
  unsigned threads = 0;         // 0 = hardware concurrency
};

/// Number of members with k edges, for k = 0..C(n,2), by full enumeration of
/// edge subsets in Gray-code order. Throws kCapExceeded past max_slots.
std::vector<std::uint64_t> member_histogram(const FamilyOracle& oracle, int n,
                                            const ExactOptions& options = {});

/// Sum over members of p^|E| (1-p)^(C(n,2)-|E|).
MeasureEstimate mu_exact(const FamilyOracle& oracle, int n, const Probability& p,
                         const ExactOptions& options = {});

/// Pr[Bin(C(n,2), p) > C(n,2)/2], exact-rational when C(n,2) <= 2000.
MeasureEstimate mu_closed_form_f2(std::int64_t n, const Probability& p);

/// Fraction of `samples` draws of G(n,p) that are members. Sample i uses
/// seed derive_seed(seed, i), so the estimate does not depend on `threads`.
MeasureEstimate mu_monte_carlo(const FamilyOracle& oracle, int n, const Probability& p,
                               std::uint64_t samples, std::uint64_t seed, unsigned threads = 0);

/// Flat record: method, value, ci_low, ci_high, samples, seed, with the
/// value also given as a rational when known.
std::string to_record(const MeasureEstimate& estimate);

unsigned resolve_threads(unsigned requested);

}  // namespace hfam
