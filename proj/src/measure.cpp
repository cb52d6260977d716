#include "hfam/measure.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <sstream>
#include <thread>

#include "hfam/bounds.hpp"
#include "hfam/error.hpp"
#include "hfam/graph.hpp"
#include "hfam/random.hpp"

namespace hfam {
namespace {

// Runs body(chunk) for chunk in [0, chunks) across `threads` workers.
template <class Body>
void parallel_chunks(std::uint64_t chunks, unsigned threads, Body&& body) {
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t c = next++; c < chunks; c = next++) body(c);
    });
  }
}

MeasureEstimate exact_estimate(MeasureMethod method, double value, std::optional<BigRational> exact) {
  MeasureEstimate e;
  e.method = method;
  e.value = value;
  e.exact = std::move(exact);
  e.ci_low = e.ci_high = value;
  return e;
}

}  // namespace

std::string_view to_string(MeasureMethod method) {
  switch (method) {
    case MeasureMethod::kExactEnumeration: return "exact-enumeration";
    case MeasureMethod::kClosedForm: return "closed-form";
    case MeasureMethod::kMonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double center = (phat + z2 / (2 * n)) / denom;
  const double half = z / denom * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n));
  Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  ci.low = std::min(ci.low, phat);
  ci.high = std::max(ci.high, phat);
  return ci;
}

std::vector<std::uint64_t> member_histogram(const FamilyOracle& oracle, int n,
                                            const ExactOptions& options) {
  Graph probe(n);  // validates n
  const auto slots = edge_slots(n);
  const int total = static_cast<int>(slots.size());
  if (total > options.max_slots) {
    throw Error(ErrorCode::kCapExceeded, "exact enumeration over " + std::to_string(total) +
                                             " edge slots exceeds cap " +
                                             std::to_string(options.max_slots));
  }
  oracle.check_feasible(n);

  // Fix the top `prefix_bits` slots per chunk and Gray-code the rest.
  const int prefix_bits = std::min(total, 6);
  const int low_bits = total - prefix_bits;
  const std::uint64_t chunks = std::uint64_t{1} << prefix_bits;
  std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(total + 1, 0));

  parallel_chunks(chunks, resolve_threads(options.threads), [&](std::uint64_t chunk) {
    Graph g(n);
    for (int b = 0; b < prefix_bits; ++b) {
      if ((chunk >> b) & 1U) {
        const auto [u, v] = slots[low_bits + b];
        g.toggle_edge(u, v);
      }
    }
    std::int64_t edges = std::popcount(chunk);
    MembershipContext ctx;
    auto& hist = partial[chunk];
    const std::uint64_t steps = std::uint64_t{1} << low_bits;
    for (std::uint64_t i = 0; i < steps; ++i) {
      if (i != 0) {
        // Gray code i ^ (i >> 1) differs from its predecessor in bit ctz(i).
        const int flip = std::countr_zero(i);
        const auto [u, v] = slots[flip];
        edges += ((g.neighbor_mask(u) >> v) & 1U) ? -1 : 1;
        g.toggle_edge(u, v);
      }
      if (oracle.contains(g, ctx)) ++hist[edges];
    }
  });

  std::vector<std::uint64_t> hist(total + 1, 0);
  for (const auto& part : partial) {
    for (int k = 0; k <= total; ++k) hist[k] += part[k];
  }
  return hist;
}

MeasureEstimate mu_exact(const FamilyOracle& oracle, int n, const Probability& p,
                         const ExactOptions& options) {
  const auto hist = member_histogram(oracle, n, options);
  const int total = static_cast<int>(hist.size()) - 1;
  if (total <= options.rational_max_slots) {
    const BigInt a = p.num();
    const BigInt c = p.den() - p.num();
    BigInt num = 0;
    for (int k = 0; k <= total; ++k) {
      if (hist[k] == 0) continue;
      num += BigInt(hist[k]) * boost::multiprecision::pow(a, k) *
             boost::multiprecision::pow(c, total - k);
    }
    BigRational value(num, boost::multiprecision::pow(BigInt(p.den()), total));
    return exact_estimate(MeasureMethod::kExactEnumeration, static_cast<double>(value), value);
  }
  // Neumaier-compensated sum of hist[k] p^k q^(N-k).
  const double lp = std::log(p.value());
  const double lq = std::log(static_cast<double>(p.den() - p.num()) / p.den());
  double sum = 0;
  double comp = 0;
  for (int k = 0; k <= total; ++k) {
    if (hist[k] == 0) continue;
    const double term = static_cast<double>(hist[k]) * std::exp(k * lp + (total - k) * lq);
    const double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return exact_estimate(MeasureMethod::kExactEnumeration, sum + comp, std::nullopt);
}

MeasureEstimate mu_closed_form_f2(std::int64_t n, const Probability& p) {
  if (n < 0) throw Error(ErrorCode::kRange, "negative vertex count");
  const std::int64_t pairs = choose2(n);
  if (pairs <= kExactTailMaxTrials) {
    BigRational value = BigRational(1) - binom_tail_le_exact(pairs, p, pairs / 2);
    return exact_estimate(MeasureMethod::kClosedForm, static_cast<double>(value), value);
  }
  const double value = -std::expm1(log_binom_tail_le(pairs, p, pairs / 2));
  return exact_estimate(MeasureMethod::kClosedForm, value, std::nullopt);
}

MeasureEstimate mu_monte_carlo(const FamilyOracle& oracle, int n, const Probability& p,
                               std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw Error(ErrorCode::kRange, "need at least one sample");
  Graph probe(n);
  oracle.check_feasible(n);

  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_chunks(chunks, resolve_threads(threads), [&](std::uint64_t chunk) {
    MembershipContext ctx;
    const std::uint64_t end = std::min(samples, (chunk + 1) * kChunk);
    std::uint64_t h = 0;
    for (std::uint64_t i = chunk * kChunk; i < end; ++i) {
      if (oracle.contains(sample_gnp(n, p, derive_seed(seed, i)), ctx)) ++h;
    }
    hits[chunk] = h;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;

  MeasureEstimate e;
  e.method = MeasureMethod::kMonteCarlo;
  e.exact = BigRational(total, samples);
  e.value = static_cast<double>(total) / static_cast<double>(samples);
  const Interval ci = wilson_interval(total, samples);
  e.ci_low = ci.low;
  e.ci_high = ci.high;
  e.samples = samples;
  e.seed = seed;
  return e;
}

std::string to_record(const MeasureEstimate& e) {
  std::ostringstream out;
  out << "method=" << to_string(e.method) << " value=" << format_decimal(e.value);
  if (e.exact) out << " value_rational=" << format_rational(*e.exact);
  out << " ci_low=" << format_decimal(e.ci_low) << " ci_high=" << format_decimal(e.ci_high)
      << " samples=" << e.samples << " seed=";
  if (e.seed) {
    out << *e.seed;
  } else {
    out << "-";
  }
  return out.str();
}

}  // namespace hfam
