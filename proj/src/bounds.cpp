#include "hfam/bounds.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "hfam/error.hpp"

namespace hfam {
namespace {

constexpr double kLn2Pi = 1.837877066409345483560659472811;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// lgamma(n+1) - (n+1/2) ln n + n - ln sqrt(2 pi), for n = 0..15.
constexpr std::array<double, 16> kStirlingErrorTable = {
    0.0,
    0.08106146679532725822,
    0.041340695955409294094,
    0.027677925684998339149,
    0.020790672103765093112,
    0.016644691189821192163,
    0.013876128823070747999,
    0.011896709945891770095,
    0.010411265261972096497,
    0.0092554621827127329177,
    0.0083305634333628712565,
    0.007573675487951840795,
    0.0069428401072095298657,
    0.0064089941880042070684,
    0.0059513701127588477356,
    0.005554733551962801371,
};

double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12;
  constexpr double s1 = 1.0 / 360;
  constexpr double s2 = 1.0 / 1260;
  constexpr double s3 = 1.0 / 1680;
  constexpr double s4 = 1.0 / 1188;
  if (n <= 15) return kStirlingErrorTable[static_cast<std::size_t>(n)];
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x ln(x/np) + np - x, without cancellation when x is close to np.
double deviance(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

void check_tail_args(std::int64_t trials, std::int64_t k) {
  if (trials < 0 || k < 0 || k > trials) {
    throw Error(ErrorCode::kRange, "binomial tail needs 0 <= k <= N (N=" + std::to_string(trials) +
                                       ", k=" + std::to_string(k) + ")");
  }
}

std::string fmt(double x) { return format_decimal(x); }

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return kNegInf;
  // from_chars, unlike stod, accepts subnormal values.
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw Error(ErrorCode::kMalformed, "bad number '" + s + "'");
  }
  return v;
}

}  // namespace

double log_binom_pmf(std::int64_t trials, const Probability& p, std::int64_t k) {
  check_tail_args(trials, k);
  const double n = static_cast<double>(trials);
  const double x = static_cast<double>(k);
  const double pv = p.value();
  const double qv = static_cast<double>(p.den() - p.num()) / p.den();
  if (k == 0) return n * std::log(qv);
  if (k == trials) return n * std::log(pv);
  const double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x) -
                    deviance(x, n * pv) - deviance(n - x, n * qv);
  const double lf = kLn2Pi + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

double log_binom_tail_le(std::int64_t trials, const Probability& p, std::int64_t k) {
  check_tail_args(trials, k);
  if (k == trials) return 0.0;
  const double n = static_cast<double>(trials);
  const double q_over_p = static_cast<double>(p.den() - p.num()) / p.num();
  const bool lower_side = static_cast<double>(k) < n * p.value();
  // Ratio of neighbouring terms at the start of the summation. Near the mean it is
  // close to 1 and direct summation needs ~sqrt(N) steps, so defer to the
  // incomplete beta function there as long as its result is representable.
  const double ratio = lower_side
                           ? static_cast<double>(k) / (n - static_cast<double>(k) + 1) * q_over_p
                           : (n - static_cast<double>(k) - 1) / (static_cast<double>(k) + 2) / q_over_p;
  if (ratio > 0.98) {
    const double a = static_cast<double>(k) + 1;
    const double b = n - static_cast<double>(k);
    if (lower_side) {
      const double v = boost::math::ibetac(a, b, p.value());
      if (v > 1e-290) return std::log(v);
    } else {
      return std::log1p(-boost::math::ibeta(a, b, p.value()));
    }
  }
  if (lower_side) {
    // Terms decrease from k downwards; sum them relative to the k-th.
    double sum = 1.0;
    double term = 1.0;
    for (std::int64_t j = k; j >= 1; --j) {
      term *= static_cast<double>(j) / static_cast<double>(trials - j + 1) * q_over_p;
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return log_binom_pmf(trials, p, k) + std::log(sum);
  }
  // Upper tail from k+1 upwards is at most about one half; complement it.
  double sum = 1.0;
  double term = 1.0;
  for (std::int64_t j = k + 1; j < trials; ++j) {
    term *= static_cast<double>(trials - j) / static_cast<double>(j + 1) / q_over_p;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  const double upper = std::exp(log_binom_pmf(trials, p, k + 1)) * sum;
  return std::log1p(-upper);
}

double binom_tail_le(std::int64_t trials, const Probability& p, std::int64_t k) {
  return std::exp(log_binom_tail_le(trials, p, k));
}

BigRational binom_tail_le_exact(std::int64_t trials, const Probability& p, std::int64_t k,
                                std::int64_t max_trials) {
  check_tail_args(trials, k);
  if (trials > max_trials) {
    throw Error(ErrorCode::kCapExceeded, "exact binomial tail capped at N=" +
                                             std::to_string(max_trials));
  }
  const BigInt a = p.num();
  const BigInt c = p.den() - p.num();
  const BigInt b = p.den();
  // sum_{j<=k} C(N,j) a^j c^(N-j) = c^(N-k) * sum_{j<=k} C(N,j) a^j c^(k-j), by Horner in c.
  BigInt horner = 0;
  BigInt binom = 1;
  BigInt a_pow = 1;
  for (std::int64_t j = 0; j <= k; ++j) {
    horner = horner * c + binom * a_pow;
    binom = binom * (trials - j) / (j + 1);
    a_pow *= a;
  }
  using boost::multiprecision::pow;
  const BigInt num = horner * pow(c, static_cast<unsigned>(trials - k));
  const BigInt den = pow(b, static_cast<unsigned>(trials));
  return BigRational(num, den);
}

double kl_divergence(double a, double b) {
  if (!(a > 0 && a < 1 && b > 0 && b < 1)) {
    throw Error(ErrorCode::kDomain, "kl_divergence needs arguments in (0,1)");
  }
  if (a == b) return 0.0;
  return a * std::log(a / b) + (1 - a) * std::log((1 - a) / (1 - b));
}

double chernoff_upper(std::int64_t trials, const Probability& p, const Probability& p_prime) {
  if (!(p_prime < p)) {
    throw Error(ErrorCode::kOrdering, "chernoff_upper needs p' < p, got p'=" + p_prime.str() +
                                          " p=" + p.str());
  }
  if (trials < 0) throw Error(ErrorCode::kRange, "negative trial count");
  if (trials == 0) return 1.0;
  return std::exp(-static_cast<double>(trials) * kl_divergence(p_prime.value(), p.value()));
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) throw Error(ErrorCode::kRange, "log_choose needs 0 <= k <= n");
  if (k == 0 || k == n) return 0.0;
  // C(n,k) = 2^n Pr[Bin(n,1/2) = k].
  return log_binom_pmf(n, Probability(1, 2), k) + static_cast<double>(n) * std::log(2.0);
}

double recompute_lower_bound(const BoundCertificate& cert) {
  double acc = 1.0 - cert.term_cond1;
  for (const auto& term : cert.terms) acc -= term.product;
  return acc > 0 ? acc : 0.0;
}

std::string check_certificate(const BoundCertificate& cert) {
  if (cert.t < 2) return "t must be at least 2";
  if (cert.pairs != choose2(cert.n)) return "pairs != C(n,2)";
  if (!(cert.term_cond1 >= 0 && cert.term_cond1 <= 1)) return "term_cond1 outside [0,1]";
  if (cert.term_cond1 != std::exp(cert.log_term_cond1)) return "term_cond1 != exp(log_term_cond1)";
  if (cert.t == 2) {
    if (cert.cond1_min_edges != majority_min_edges(cert.n)) return "majority threshold mismatch";
    if (!cert.terms.empty()) return "t=2 certificates carry no subset terms";
  } else {
    if (cert.cond1_min_edges != dense_min_edges(cert.n, cert.p)) return "edge threshold mismatch";
    const std::int64_t first = cert.n == 0 ? 0 : min_subset_size(cert.n, cert.p);
    if (cert.min_subset_size != first) return "min_subset_size mismatch";
    const std::int64_t expected = cert.n - first + 1;
    if (static_cast<std::int64_t>(cert.terms.size()) != expected) return "wrong number of subset terms";
    for (std::size_t i = 0; i < cert.terms.size(); ++i) {
      const auto& term = cert.terms[i];
      if (term.size != first + static_cast<std::int64_t>(i)) return "subset sizes not consecutive";
      if (!(term.failure >= 0 && term.failure <= 1)) return "failure outside [0,1]";
      if (term.log_failure > 0) return "log_failure positive";
      if (term.failure != std::min(1.0, std::exp(term.log_failure))) return "failure != exp(log_failure)";
      if (term.log_count != log_choose(cert.n, term.size)) return "log_count != ln C(n,s)";
      if (term.product != std::exp(term.log_count + term.log_failure)) return "product mismatch";
    }
  }
  if (cert.lower_bound != recompute_lower_bound(cert)) return "lower_bound does not re-sum";
  return {};
}

std::string to_text(const BoundCertificate& cert) {
  std::ostringstream out;
  out << "hfam-bound-certificate 1\n";
  out << "t " << cert.t << "\n";
  out << "n " << cert.n << "\n";
  out << "p " << cert.p.str() << "\n";
  out << "pairs " << cert.pairs << "\n";
  out << "cond1_min_edges " << cert.cond1_min_edges << "\n";
  out << "log_term_cond1 " << fmt(cert.log_term_cond1) << "\n";
  out << "term_cond1 " << fmt(cert.term_cond1) << "\n";
  out << "min_subset_size " << cert.min_subset_size << "\n";
  out << "terms " << cert.terms.size() << "\n";
  out << "# size log_count log_failure failure product\n";
  for (const auto& term : cert.terms) {
    out << term.size << " " << fmt(term.log_count) << " " << fmt(term.log_failure) << " "
        << fmt(term.failure) << " " << fmt(term.product) << "\n";
  }
  out << "lower_bound " << fmt(cert.lower_bound) << "\n";
  return out.str();
}

BoundCertificate parse_certificate(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto next = [&]() -> std::string {
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') return line;
    }
    throw Error(ErrorCode::kMalformed, "certificate truncated");
  };
  auto field = [&](const char* key) -> std::string {
    const std::string l = next();
    const std::string prefix = std::string(key) + " ";
    if (l.rfind(prefix, 0) != 0) {
      throw Error(ErrorCode::kMalformed, "expected '" + std::string(key) + "', got '" + l + "'");
    }
    return l.substr(prefix.size());
  };
  if (next() != "hfam-bound-certificate 1") throw Error(ErrorCode::kMalformed, "not a certificate");
  BoundCertificate cert;
  try {
    cert.t = std::stoi(field("t"));
    cert.n = std::stoll(field("n"));
    cert.p = Probability::parse(field("p"));
    cert.pairs = std::stoll(field("pairs"));
    cert.cond1_min_edges = std::stoll(field("cond1_min_edges"));
    cert.log_term_cond1 = parse_double(field("log_term_cond1"));
    cert.term_cond1 = parse_double(field("term_cond1"));
    cert.min_subset_size = std::stoll(field("min_subset_size"));
    const long long count = std::stoll(field("terms"));
    for (long long i = 0; i < count; ++i) {
      std::istringstream row(next());
      SubsetTerm term;
      std::string lc, lf, f, pr;
      if (!(row >> term.size >> lc >> lf >> f >> pr)) {
        throw Error(ErrorCode::kMalformed, "bad term row");
      }
      term.log_count = parse_double(lc);
      term.log_failure = parse_double(lf);
      term.failure = parse_double(f);
      term.product = parse_double(pr);
      cert.terms.push_back(term);
    }
    cert.lower_bound = parse_double(field("lower_bound"));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kMalformed, "bad number in certificate");
  }
  return cert;
}

BoundEngine::BoundEngine(const Probability& p) : p_(p) {
  if (!p.exceeds_half()) {
    throw Error(ErrorCode::kInvalidProbability, "bound engine needs p > 1/2, got " + p.str());
  }
}

double BoundEngine::log_failure(int t, std::int64_t n) {
  if (t < 2 || n < 0) throw Error(ErrorCode::kRange, "log_failure needs t >= 2 and n >= 0");
  if (cache_.size() <= static_cast<std::size_t>(t)) cache_.resize(t + 1);
  auto& row = cache_[t];
  if (row.size() <= static_cast<std::size_t>(n)) {
    row.resize(n + 1, std::numeric_limits<double>::quiet_NaN());
  }
  if (!std::isnan(row[n])) return row[n];
  const double v = compute_log_failure(t, n, 0.0);
  cache_[t][n] = v;
  return v;
}

double BoundEngine::compute_log_failure(int t, std::int64_t n, double stop_above) {
  const std::int64_t pairs = choose2(n);
  if (t == 2) return log_binom_tail_le(pairs, p_, pairs / 2);
  if (n == 0) return 0.0;
  const std::int64_t min_edges = dense_min_edges(n, p_);
  double acc = min_edges == 0 ? kNegInf : log_binom_tail_le(pairs, p_, min_edges - 1);
  for (std::int64_t s = min_subset_size(n, p_); s <= n; ++s) {
    if (acc >= stop_above) break;
    acc = log_add(acc, log_choose(n, s) + log_failure(t - 1, s));
  }
  return acc > 0 ? 0.0 : acc;
}

BoundCertificate BoundEngine::certificate(int t, std::int64_t n) {
  if (t < 2 || n < 0) throw Error(ErrorCode::kRange, "certificate needs t >= 2 and n >= 0");
  BoundCertificate cert;
  cert.t = t;
  cert.n = n;
  cert.p = p_;
  cert.pairs = choose2(n);
  if (t == 2) {
    cert.cond1_min_edges = majority_min_edges(n);
    cert.log_term_cond1 = log_binom_tail_le(cert.pairs, p_, cert.pairs / 2);
  } else {
    cert.cond1_min_edges = dense_min_edges(n, p_);
    cert.log_term_cond1 = cert.cond1_min_edges == 0
                              ? kNegInf
                              : log_binom_tail_le(cert.pairs, p_, cert.cond1_min_edges - 1);
    // The empty vertex set is only ever tested as the whole of an empty graph.
    cert.min_subset_size = n == 0 ? 0 : min_subset_size(n, p_);
    for (std::int64_t s = cert.min_subset_size; s <= n; ++s) {
      SubsetTerm term;
      term.size = s;
      term.log_count = log_choose(n, s);
      term.log_failure = log_failure(t - 1, s);
      term.failure = std::min(1.0, std::exp(term.log_failure));
      term.product = std::exp(term.log_count + term.log_failure);
      cert.terms.push_back(term);
    }
  }
  cert.term_cond1 = std::exp(cert.log_term_cond1);
  cert.lower_bound = recompute_lower_bound(cert);
  return cert;
}

bool BoundEngine::exceeds(int t, std::int64_t n, const BigRational& target) {
  if (target < 1) {
    // Cheap rejection: the failure sum already rules out the target.
    const double slack = std::log(static_cast<double>(BigRational(1) - target));
    if (t >= 3 && compute_log_failure(t, n, slack + 1e-9) > slack + 1e-9) return false;
  }
  // Rounding may push a bound that equals the target just above it; require a margin.
  const BigRational margin(1, 1000000000000LL);
  return BigRational(certificate(t, n).lower_bound) > target + margin;
}

BoundCertificate mu_lower_bound(int t, std::int64_t n, const Probability& p) {
  BoundEngine engine(p);
  return engine.certificate(t, n);
}

CounterexampleSearch find_counterexample_n(int t, const Probability& p, const BigRational& target,
                                           std::int64_t cap) {
  if (target >= 1) throw Error(ErrorCode::kRange, "target must be below 1");
  if (cap < 1) throw Error(ErrorCode::kRange, "search cap must be positive");
  BoundEngine engine(p);
  CounterexampleSearch result;
  auto crosses = [&](std::int64_t n) {
    ++result.evaluations;
    return engine.exceeds(t, n, target);
  };

  std::int64_t lo = 0;
  std::int64_t hi = 0;
  for (std::int64_t n = 1;;) {
    if (crosses(n)) {
      hi = n;
      break;
    }
    lo = n;
    if (n == cap) break;
    n = std::min(2 * n, cap);
  }
  if (hi == 0) {
    result.n_star = cap;
    result.certificate = engine.certificate(t, cap);
    return result;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (crosses(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // The bound need not be monotone in n; confirm nothing smaller crosses.
  for (std::int64_t n = 1; n < hi; ++n) {
    if (crosses(n)) {
      hi = n;
      break;
    }
  }
  result.found = true;
  result.n_star = hi;
  result.certificate = engine.certificate(t, hi);
  return result;
}

}  // namespace hfam
