#include "hfam/probability.hpp"

#include <cctype>
#include <cstdio>
#include <numeric>

#include "hfam/error.hpp"

namespace hfam {
namespace {

using i128 = __int128;

// Denominators beyond this make the __int128 threshold products unsafe
// for the vertex counts the bound engine handles (n <= 1e5).
constexpr std::int64_t kMaxDenominator = 1'000'000'000'000LL;

BigInt parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw Error(ErrorCode::kMalformed, "malformed number '" + std::string(whole) + "'");
  }
  BigInt v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::kMalformed, "malformed number '" + std::string(whole) + "'");
    }
    v = v * 10 + (c - '0');
  }
  return v;
}

std::int64_t ceil_div(i128 a, i128 b) {
  // b > 0
  i128 q = a / b;
  if (a % b != 0 && a > 0) ++q;
  return static_cast<std::int64_t>(q);
}

}  // namespace

Probability::Probability(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num <= 0 || num >= den) {
    throw Error(ErrorCode::kInvalidProbability,
                "probability must lie strictly between 0 and 1, got " +
                    std::to_string(num) + "/" + std::to_string(den));
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
  if (den_ > kMaxDenominator) {
    throw Error(ErrorCode::kInvalidProbability, "probability denominator too large");
  }
}

Probability Probability::parse(std::string_view text) {
  BigRational r = parse_rational(text);
  BigInt n = boost::multiprecision::numerator(r);
  BigInt d = boost::multiprecision::denominator(r);
  if (n <= 0 || n >= d) {
    throw Error(ErrorCode::kInvalidProbability,
                "probability must lie strictly between 0 and 1, got '" + std::string(text) + "'");
  }
  if (d > kMaxDenominator) {
    throw Error(ErrorCode::kInvalidProbability, "probability denominator too large");
  }
  return Probability(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

std::string Probability::str() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

BigRational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt n = parse_digits(text.substr(0, slash), text);
    BigInt d = parse_digits(text.substr(slash + 1), text);
    if (d == 0) throw Error(ErrorCode::kMalformed, "zero denominator in '" + std::string(text) + "'");
    return BigRational(n, d);
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return BigRational(parse_digits(text, text));
  std::string_view int_part = text.substr(0, dot);
  std::string_view frac_part = text.substr(dot + 1);
  if (int_part.empty() && frac_part.empty()) {
    throw Error(ErrorCode::kMalformed, "malformed number '" + std::string(text) + "'");
  }
  BigInt whole = int_part.empty() ? BigInt(0) : parse_digits(int_part, text);
  BigInt frac = frac_part.empty() ? BigInt(0) : parse_digits(frac_part, text);
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac_part.size()));
  return BigRational(whole * scale + frac, scale);
}

std::string format_decimal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_rational(const BigRational& r) {
  BigInt d = boost::multiprecision::denominator(r);
  std::string s = boost::multiprecision::numerator(r).str();
  if (d != 1) s += "/" + d.str();
  return s;
}

std::int64_t majority_min_edges(std::int64_t m) { return choose2(m) / 2 + 1; }

std::int64_t dense_min_edges(std::int64_t m, const Probability& p) {
  // e >= (2 num + den) C(m,2) / (4 den)
  const i128 lhs = static_cast<i128>(2 * p.num() + p.den()) * choose2(m);
  return ceil_div(lhs, static_cast<i128>(4) * p.den());
}

std::int64_t min_subset_size(std::int64_t m, const Probability& p) {
  // s >= (2 num - den) (m - 1) / (2 den)
  const i128 lhs = static_cast<i128>(2 * p.num() - p.den()) * (m - 1);
  const std::int64_t s = lhs <= 0 ? 0 : ceil_div(lhs, static_cast<i128>(2) * p.den());
  return s < 1 ? 1 : s;
}

}  // namespace hfam
