#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace hfam {

using BigRational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// An exact rational strictly between 0 and 1, stored reduced.
///
/// Every threshold in the families and bounds modules is compared against
/// the numerator/denominator pair in integer arithmetic; `value()` exists
/// only for reporting and for the floating-point tail routines.
class Probability {
 public:
  /// Throws kInvalidProbability unless 0 < num/den < 1.
  Probability(std::int64_t num, std::int64_t den);

  /// Accepts "3/4" or a finite decimal such as "0.75" (converted exactly).
  static Probability parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / den_; }
  BigRational exact() const { return BigRational(num_, den_); }

  /// 1 - p.
  Probability complement() const { return Probability(den_ - num_, den_); }
  bool exceeds_half() const noexcept { return 2 * num_ > den_; }

  std::string str() const;

  friend bool operator==(const Probability&, const Probability&) = default;
  friend bool operator<(const Probability& a, const Probability& b) {
    return static_cast<__int128>(a.num_) * b.den_ <
           static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator<=(const Probability& a, const Probability& b) {
    return !(b < a);
  }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

/// Parses a rational "a/b" or finite decimal into a reduced BigRational.
/// Unlike Probability this allows any non-negative value.
BigRational parse_rational(std::string_view text);

/// Formats a double with 17 significant digits.
std::string format_decimal(double x);
std::string format_rational(const BigRational& r);

inline std::int64_t choose2(std::int64_t m) { return m * (m - 1) / 2; }

// Exact integer forms of the construction's thresholds. All take the
// vertex count m of the graph being tested.

/// Smallest edge count strictly above half of C(m,2).
std::int64_t majority_min_edges(std::int64_t m);

/// Smallest integer edge count e with e >= ((p + 1/2) / 2) * C(m,2).
std::int64_t dense_min_edges(std::int64_t m, const Probability& p);

/// Smallest nonempty subset size s with s >= (p - 1/2) * (m - 1).
/// Returns 1 when the rational bound is <= 1, so the empty set never
/// qualifies.
std::int64_t min_subset_size(std::int64_t m, const Probability& p);

}  // namespace hfam
