#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace scdim {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses `p/q`, a signed integer, or an exact decimal such as `-1.25`.
/// Decimals are converted to the exact fraction they denote.
Rational parse_rational(std::string_view text);

/// `p` when the denominator is one, `p/q` otherwise.
std::string to_string(const Rational& value);

Rational make_rational(long num, long den = 1);

Rational pow(const Rational& base, std::uint64_t exponent);

/// pow() that throws CapExceeded instead of materializing a result larger
/// than `max_bits`.
Rational pow_bounded(const Rational& base, std::uint64_t exponent, std::size_t max_bits = std::size_t{1} << 28);

/// 3^k for any integer k (negative k gives 1/3^|k|).
Rational pow3(std::int64_t k);

/// Smallest k with 3^k >= value; value must be positive.
std::int64_t ceil_log3(const Rational& value);

/// The exact n-th root when `value` is the n-th power of a rational.
std::optional<Rational> exact_root(const Rational& value, std::uint64_t n);

/// The exact n-th root when it is rational; otherwise the smallest
/// nonnegative integer t with t^n >= value. Always an upper bound of the
/// real root. `value` must be nonnegative.
Rational root_upper_bound(const Rational& value, std::uint64_t n);

/// The exact n-th root when it is rational; otherwise the largest
/// nonnegative integer t with t^n <= value. Always a lower bound of the real root.
Rational root_lower_bound(const Rational& value, std::uint64_t n);

/// Number of bits needed to store numerator and denominator.
std::size_t bit_size(const Rational& value);

double to_double(const Rational& value);

Rational floor(const Rational& value);
Rational ceil(const Rational& value);

// A rational extended by +infinity. Used where the empty-complement
// convention d(x, {}) = +inf makes a value unbounded.
class ExtendedRational {
 public:
  ExtendedRational() = default;
  ExtendedRational(Rational value) : value_(std::move(value)) {}  // NOLINT

  static ExtendedRational infinity() {
    ExtendedRational r;
    r.infinite_ = true;
    return r;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  // Only meaningful when finite.
  const Rational& value() const { return value_; }

  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
    if (a.infinite_) return std::strong_ordering::greater;
    if (b.infinite_) return std::strong_ordering::less;
    int c = cmp(a.value_, b.value_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Rational value_{0};
  bool infinite_ = false;
};

std::string to_string(const ExtendedRational& value);

}  // namespace scdim
