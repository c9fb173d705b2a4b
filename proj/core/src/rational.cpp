#include "scdim/rational.hpp"

#include <algorithm>
#include <cctype>

#include "scdim/errors.hpp"

namespace scdim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw InvalidInput("malformed rational '" + std::string(whole) + "'");
  Integer z(std::string(s), 10);
  return negative ? Integer(-z) : z;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw InvalidInput("empty rational");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(trim(s.substr(0, slash)), s);
    Integer den = parse_integer(trim(s.substr(slash + 1)), s);
    if (den == 0) throw InvalidInput("zero denominator in '" + std::string(s) + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    bool negative = false;
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
      negative = int_part.front() == '-';
      int_part.remove_prefix(1);
    }
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac.empty() && !all_digits(frac)) ||
        (int_part.empty() && frac.empty())) {
      throw InvalidInput("malformed decimal '" + std::string(s) + "'");
    }
    Integer whole = int_part.empty() ? Integer(0) : Integer(std::string(int_part), 10);
    Integer scale = 1;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    Integer fraction = frac.empty() ? Integer(0) : Integer(std::string(frac), 10);
    Rational r(whole * scale + fraction, scale);
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_integer(s, s));
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_string(const ExtendedRational& value) {
  return value.is_infinite() ? std::string("inf") : to_string(value.value());
}

Rational make_rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational pow(const Rational& base, std::uint64_t exponent) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational pow_bounded(const Rational& base, std::uint64_t exponent, std::size_t max_bits) {
  const std::size_t num_bits = mpz_sizeinbase(base.get_num_mpz_t(), 2);
  const std::size_t den_bits = mpz_sizeinbase(base.get_den_mpz_t(), 2);
  const std::size_t widest = std::max(num_bits, den_bits);
  // |base| in {0, 1} never grows.
  if (widest > 1 && exponent > 0 && (widest - 1) > max_bits / exponent) {
    throw CapExceeded("power exceeds the evaluation size cap of " + std::to_string(max_bits) + " bits");
  }
  return pow(base, exponent);
}

Rational pow3(std::int64_t k) {
  Integer p;
  const auto magnitude = static_cast<unsigned long>(k < 0 ? -k : k);
  mpz_ui_pow_ui(p.get_mpz_t(), 3, magnitude);
  if (k >= 0) return Rational(p);
  Rational r(Integer(1), p);
  r.canonicalize();
  return r;
}

std::int64_t ceil_log3(const Rational& value) {
  if (sgn(value) <= 0) throw DomainError("ceil_log3 of a nonpositive value");
  std::int64_t k = 0;
  // Coarse estimate from bit lengths, then exact correction.
  const double approx = (static_cast<double>(mpz_sizeinbase(value.get_num_mpz_t(), 2)) -
                         static_cast<double>(mpz_sizeinbase(value.get_den_mpz_t(), 2))) /
                        1.584962500721156;
  k = static_cast<std::int64_t>(approx);
  while (pow3(k) < value) ++k;
  while (pow3(k - 1) >= value) --k;
  return k;
}

std::optional<Rational> exact_root(const Rational& value, std::uint64_t n) {
  if (n == 0) return std::nullopt;
  if (n == 1) return value;
  if (sgn(value) < 0) return std::nullopt;
  Integer num_root, den_root;
  const bool num_exact = mpz_root(num_root.get_mpz_t(), value.get_num_mpz_t(), n) != 0;
  const bool den_exact = mpz_root(den_root.get_mpz_t(), value.get_den_mpz_t(), n) != 0;
  if (!num_exact || !den_exact) return std::nullopt;
  Rational r(num_root, den_root);
  r.canonicalize();
  return r;
}

Rational root_upper_bound(const Rational& value, std::uint64_t n) {
  if (sgn(value) < 0) throw DomainError("root of a negative value");
  if (auto exact = exact_root(value, n)) return *exact;
  if (value <= 1) return Rational(1);
  Integer target = scdim::ceil(value).get_num();
  Integer root;
  const bool exact = mpz_root(root.get_mpz_t(), target.get_mpz_t(), n) != 0;
  if (!exact) root += 1;
  return Rational(root);
}

Rational root_lower_bound(const Rational& value, std::uint64_t n) {
  if (sgn(value) < 0) throw DomainError("root of a negative value");
  if (auto exact = exact_root(value, n)) return *exact;
  Integer target = scdim::floor(value).get_num();
  Integer root;
  mpz_root(root.get_mpz_t(), target.get_mpz_t(), n);
  return Rational(root);
}

std::size_t bit_size(const Rational& value) {
  return mpz_sizeinbase(value.get_num_mpz_t(), 2) + mpz_sizeinbase(value.get_den_mpz_t(), 2);
}

double to_double(const Rational& value) { return value.get_d(); }

Rational floor(const Rational& value) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return Rational(q);
}

Rational ceil(const Rational& value) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return Rational(q);
}

}  // namespace scdim
