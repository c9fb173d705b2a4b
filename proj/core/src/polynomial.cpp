#include "scdim/polynomial.hpp"

#include <sstream>

#include "scdim/errors.hpp"

namespace scdim {
namespace {

bool checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return !__builtin_mul_overflow(a, b, &out);
}

bool checked_add(std::uint64_t a, std::uint64_t b, std::uint64_t& out) {
  return !__builtin_add_overflow(a, b, &out);
}

bool within(const SparsePolynomial& p, const PolyLimits& limits) {
  if (p.term_count() > limits.max_terms) return false;
  for (const auto& [e, c] : p.terms()) {
    if (bit_size(c) > limits.max_coefficient_bits) return false;
  }
  return true;
}

}  // namespace

SparsePolynomial SparsePolynomial::constant(const Rational& c) { return monomial(c, 0); }

SparsePolynomial SparsePolynomial::monomial(const Rational& c, std::uint64_t exponent) {
  SparsePolynomial p;
  p.add_term(exponent, c);
  return p;
}

SparsePolynomial SparsePolynomial::piece_form(const Rational& a, std::uint64_t p, const Rational& b) {
  SparsePolynomial poly;
  poly.add_term(p, a);
  poly.add_term(0, b);
  return poly;
}

void SparsePolynomial::add_term(std::uint64_t exponent, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(exponent, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

std::uint64_t SparsePolynomial::degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

const Rational& SparsePolynomial::leading_coefficient() const {
  static const Rational zero(0);
  return terms_.empty() ? zero : terms_.rbegin()->second;
}

std::uint64_t SparsePolynomial::lowest_exponent() const { return terms_.empty() ? 0 : terms_.begin()->first; }

const Rational& SparsePolynomial::lowest_coefficient() const {
  static const Rational zero(0);
  return terms_.empty() ? zero : terms_.begin()->second;
}

Rational SparsePolynomial::coefficient(std::uint64_t exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational SparsePolynomial::evaluate(const Rational& x) const {
  Rational sum(0);
  for (const auto& [e, c] : terms_) sum += c * pow(x, e);
  return sum;
}

SparsePolynomial SparsePolynomial::operator+(const SparsePolynomial& other) const {
  SparsePolynomial r = *this;
  for (const auto& [e, c] : other.terms_) r.add_term(e, c);
  return r;
}

SparsePolynomial SparsePolynomial::operator-() const {
  SparsePolynomial r;
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, Rational(-c));
  return r;
}

SparsePolynomial SparsePolynomial::operator-(const SparsePolynomial& other) const { return *this + (-other); }

std::optional<SparsePolynomial> SparsePolynomial::multiply(const SparsePolynomial& other,
                                                           const PolyLimits& limits) const {
  if (terms_.size() * other.terms_.size() > limits.max_terms * limits.max_terms) return std::nullopt;
  SparsePolynomial r;
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : other.terms_) {
      std::uint64_t e = 0;
      if (!checked_add(e1, e2, e)) return std::nullopt;
      if (bit_size(c1) + bit_size(c2) > limits.max_coefficient_bits) return std::nullopt;
      r.add_term(e, c1 * c2);
    }
  }
  if (!within(r, limits)) return std::nullopt;
  return r;
}

std::optional<SparsePolynomial> SparsePolynomial::power(std::uint64_t n, const PolyLimits& limits) const {
  if (n == 0) return constant(Rational(1));
  if (terms_.size() == 1) {
    // Monomials have a closed form, which keeps huge exponents cheap.
    const auto& [e, c] = *terms_.begin();
    std::uint64_t exponent = 0;
    if (!checked_mul(e, n, exponent)) return std::nullopt;
    const std::size_t bits = bit_size(c);
    if (mpz_cmpabs_ui(c.get_num_mpz_t(), 1) != 0 || mpz_cmp_ui(c.get_den_mpz_t(), 1) != 0) {
      if (n > limits.max_coefficient_bits || bits * n > limits.max_coefficient_bits * 2) return std::nullopt;
    }
    return monomial(pow(c, n), exponent);
  }
  if (terms_.empty()) return SparsePolynomial{};
  SparsePolynomial result = constant(Rational(1));
  SparsePolynomial base = *this;
  while (n > 0) {
    if (n & 1u) {
      auto next = result.multiply(base, limits);
      if (!next) return std::nullopt;
      result = std::move(*next);
    }
    n >>= 1u;
    if (n > 0) {
      auto sq = base.multiply(base, limits);
      if (!sq) return std::nullopt;
      base = std::move(*sq);
    }
  }
  return result;
}

std::optional<SparsePolynomial> SparsePolynomial::compose(const SparsePolynomial& inner,
                                                          const PolyLimits& limits) const {
  SparsePolynomial r;
  for (const auto& [e, c] : terms_) {
    auto p = inner.power(e, limits);
    if (!p) return std::nullopt;
    auto scaled = p->multiply(constant(c), limits);
    if (!scaled) return std::nullopt;
    r = r + *scaled;
    if (!within(r, limits)) return std::nullopt;
  }
  return r;
}

std::optional<SparsePolynomial::PieceForm> SparsePolynomial::as_piece_form() const {
  std::size_t nonconstant = 0;
  for (const auto& [e, c] : terms_) {
    if (e != 0) ++nonconstant;
  }
  if (nonconstant > 1) return std::nullopt;
  PieceForm form{Rational(0), 0, coefficient(0)};
  for (const auto& [e, c] : terms_) {
    if (e != 0) {
      form.a = c;
      form.p = e;
    }
  }
  return form;
}

std::string SparsePolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    if (!first) out << (sgn(c) < 0 ? " - " : " + ");
    else if (sgn(c) < 0) out << "-";
    first = false;
    const Rational mag = abs(c);
    if (e == 0) {
      out << scdim::to_string(mag);
      continue;
    }
    if (mag != 1) out << scdim::to_string(mag) << "*";
    out << "x";
    if (e != 1) out << "^" << e;
  }
  return out.str();
}

Rational threshold_nonnegative(const SparsePolynomial& p) {
  if (p.is_zero()) return Rational(0);
  if (sgn(p.leading_coefficient()) <= 0) throw PreconditionError("threshold of a polynomial with nonpositive leading term");
  Rational negative_mass(0);
  std::uint64_t top_negative = 0;
  std::uint64_t low_negative = UINT64_MAX;
  for (const auto& [e, c] : p.terms()) {
    if (sgn(c) < 0) {
      negative_mass -= c;
      top_negative = e;
      if (low_negative == UINT64_MAX) low_negative = e;
    }
  }
  if (sgn(negative_mass) == 0) return Rational(0);
  const std::uint64_t gap = p.degree() - top_negative;
  const Rational quotient = negative_mass / p.leading_coefficient();
  Rational root = gap == 1 ? quotient : root_upper_bound(quotient, gap);
  // With negative terms at several degrees the reduction to the top negative
  // degree needs x >= 1.
  if (low_negative != top_negative && root < 1) root = 1;
  return root;
}

Rational threshold_positive(const SparsePolynomial& p) {
  if (p.is_zero() || sgn(p.leading_coefficient()) <= 0) {
    throw PreconditionError("strict threshold of a polynomial with nonpositive leading term");
  }
  bool has_negative = false;
  for (const auto& [e, c] : p.terms()) has_negative = has_negative || sgn(c) < 0;
  if (!has_negative && sgn(p.coefficient(0)) > 0) return Rational(0);
  // Strictly positive on (T, inf) by construction of T.
  return threshold_nonnegative(p) + 1;
}

Rational radius_nonnegative(const SparsePolynomial& p) {
  if (p.is_zero()) return Rational(1);
  const Rational& low = p.lowest_coefficient();
  if (sgn(low) <= 0) throw PreconditionError("radius of a polynomial with nonpositive lowest-order term");
  Rational negative_mass(0);
  for (const auto& [e, c] : p.terms()) {
    if (sgn(c) < 0) negative_mass -= c;
  }
  if (sgn(negative_mass) == 0) return Rational(1);
  Rational r = low / negative_mass;
  return r < 1 ? r : Rational(1);
}

Rational radius_positive(const SparsePolynomial& p) {
  if (p.is_zero() || sgn(p.lowest_coefficient()) <= 0) {
    throw PreconditionError("strict radius of a polynomial with nonpositive lowest-order term");
  }
  Rational negative_mass(0);
  for (const auto& [e, c] : p.terms()) {
    if (sgn(c) < 0) negative_mass -= c;
  }
  if (sgn(negative_mass) == 0) return Rational(1);
  Rational r = p.lowest_coefficient() / (2 * negative_mass);
  return r < 1 ? r : Rational(1);
}

}  // namespace scdim
