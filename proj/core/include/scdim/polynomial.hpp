#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "scdim/rational.hpp"

namespace scdim {

// Resource limits for symbolic germ arithmetic. Exponents of iterated
// monomials grow doubly exponentially, so every operation that could blow
// up reports failure instead of allocating without bound.
struct PolyLimits {
  std::size_t max_terms = 256;
  std::size_t max_coefficient_bits = std::size_t{1} << 20;
};

// Sparse polynomial with rational coefficients and 64-bit exponents.
// Terms with zero coefficient are never stored.
class SparsePolynomial {
 public:
  SparsePolynomial() = default;

  static SparsePolynomial constant(const Rational& c);
  static SparsePolynomial monomial(const Rational& c, std::uint64_t exponent);
  // a*x^p + b
  static SparsePolynomial piece_form(const Rational& a, std::uint64_t p, const Rational& b);

  bool is_zero() const { return terms_.empty(); }
  std::uint64_t degree() const;
  const Rational& leading_coefficient() const;
  std::uint64_t lowest_exponent() const;
  const Rational& lowest_coefficient() const;
  Rational coefficient(std::uint64_t exponent) const;
  std::size_t term_count() const { return terms_.size(); }
  const std::map<std::uint64_t, Rational>& terms() const { return terms_; }

  /// Exact value; exponents are expanded, so keep degree * bits(x) moderate.
  Rational evaluate(const Rational& x) const;

  SparsePolynomial operator+(const SparsePolynomial& other) const;
  SparsePolynomial operator-(const SparsePolynomial& other) const;
  SparsePolynomial operator-() const;

  std::optional<SparsePolynomial> multiply(const SparsePolynomial& other, const PolyLimits& limits) const;
  std::optional<SparsePolynomial> power(std::uint64_t n, const PolyLimits& limits) const;
  /// this(inner(x)).
  std::optional<SparsePolynomial> compose(const SparsePolynomial& inner, const PolyLimits& limits) const;

  /// When the polynomial has the shape a*x^p + b (at most one non-constant term).
  struct PieceForm {
    Rational a;
    std::uint64_t p;
    Rational b;
  };
  std::optional<PieceForm> as_piece_form() const;

  std::string to_string() const;

  friend bool operator==(const SparsePolynomial& a, const SparsePolynomial& b) { return a.terms_ == b.terms_; }

 private:
  void add_term(std::uint64_t exponent, const Rational& c);
  std::map<std::uint64_t, Rational> terms_;  // exponent -> coefficient
};

// Root bounds. All of them return certified rational bounds computed from
// the coefficient signs; they are not tight in general but are exact when
// the negative part is a single term one degree below the leading term.

/// T >= 0 with P(x) >= 0 for every x >= T. Requires a positive leading coefficient
/// (or P == 0).
Rational threshold_nonnegative(const SparsePolynomial& p);
/// T >= 0 with P(x) > 0 for every x >= T. Requires a positive leading coefficient.
Rational threshold_positive(const SparsePolynomial& p);
/// r in (0, 1] with P(x) >= 0 for every x in [0, r]. Requires a positive
/// lowest-order coefficient (or P == 0).
Rational radius_nonnegative(const SparsePolynomial& p);
/// r in (0, 1] with P(x) > 0 for every x in (0, r]. Requires a positive
/// lowest-order coefficient.
Rational radius_positive(const SparsePolynomial& p);

}  // namespace scdim
