#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scdim/polynomial.hpp"
#include "scdim/rational.hpp"

namespace scdim {

enum class Scale { large, small, global };
enum class FunctionClass { piecewise_affine, piecewise_monomial, opaque };

std::string to_string(Scale scale);
Scale parse_scale(std::string_view text);
std::string to_string(FunctionClass cls);

// a*x^p + b on [lo, hi]. Constant pieces are stored with a = 0, p = 0.
// The offset b may be negative as long as the piece is nonnegative on its
// interval.
struct Piece {
  Rational lo;
  ExtendedRational hi;
  Rational a;
  std::uint64_t p = 1;
  Rational b;

  Rational value(const Rational& x) const;
  Rational value_at_lo() const { return value(lo); }
  bool is_constant() const { return sgn(a) == 0; }
  SparsePolynomial polynomial() const { return SparsePolynomial::piece_form(a, p, b); }
  friend bool operator==(const Piece&, const Piece&) = default;
};

// Polynomial that agrees with a function on [start, inf).
struct TailGerm {
  SparsePolynomial poly;
  Rational start;
};

// Polynomial that agrees with a function on [lo, hi].
struct LocalGerm {
  SparsePolynomial poly;
  Rational lo;
  ExtendedRational hi;
};

namespace detail {
struct FunctionNode;
}

// Increasing continuous function on an interval [lo, hi] of the nonnegative
// reals, held as an immutable expression tree. Leaves are lists of pieces;
// inner nodes are composition, iteration and pasting at breakpoints.
// Construction validates continuity, monotonicity and nonnegativity of
// every piecewise leaf.
class ControlFunction {
 public:
  ControlFunction();  // identity on [0, inf), large scale

  static ControlFunction identity(Scale scale = Scale::large);
  /// c*x on [0, inf).
  static ControlFunction linear(const Rational& c, Scale scale = Scale::large);
  /// a*x^p on [lo, inf).
  static ControlFunction monomial(const Rational& a, std::uint64_t p, const Rational& lo = Rational(0),
                                  Scale scale = Scale::large);
  static ControlFunction piecewise(std::vector<Piece> pieces, Scale scale = Scale::large);
  /// Linear interpolation through (x, y) samples, constant after the last one.
  static ControlFunction tabulated(const std::vector<std::pair<Rational, Rational>>& samples,
                                   Scale scale = Scale::large);
  /// parts[0] on [start, cuts[0]], parts[1] on [cuts[0], cuts[1]], ...
  /// Values must agree at every cut. Piecewise parts are flattened.
  static ControlFunction paste(const std::vector<ControlFunction>& parts, const std::vector<Rational>& cuts,
                               Scale scale);

  /// Textual form: piece(lo,hi; a,p,b), compose(f,g), iter(f,n),
  /// paste(f1, c1, f2, ...), linear(c), id; optional `small:` or `global:` prefix.
  static ControlFunction parse(std::string_view text);
  std::string to_string() const;

  Scale scale() const { return scale_; }
  ControlFunction with_scale(Scale scale) const;
  FunctionClass function_class() const;

  bool is_piecewise() const;
  /// Only valid when is_piecewise().
  const std::vector<Piece>& pieces() const;
  Rational domain_start() const;
  ExtendedRational domain_end() const;
  /// Breakpoints of the top-level structure (piece boundaries or paste cuts).
  std::vector<Rational> breakpoints() const;

  Rational evaluate(const Rational& x) const;

  /// Polynomial agreeing with the function on a neighbourhood of infinity;
  /// empty when the domain is bounded or symbolic limits were hit.
  std::optional<TailGerm> tail_germ(const PolyLimits& limits = {}) const;
  /// Polynomial agreeing with the function on [y, y + delta] for some delta > 0.
  std::optional<LocalGerm> local_germ(const Rational& y, const PolyLimits& limits = {}) const;
  /// local_germ(0) when the domain starts at 0.
  std::optional<LocalGerm> head_germ(const PolyLimits& limits = {}) const;

  /// Smallest rational x known to satisfy f(x) >= y (an upper bound of the
  /// exact preimage); empty when y exceeds the range.
  std::optional<Rational> preimage_upper(const Rational& y) const;
  /// Largest x known to satisfy f(x) <= y (infinite when f never exceeds y);
  /// empty when y is below f(start).
  std::optional<ExtendedRational> preimage_lower(const Rational& y) const;

  bool same_tree(const ControlFunction& other) const { return node_ == other.node_; }

 private:
  friend struct detail::FunctionNode;
  friend ControlFunction compose(const ControlFunction&, const ControlFunction&);
  friend ControlFunction iterate(const ControlFunction&, std::uint64_t);
  ControlFunction(std::shared_ptr<const detail::FunctionNode> node, Scale scale);

  std::shared_ptr<const detail::FunctionNode> node_;
  Scale scale_ = Scale::large;
};

/// f∘g. Flattened into pieces when every composed piece stays of the form
/// a*x^p + b with rational breakpoints; otherwise a composition node.
ControlFunction compose(const ControlFunction& f, const ControlFunction& g);
ControlFunction iterate(const ControlFunction& f, std::uint64_t n);
/// f on [lo, hi], which must lie inside f's domain.
ControlFunction restrict(const ControlFunction& f, const Rational& lo, const ExtendedRational& hi);

std::vector<Rational> tabulate(const ControlFunction& f, const std::vector<Rational>& xs);

struct DominationVerdict {
  enum class Kind { yes, no, unknown };
  Kind kind = Kind::unknown;
  // yes: threshold (or radius near 0); no: a failing point from which the
  // failure persists; unknown: sampling horizon.
  Rational point;
  // Global scale only: the near-zero radius or failing point.
  std::optional<Rational> small_point;
  std::string certificate;

  bool is_yes() const { return kind == Kind::yes; }
  bool is_no() const { return kind == Kind::no; }
  bool is_unknown() const { return kind == Kind::unknown; }
};

std::string to_string(const DominationVerdict& verdict);

enum class Strictness { non_strict, strict };

/// f >= g (or f > g) on [max(starts), inf) beyond the returned threshold.
DominationVerdict compare_tails(const TailGerm& f, const TailGerm& g, Strictness strictness = Strictness::non_strict);
/// f >= g (or f > g on the punctured interval) on (0, r] near zero.
DominationVerdict compare_heads(const LocalGerm& f, const LocalGerm& g, Strictness strictness = Strictness::non_strict);

/// Decides f >= g near infinity (large), near zero (small) or both (global).
DominationVerdict eventually_dominates(const ControlFunction& f, const ControlFunction& g, Scale scale,
                                       Strictness strictness = Strictness::non_strict);

std::optional<TailGerm> compose_tails(const TailGerm& outer, const TailGerm& inner, const PolyLimits& limits = {});
/// outer∘inner on [y, y + delta]; inner(y) must lie in outer's interval.
std::optional<LocalGerm> compose_local(const LocalGerm& outer, const LocalGerm& inner, const Rational& y,
                                       const PolyLimits& limits = {});

struct DimControlCertificate {
  bool holds = false;
  bool decided = true;
  std::optional<Rational> large_threshold;  // f(x) >= x for x >= this
  std::optional<Rational> small_radius;     // f(x) >= x on [0, this]
  std::string reason;
};

DimControlCertificate is_dim_control(const ControlFunction& f, Scale scale);

/// Increasing continuous h on [lo, hi] with h >= g, h(lo) = f_left,
/// h(hi) = f_right. g must be piecewise on [lo, hi].
ControlFunction paste_dominating(const ControlFunction& g, const Rational& lo, const Rational& hi,
                                 const Rational& f_left, const Rational& f_right);

struct DiagonalDominator {
  ControlFunction function;
  Rational threshold;          // function(x) > f^n(x) for x > threshold, n <= levels
  std::vector<Rational> knots;  // x_1 < ... < x_{levels+1}
};

DiagonalDominator diagonal_dominator(const ControlFunction& f, std::uint64_t levels);

}  // namespace scdim
