#include "scdim/funcalg.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "scdim/errors.hpp"

namespace scdim {

namespace detail {

struct FunctionNode {
  enum class Kind { piecewise, compose, iterate, paste, restrict };
  Kind kind = Kind::piecewise;
  std::vector<Piece> pieces;              // piecewise
  std::vector<ControlFunction> children;  // compose: {outer, inner}; iterate: {f}; paste: parts; restrict: {f}
  std::vector<Rational> cuts;             // paste
  std::uint64_t count = 0;                // iterate
  Rational lo;
  ExtendedRational hi;

  static ControlFunction wrap(std::shared_ptr<const FunctionNode> node, Scale scale) {
    return ControlFunction(std::move(node), scale);
  }
  static const FunctionNode& of(const ControlFunction& f) { return *f.node_; }
};

}  // namespace detail

using detail::FunctionNode;
using Kind = FunctionNode::Kind;

namespace {

constexpr std::size_t kMaxFlattenedPieces = 4096;

Rational max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }
Rational min_of(const Rational& a, const Rational& b) { return a < b ? a : b; }

Piece normalized(Piece piece) {
  if (sgn(piece.a) == 0 || piece.p == 0) {
    piece.b += piece.a;
    piece.a = 0;
    piece.p = 0;
  }
  return piece;
}

Piece constant_piece(const Rational& lo, const ExtendedRational& hi, const Rational& value) {
  return Piece{lo, hi, Rational(0), 0, value};
}

Piece segment_piece(const Rational& x0, const Rational& y0, const Rational& x1, const Rational& y1) {
  const Rational slope = (y1 - y0) / (x1 - x0);
  if (sgn(slope) == 0) return constant_piece(x0, x1, y0);
  return Piece{x0, x1, slope, 1, y0 - slope * x0};
}

bool same_form(const Piece& a, const Piece& b) { return a.a == b.a && a.p == b.p && a.b == b.b; }

std::vector<Piece> validated_pieces(std::vector<Piece> pieces) {
  if (pieces.empty()) throw InvalidInput("piecewise function without pieces");
  for (auto& piece : pieces) piece = normalized(std::move(piece));
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Piece& piece = pieces[i];
    if (sgn(piece.lo) < 0) throw DomainError("piece starts below zero at " + to_string(piece.lo));
    if (ExtendedRational(piece.lo) >= piece.hi) {
      throw InvalidInput("empty piece interval [" + to_string(piece.lo) + ", " + to_string(piece.hi) + "]");
    }
    if (sgn(piece.a) < 0) throw InvalidInput("decreasing piece with coefficient " + to_string(piece.a));
    if (i + 1 < pieces.size()) {
      if (piece.hi.is_infinite()) throw InvalidInput("unbounded piece followed by further pieces");
      if (piece.hi.value() != pieces[i + 1].lo) {
        throw InvalidInput("pieces are not contiguous at " + to_string(piece.hi.value()));
      }
      const Rational left = piece.value(piece.hi.value());
      const Rational right = pieces[i + 1].value_at_lo();
      if (left != right) {
        throw InvalidInput("discontinuity at " + to_string(piece.hi.value()) + ": " + to_string(left) +
                           " vs " + to_string(right));
      }
    }
  }
  if (sgn(pieces.front().value_at_lo()) < 0) throw InvalidInput("function takes a negative value");
  std::vector<Piece> merged;
  for (auto& piece : pieces) {
    if (!merged.empty() && same_form(merged.back(), piece)) {
      merged.back().hi = piece.hi;
    } else {
      merged.push_back(std::move(piece));
    }
  }
  return merged;
}

ControlFunction make_piecewise(std::vector<Piece> pieces, Scale scale) {
  auto node = std::make_shared<FunctionNode>();
  node->kind = Kind::piecewise;
  node->pieces = validated_pieces(std::move(pieces));
  node->lo = node->pieces.front().lo;
  node->hi = node->pieces.back().hi;
  return FunctionNode::wrap(std::move(node), scale);
}

// Pieces of a piecewise function restricted to [lo, hi].
std::vector<Piece> clip_pieces(const std::vector<Piece>& pieces, const Rational& lo, const ExtendedRational& hi) {
  std::vector<Piece> out;
  for (const Piece& piece : pieces) {
    if (piece.hi <= ExtendedRational(lo) && !(piece.hi == ExtendedRational(lo) && piece.lo == lo)) continue;
    if (ExtendedRational(piece.lo) >= hi) break;
    Piece clipped = piece;
    if (clipped.lo < lo) clipped.lo = lo;
    if (clipped.hi > hi) clipped.hi = hi;
    if (ExtendedRational(clipped.lo) < clipped.hi) out.push_back(std::move(clipped));
  }
  return out;
}

const Piece& piece_at(const std::vector<Piece>& pieces, const Rational& x) {
  // Last piece whose lo <= x.
  auto it = std::upper_bound(pieces.begin(), pieces.end(), x,
                             [](const Rational& value, const Piece& piece) { return value < piece.lo; });
  if (it == pieces.begin()) throw DomainError("point " + to_string(x) + " below the domain");
  --it;
  if (ExtendedRational(x) > it->hi) throw DomainError("point " + to_string(x) + " beyond the domain");
  return *it;
}

// Exact x with piece(x) = y, when it is rational.
std::optional<Rational> exact_preimage(const Piece& piece, const Rational& y) {
  const Rational v = (y - piece.b) / piece.a;
  if (sgn(v) < 0) return std::nullopt;
  return exact_root(v, piece.p);
}

// Piece form of outer∘inner, when it exists.
std::optional<Piece> compose_piece_forms(const Piece& outer, const Piece& inner, const Rational& lo,
                                         const ExtendedRational& hi) {
  if (outer.is_constant()) return constant_piece(lo, hi, outer.b);
  if (inner.is_constant()) return constant_piece(lo, hi, outer.value(inner.b));
  if (outer.p == 1) return Piece{lo, hi, outer.a * inner.a, inner.p, outer.a * inner.b + outer.b};
  if (sgn(inner.b) == 0) {
    std::uint64_t p = 0;
    if (__builtin_mul_overflow(inner.p, outer.p, &p)) return std::nullopt;
    return Piece{lo, hi, outer.a * pow(inner.a, outer.p), p, outer.b};
  }
  return std::nullopt;
}

std::optional<std::vector<Piece>> flatten_compose(const std::vector<Piece>& outer, const std::vector<Piece>& inner) {
  const Rational outer_lo = outer.front().lo;
  const ExtendedRational outer_hi = outer.back().hi;
  std::vector<Piece> out;
  for (const Piece& g : inner) {
    Rational l = g.lo;
    ExtendedRational h = g.hi;
    const Rational yl = g.value(l);
    if (g.is_constant()) {
      if (yl < outer_lo || ExtendedRational(yl) > outer_hi) return std::nullopt;
      out.push_back(constant_piece(l, h, piece_at(outer, yl).value(yl)));
      continue;
    }
    const ExtendedRational yh = h.is_infinite() ? ExtendedRational::infinity() : ExtendedRational(g.value(h.value()));
    if (yh <= ExtendedRational(outer_lo) && !(yh == ExtendedRational(outer_lo) && yl == outer_lo)) continue;
    if (ExtendedRational(yl) > outer_hi) break;
    if (yl < outer_lo) {
      auto x0 = exact_preimage(g, outer_lo);
      if (!x0) return std::nullopt;
      l = *x0;
    }
    bool last = false;
    if (yh > outer_hi) {
      auto x1 = exact_preimage(g, outer_hi.value());
      if (!x1) return std::nullopt;
      h = *x1;
      last = true;
    }
    std::vector<Rational> cuts{l};
    for (std::size_t k = 0; k + 1 < outer.size(); ++k) {
      const Rational& t = outer[k].hi.value();
      if (t <= g.value(l) || ExtendedRational(t) >= (h.is_infinite() ? ExtendedRational::infinity()
                                                                       : ExtendedRational(g.value(h.value())))) {
        continue;
      }
      auto xt = exact_preimage(g, t);
      if (!xt) return std::nullopt;
      cuts.push_back(*xt);
    }
    for (std::size_t c = 0; c < cuts.size(); ++c) {
      const Rational& s0 = cuts[c];
      const ExtendedRational s1 = c + 1 < cuts.size() ? ExtendedRational(cuts[c + 1]) : h;
      if (ExtendedRational(s0) >= s1) continue;
      const Rational y0 = g.value(s0);
      // The outer piece containing [y0, y1]: the last one with lo <= y0 < hi.
      const Piece* f = nullptr;
      for (const Piece& candidate : outer) {
        if (candidate.lo <= y0 && ExtendedRational(y0) < candidate.hi) {
          f = &candidate;
          break;
        }
      }
      if (f == nullptr) return std::nullopt;
      auto composed = compose_piece_forms(*f, g, s0, s1);
      if (!composed) return std::nullopt;
      out.push_back(std::move(*composed));
      if (out.size() > kMaxFlattenedPieces) return std::nullopt;
    }
    if (last) break;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::string render_node(const ControlFunction& f);

std::string render_piece(const Piece& piece) {
  return "piece(" + to_string(piece.lo) + "," + to_string(piece.hi) + "; " + to_string(piece.a) + "," +
         std::to_string(piece.p) + "," + to_string(piece.b) + ")";
}

std::string render_node(const ControlFunction& f) {
  const FunctionNode& node = FunctionNode::of(f);
  switch (node.kind) {
    case Kind::piecewise: {
      if (node.pieces.size() == 1) return render_piece(node.pieces.front());
      std::string out = "paste(";
      for (std::size_t i = 0; i < node.pieces.size(); ++i) {
        if (i > 0) out += ", " + to_string(node.pieces[i].lo) + ", ";
        out += render_piece(node.pieces[i]);
      }
      return out + ")";
    }
    case Kind::compose:
      return "compose(" + render_node(node.children[0]) + ", " + render_node(node.children[1]) + ")";
    case Kind::iterate:
      return "iter(" + render_node(node.children[0]) + ", " + std::to_string(node.count) + ")";
    case Kind::paste: {
      std::string out = "paste(";
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i > 0) out += ", " + to_string(node.cuts[i - 1]) + ", ";
        out += render_node(node.children[i]);
      }
      return out + ")";
    }
    case Kind::restrict:
      return "restrict(" + render_node(node.children[0]) + ", " + to_string(node.lo) + ", " + to_string(node.hi) + ")";
  }
  return {};
}

// Parser for the textual function format.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ControlFunction parse_top() {
    Scale scale = Scale::large;
    skip_space();
    for (std::string_view prefix : {"small:", "large:", "global:"}) {
      if (text_.substr(pos_, prefix.size()) == prefix) {
        scale = parse_scale(prefix.substr(0, prefix.size() - 1));
        pos_ += prefix.size();
        break;
      }
    }
    ControlFunction f = parse_expr(scale);
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("function syntax error at offset " + std::to_string(pos_) + ": " + what + " in '" +
                       std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string number_token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '.' || c == '-' || c == '+' ||
          std::isalpha(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    if (start == pos_) fail("expected a number");
    return std::string(text_.substr(start, pos_ - start));
  }

  Rational rational() {
    const std::string token = number_token();
    try {
      return parse_rational(token);
    } catch (const InvalidInput&) {
      fail("malformed rational '" + token + "'");
    }
  }

  ExtendedRational extended() {
    const std::string token = number_token();
    if (token == "inf" || token == "+inf") return ExtendedRational::infinity();
    try {
      return parse_rational(token);
    } catch (const InvalidInput&) {
      fail("malformed bound '" + token + "'");
    }
  }

  std::uint64_t count() {
    const std::string token = number_token();
    if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      fail("expected a natural number");
    }
    try {
      return std::stoull(token);
    } catch (const std::exception&) {
      fail("natural number out of range");
    }
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  ControlFunction parse_expr(Scale scale) {
    const std::string name = identifier();
    if (name == "id") return ControlFunction::identity(scale);
    if (name == "linear") {
      expect('(');
      Rational c = rational();
      expect(')');
      return ControlFunction::linear(c, scale);
    }
    if (name == "piece") {
      expect('(');
      Rational lo = rational();
      expect(',');
      ExtendedRational hi = extended();
      expect(';');
      Rational a = rational();
      expect(',');
      std::uint64_t p = count();
      expect(',');
      Rational b = rational();
      expect(')');
      return ControlFunction::piecewise({Piece{lo, hi, a, p, b}}, scale);
    }
    if (name == "compose") {
      expect('(');
      ControlFunction f = parse_expr(scale);
      expect(',');
      ControlFunction g = parse_expr(scale);
      expect(')');
      return compose(f, g);
    }
    if (name == "iter") {
      expect('(');
      ControlFunction f = parse_expr(scale);
      expect(',');
      std::uint64_t n = count();
      expect(')');
      return iterate(f, n);
    }
    if (name == "paste") {
      expect('(');
      std::vector<ControlFunction> parts{parse_expr(scale)};
      std::vector<Rational> cuts;
      while (peek(',')) {
        expect(',');
        cuts.push_back(rational());
        expect(',');
        parts.push_back(parse_expr(scale));
      }
      expect(')');
      return ControlFunction::paste(parts, cuts, scale);
    }
    if (name == "restrict") {
      expect('(');
      ControlFunction f = parse_expr(scale);
      expect(',');
      Rational lo = rational();
      expect(',');
      ExtendedRational hi = extended();
      expect(')');
      return restrict(f, lo, hi);
    }
    fail(name.empty() ? "expected a function" : "unknown function '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Rational sample_horizon_start(const ControlFunction& f, const ControlFunction& g) {
  Rational start = max_of(f.domain_start(), g.domain_start());
  return start < 1 ? Rational(1) : start;
}

DominationVerdict sampled_unknown(const ControlFunction& f, const ControlFunction& g) {
  DominationVerdict verdict;
  verdict.kind = DominationVerdict::Kind::unknown;
  Rational x = sample_horizon_start(f, g);
  std::size_t checked = 0;
  std::string evidence;
  try {
    for (int i = 0; i < 24; ++i, x *= 2) {
      if (ExtendedRational(x) > f.domain_end() || ExtendedRational(x) > g.domain_end()) break;
      if (f.evaluate(x) < g.evaluate(x)) {
        evidence = "sampled f < g at x = " + to_string(x);
        ++checked;
        break;
      }
      ++checked;
    }
  } catch (const CapExceeded&) {
    evidence = "sampling stopped at the evaluation size cap";
  }
  verdict.point = x;
  if (evidence.empty()) evidence = "sampled f >= g at " + std::to_string(checked) + " doubling points";
  verdict.certificate = "no symbolic germ available; " + evidence;
  return verdict;
}

std::string leading_term(const SparsePolynomial& p) {
  return SparsePolynomial::monomial(p.leading_coefficient(), p.degree()).to_string();
}

std::string lowest_term(const SparsePolynomial& p) {
  return SparsePolynomial::monomial(p.lowest_coefficient(), p.lowest_exponent()).to_string();
}

void check_scales(const ControlFunction& f, const ControlFunction& g, Scale scale) {
  if (f.scale() != g.scale()) {
    throw ScaleMismatch("scale mismatch: " + to_string(f.scale()) + " vs " + to_string(g.scale()));
  }
  if (f.scale() != scale && f.scale() != Scale::global) {
    throw ScaleMismatch("cannot compare " + to_string(f.scale()) + "-scale functions at " + to_string(scale) +
                        " scale");
  }
}

}  // namespace

// ---------------------------------------------------------------- names

std::string to_string(Scale scale) {
  switch (scale) {
    case Scale::large: return "large";
    case Scale::small: return "small";
    case Scale::global: return "global";
  }
  return "large";
}

Scale parse_scale(std::string_view text) {
  if (text == "large") return Scale::large;
  if (text == "small") return Scale::small;
  if (text == "global") return Scale::global;
  throw InvalidInput("unknown scale '" + std::string(text) + "'");
}

std::string to_string(FunctionClass cls) {
  switch (cls) {
    case FunctionClass::piecewise_affine: return "piecewise-affine";
    case FunctionClass::piecewise_monomial: return "piecewise-monomial";
    case FunctionClass::opaque: return "opaque";
  }
  return "opaque";
}

Rational Piece::value(const Rational& x) const {
  if (sgn(a) == 0) return b;
  return a * pow_bounded(x, p) + b;
}

// ---------------------------------------------------------------- construction

ControlFunction::ControlFunction() : ControlFunction(identity()) {}

ControlFunction::ControlFunction(std::shared_ptr<const detail::FunctionNode> node, Scale scale)
    : node_(std::move(node)), scale_(scale) {}

ControlFunction ControlFunction::identity(Scale scale) { return linear(Rational(1), scale); }

ControlFunction ControlFunction::linear(const Rational& c, Scale scale) {
  if (sgn(c) <= 0) throw InvalidInput("linear function needs a positive slope");
  return make_piecewise({Piece{Rational(0), ExtendedRational::infinity(), c, 1, Rational(0)}}, scale);
}

ControlFunction ControlFunction::monomial(const Rational& a, std::uint64_t p, const Rational& lo, Scale scale) {
  return make_piecewise({Piece{lo, ExtendedRational::infinity(), a, p, Rational(0)}}, scale);
}

ControlFunction ControlFunction::piecewise(std::vector<Piece> pieces, Scale scale) {
  return make_piecewise(std::move(pieces), scale);
}

ControlFunction ControlFunction::tabulated(const std::vector<std::pair<Rational, Rational>>& samples, Scale scale) {
  if (samples.empty()) throw InvalidInput("empty table");
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& [x0, y0] = samples[i];
    const auto& [x1, y1] = samples[i + 1];
    if (x1 <= x0) throw InvalidInput("table abscissae must increase strictly");
    if (y1 < y0) throw InvalidInput("table values must not decrease");
    pieces.push_back(segment_piece(x0, y0, x1, y1));
  }
  pieces.push_back(constant_piece(samples.back().first, ExtendedRational::infinity(), samples.back().second));
  return make_piecewise(std::move(pieces), scale);
}

ControlFunction ControlFunction::paste(const std::vector<ControlFunction>& parts, const std::vector<Rational>& cuts,
                                       Scale scale) {
  if (parts.empty() || cuts.size() + 1 != parts.size()) throw InvalidInput("paste needs one cut between parts");
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const Rational left = i == 0 ? parts[0].domain_start() : cuts[i - 1];
    if (cuts[i] <= left) throw InvalidInput("paste cuts must increase strictly");
    if (ExtendedRational(cuts[i]) > parts[i].domain_end() || parts[i].domain_start() > left) {
      throw DomainError("paste part " + std::to_string(i) + " does not cover its interval");
    }
    if (parts[i + 1].domain_start() > cuts[i] || ExtendedRational(cuts[i]) >= parts[i + 1].domain_end()) {
      throw DomainError("paste part " + std::to_string(i + 1) + " does not cover its interval");
    }
    const Rational a = parts[i].evaluate(cuts[i]);
    const Rational b = parts[i + 1].evaluate(cuts[i]);
    if (a != b) {
      throw InvalidInput("paste is discontinuous at " + scdim::to_string(cuts[i]) + ": " + scdim::to_string(a) + " vs " + scdim::to_string(b));
    }
  }
  const bool flat = std::all_of(parts.begin(), parts.end(), [](const ControlFunction& f) { return f.is_piecewise(); });
  if (flat) {
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const Rational lo = i == 0 ? parts[0].domain_start() : cuts[i - 1];
      const ExtendedRational hi = i < cuts.size() ? ExtendedRational(cuts[i]) : parts.back().domain_end();
      auto clipped = clip_pieces(parts[i].pieces(), lo, hi);
      pieces.insert(pieces.end(), clipped.begin(), clipped.end());
    }
    return make_piecewise(std::move(pieces), scale);
  }
  if (parts.size() == 1) return parts[0].with_scale(scale);
  auto node = std::make_shared<FunctionNode>();
  node->kind = Kind::paste;
  node->cuts = cuts;
  for (const auto& part : parts) node->children.push_back(part.with_scale(scale));
  node->lo = parts.front().domain_start();
  node->hi = parts.back().domain_end();
  return FunctionNode::wrap(std::move(node), scale);
}

ControlFunction restrict(const ControlFunction& f, const Rational& lo, const ExtendedRational& hi) {
  if (lo < f.domain_start() || hi > f.domain_end() || ExtendedRational(lo) >= hi) {
    throw DomainError("restriction interval [" + to_string(lo) + ", " + to_string(hi) + "] outside the domain");
  }
  if (lo == f.domain_start() && hi == f.domain_end()) return f;
  if (f.is_piecewise()) return make_piecewise(clip_pieces(f.pieces(), lo, hi), f.scale());
  auto node = std::make_shared<FunctionNode>();
  node->kind = Kind::restrict;
  node->children.push_back(f);
  node->lo = lo;
  node->hi = hi;
  return FunctionNode::wrap(std::move(node), f.scale());
}

ControlFunction ControlFunction::parse(std::string_view text) { return Parser(text).parse_top(); }

std::string ControlFunction::to_string() const {
  const std::string body = render_node(*this);
  return scale_ == Scale::large ? body : scdim::to_string(scale_) + ":" + body;
}

ControlFunction ControlFunction::with_scale(Scale scale) const { return ControlFunction(node_, scale); }

FunctionClass ControlFunction::function_class() const {
  if (node_->kind != Kind::piecewise) return FunctionClass::opaque;
  for (const auto& piece : node_->pieces) {
    if (piece.p > 1) return FunctionClass::piecewise_monomial;
  }
  return FunctionClass::piecewise_affine;
}

bool ControlFunction::is_piecewise() const { return node_->kind == Kind::piecewise; }

const std::vector<Piece>& ControlFunction::pieces() const {
  if (!is_piecewise()) throw PreconditionError("function is not held in piecewise form");
  return node_->pieces;
}

Rational ControlFunction::domain_start() const { return node_->lo; }
ExtendedRational ControlFunction::domain_end() const { return node_->hi; }

std::vector<Rational> ControlFunction::breakpoints() const {
  std::vector<Rational> out;
  if (node_->kind == Kind::piecewise) {
    for (std::size_t i = 1; i < node_->pieces.size(); ++i) out.push_back(node_->pieces[i].lo);
  } else if (node_->kind == Kind::paste) {
    out = node_->cuts;
  }
  return out;
}

// ---------------------------------------------------------------- evaluation

Rational ControlFunction::evaluate(const Rational& x) const {
  const FunctionNode& node = *node_;
  if (x < node.lo || ExtendedRational(x) > node.hi) {
    throw DomainError("point " + scdim::to_string(x) + " outside the domain [" + scdim::to_string(node.lo) + ", " +
                      scdim::to_string(node.hi) + "]");
  }
  switch (node.kind) {
    case Kind::piecewise:
      return piece_at(node.pieces, x).value(x);
    case Kind::compose:
      return node.children[0].evaluate(node.children[1].evaluate(x));
    case Kind::iterate: {
      Rational y = x;
      for (std::uint64_t i = 0; i < node.count; ++i) y = node.children[0].evaluate(y);
      return y;
    }
    case Kind::paste: {
      std::size_t i = 0;
      while (i < node.cuts.size() && x > node.cuts[i]) ++i;
      return node.children[i].evaluate(x);
    }
    case Kind::restrict:
      return node.children[0].evaluate(x);
  }
  throw InvalidInput("malformed function tree");
}

std::vector<Rational> tabulate(const ControlFunction& f, const std::vector<Rational>& xs) {
  std::vector<Rational> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(f.evaluate(x));
  return out;
}

// ---------------------------------------------------------------- preimages

std::optional<Rational> ControlFunction::preimage_upper(const Rational& y) const {
  const FunctionNode& node = *node_;
  if (y <= evaluate(node.lo)) return node.lo;
  std::optional<Rational> x;
  switch (node.kind) {
    case Kind::piecewise: {
      for (const Piece& piece : node.pieces) {
        const bool reaches = piece.hi.is_infinite() ? !piece.is_constant() || piece.b >= y
                                                    : piece.value(piece.hi.value()) >= y;
        if (!reaches) continue;
        if (piece.is_constant()) return piece.lo;
        Rational candidate = root_upper_bound((y - piece.b) / piece.a, piece.p);
        if (candidate < piece.lo) candidate = piece.lo;
        if (piece.hi.is_finite() && candidate > piece.hi.value()) candidate = piece.hi.value();
        return candidate;
      }
      return std::nullopt;
    }
    case Kind::compose: {
      auto mid = node.children[0].preimage_upper(y);
      if (!mid) return std::nullopt;
      x = node.children[1].preimage_upper(*mid);
      break;
    }
    case Kind::iterate: {
      x = y;
      for (std::uint64_t i = 0; i < node.count && x; ++i) x = node.children[0].preimage_upper(*x);
      break;
    }
    case Kind::paste: {
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const ExtendedRational end = i < node.cuts.size() ? ExtendedRational(node.cuts[i]) : node.hi;
        const bool reaches = end.is_infinite() ? true : evaluate(end.value()) >= y;
        if (!reaches) continue;
        x = node.children[i].preimage_upper(y);
        if (x && i > 0 && *x < node.cuts[i - 1]) x = node.cuts[i - 1];
        break;
      }
      break;
    }
    case Kind::restrict:
      x = node.children[0].preimage_upper(y);
      break;
  }
  if (!x) return std::nullopt;
  if (*x < node.lo) x = node.lo;
  if (ExtendedRational(*x) > node.hi) {
    if (node.hi.is_finite() && evaluate(node.hi.value()) >= y) return node.hi.value();
    return std::nullopt;
  }
  return x;
}

std::optional<ExtendedRational> ControlFunction::preimage_lower(const Rational& y) const {
  const FunctionNode& node = *node_;
  if (y < evaluate(node.lo)) return std::nullopt;
  std::optional<ExtendedRational> x;
  switch (node.kind) {
    case Kind::piecewise: {
      for (auto it = node.pieces.rbegin(); it != node.pieces.rend(); ++it) {
        const Piece& piece = *it;
        if (piece.value_at_lo() > y) continue;
        if (piece.is_constant()) return piece.hi;
        if (piece.hi.is_finite() && piece.value(piece.hi.value()) <= y) return piece.hi;
        Rational candidate = root_lower_bound((y - piece.b) / piece.a, piece.p);
        if (candidate < piece.lo) candidate = piece.lo;
        return ExtendedRational(candidate);
      }
      return std::nullopt;
    }
    case Kind::compose: {
      auto mid = node.children[0].preimage_lower(y);
      if (!mid) return std::nullopt;
      x = mid->is_infinite() ? node.children[1].domain_end() : node.children[1].preimage_lower(mid->value()).value_or(node.lo);
      break;
    }
    case Kind::iterate: {
      ExtendedRational current = y;
      for (std::uint64_t i = 0; i < node.count && current.is_finite(); ++i) {
        auto next = node.children[0].preimage_lower(current.value());
        if (!next) return std::nullopt;
        current = *next;
      }
      x = current;
      break;
    }
    case Kind::paste: {
      for (std::size_t i = node.children.size(); i-- > 0;) {
        const Rational start = i == 0 ? node.lo : node.cuts[i - 1];
        if (evaluate(start) > y) continue;
        x = node.children[i].preimage_lower(y);
        if (x && i < node.cuts.size() && *x > ExtendedRational(node.cuts[i])) x = ExtendedRational(node.cuts[i]);
        break;
      }
      break;
    }
    case Kind::restrict:
      x = node.children[0].preimage_lower(y);
      break;
  }
  if (!x) return std::nullopt;
  if (*x > node.hi) x = node.hi;
  if (*x < ExtendedRational(node.lo)) x = ExtendedRational(node.lo);
  return x;
}

// ---------------------------------------------------------------- composition

ControlFunction compose(const ControlFunction& f, const ControlFunction& g) {
  if (f.scale() != g.scale()) {
    throw ScaleMismatch("cannot compose " + to_string(f.scale()) + "-scale and " + to_string(g.scale()) +
                        "-scale functions");
  }
  if (f.is_piecewise() && g.is_piecewise()) {
    if (auto flat = flatten_compose(f.pieces(), g.pieces())) return make_piecewise(std::move(*flat), f.scale());
  }
  auto node = std::make_shared<FunctionNode>();
  node->kind = Kind::compose;
  node->children = {f, g};
  node->lo = g.domain_start();
  if (g.evaluate(node->lo) < f.domain_start()) {
    auto lo = g.preimage_upper(f.domain_start());
    if (!lo) throw DomainError("composition has an empty domain");
    node->lo = *lo;
  }
  node->hi = g.domain_end();
  if (f.domain_end().is_finite()) {
    auto hi = g.preimage_lower(f.domain_end().value());
    if (!hi) throw DomainError("composition has an empty domain");
    if (*hi < node->hi) node->hi = *hi;
  }
  if (ExtendedRational(node->lo) >= node->hi) throw DomainError("composition has an empty domain");
  return FunctionNode::wrap(std::move(node), f.scale());
}

ControlFunction iterate(const ControlFunction& f, std::uint64_t n) {
  if (n == 0) throw PreconditionError("iteration count must be at least 1");
  if (n == 1) return f;
  if (f.is_piecewise()) {
    ControlFunction result = f;
    bool flat = true;
    for (std::uint64_t i = 1; i < n; ++i) {
      result = compose(f, result);
      if (!result.is_piecewise()) {
        flat = false;
        break;
      }
    }
    if (flat) return result;
  }
  auto node = std::make_shared<FunctionNode>();
  node->kind = Kind::iterate;
  node->children = {f};
  node->count = n;
  node->lo = f.domain_start();
  node->hi = f.domain_end();
  if (f.evaluate(node->lo) < f.domain_start()) throw DomainError("iteration leaves the domain");
  if (f.domain_end().is_finite()) {
    // f^n(x) stays in the domain when x <= (f^-1)^(n-1)(hi).
    ExtendedRational hi = f.domain_end();
    for (std::uint64_t i = 1; i < n && hi.is_finite(); ++i) {
      auto next = f.preimage_lower(hi.value());
      if (!next) throw DomainError("iteration has an empty domain");
      hi = *next;
    }
    node->hi = hi;
    if (ExtendedRational(node->lo) >= node->hi) throw DomainError("iteration has an empty domain");
  }
  return FunctionNode::wrap(std::move(node), f.scale());
}

// ---------------------------------------------------------------- germs

std::optional<TailGerm> compose_tails(const TailGerm& outer, const TailGerm& inner, const PolyLimits& limits) {
  if (inner.poly.degree() == 0) {
    const Rational c = inner.poly.coefficient(0);
    if (c < outer.start) return std::nullopt;
    return TailGerm{SparsePolynomial::constant(outer.poly.evaluate(c)), inner.start};
  }
  if (sgn(inner.poly.leading_coefficient()) <= 0) return std::nullopt;
  const Rational reach = threshold_nonnegative(inner.poly - SparsePolynomial::constant(outer.start));
  auto poly = outer.poly.compose(inner.poly, limits);
  if (!poly) return std::nullopt;
  return TailGerm{std::move(*poly), max_of(inner.start, reach)};
}

std::optional<LocalGerm> compose_local(const LocalGerm& outer, const LocalGerm& inner, const Rational& y,
                                       const PolyLimits& limits) {
  const Rational v = inner.poly.evaluate(y);
  if (v < outer.lo || ExtendedRational(v) >= outer.hi) return std::nullopt;
  auto poly = outer.poly.compose(inner.poly, limits);
  if (!poly) return std::nullopt;
  ExtendedRational end = inner.hi;
  if (outer.hi.is_finite()) {
    const Rational& cap = outer.hi.value();
    if (end.is_infinite() || inner.poly.evaluate(end.value()) > cap) {
      // The inner germ is increasing, so one endpoint check covers the interval.
      Rational delta = end.is_infinite() ? Rational(1) : min_of(end.value() - y, Rational(1));
      int halvings = 0;
      while (inner.poly.evaluate(y + delta) > cap) {
        delta /= 2;
        if (++halvings > 512) return std::nullopt;
      }
      end = ExtendedRational(Rational(y + delta));
    }
  }
  return LocalGerm{std::move(*poly), y, end};
}

std::optional<TailGerm> ControlFunction::tail_germ(const PolyLimits& limits) const {
  const FunctionNode& node = *node_;
  if (node.hi.is_finite()) return std::nullopt;
  switch (node.kind) {
    case Kind::piecewise: {
      const Piece& last = node.pieces.back();
      return TailGerm{last.polynomial(), last.lo};
    }
    case Kind::compose: {
      auto inner = node.children[1].tail_germ(limits);
      if (!inner) return std::nullopt;
      if (inner->poly.degree() == 0) {
        const Rational c = inner->poly.coefficient(0);
        return TailGerm{SparsePolynomial::constant(node.children[0].evaluate(c)), inner->start};
      }
      auto outer = node.children[0].tail_germ(limits);
      if (!outer) return std::nullopt;
      auto tail = compose_tails(*outer, *inner, limits);
      if (tail && tail->start < node.lo) tail->start = node.lo;
      return tail;
    }
    case Kind::iterate: {
      auto base = node.children[0].tail_germ(limits);
      if (!base) return std::nullopt;
      TailGerm current = *base;
      for (std::uint64_t i = 1; i < node.count; ++i) {
        auto next = compose_tails(*base, current, limits);
        if (!next) return std::nullopt;
        current = std::move(*next);
      }
      if (current.start < node.lo) current.start = node.lo;
      return current;
    }
    case Kind::paste: {
      auto tail = node.children.back().tail_germ(limits);
      if (tail && !node.cuts.empty() && tail->start < node.cuts.back()) tail->start = node.cuts.back();
      return tail;
    }
    case Kind::restrict: {
      auto tail = node.children[0].tail_germ(limits);
      if (tail && tail->start < node.lo) tail->start = node.lo;
      return tail;
    }
  }
  return std::nullopt;
}

std::optional<LocalGerm> ControlFunction::local_germ(const Rational& y, const PolyLimits& limits) const {
  const FunctionNode& node = *node_;
  if (y < node.lo || ExtendedRational(y) >= node.hi) return std::nullopt;
  switch (node.kind) {
    case Kind::piecewise: {
      for (const Piece& piece : node.pieces) {
        if (piece.lo <= y && ExtendedRational(y) < piece.hi) return LocalGerm{piece.polynomial(), piece.lo, piece.hi};
      }
      return std::nullopt;
    }
    case Kind::compose: {
      auto inner = node.children[1].local_germ(y, limits);
      if (!inner) return std::nullopt;
      auto outer = node.children[0].local_germ(inner->poly.evaluate(y), limits);
      if (!outer) return std::nullopt;
      auto germ = compose_local(*outer, *inner, y, limits);
      if (germ && germ->hi > node.hi) germ->hi = node.hi;
      return germ;
    }
    case Kind::iterate: {
      auto current = node.children[0].local_germ(y, limits);
      for (std::uint64_t i = 1; i < node.count && current; ++i) {
        auto outer = node.children[0].local_germ(current->poly.evaluate(y), limits);
        if (!outer) return std::nullopt;
        current = compose_local(*outer, *current, y, limits);
      }
      if (current && current->hi > node.hi) current->hi = node.hi;
      return current;
    }
    case Kind::paste: {
      std::size_t i = 0;
      while (i < node.cuts.size() && y >= node.cuts[i]) ++i;
      auto germ = node.children[i].local_germ(y, limits);
      if (germ && i < node.cuts.size() && germ->hi > ExtendedRational(node.cuts[i])) germ->hi = node.cuts[i];
      return germ;
    }
    case Kind::restrict: {
      auto germ = node.children[0].local_germ(y, limits);
      if (germ && germ->hi > node.hi) germ->hi = node.hi;
      return germ;
    }
  }
  return std::nullopt;
}

std::optional<LocalGerm> ControlFunction::head_germ(const PolyLimits& limits) const {
  if (sgn(node_->lo) != 0) return std::nullopt;
  auto germ = local_germ(Rational(0), limits);
  if (germ) germ->lo = 0;
  return germ;
}

// ---------------------------------------------------------------- domination

std::string to_string(const DominationVerdict& verdict) {
  std::string out;
  switch (verdict.kind) {
    case DominationVerdict::Kind::yes: out = "Yes(threshold " + to_string(verdict.point); break;
    case DominationVerdict::Kind::no: out = "No(point " + to_string(verdict.point); break;
    case DominationVerdict::Kind::unknown: out = "Unknown(horizon " + to_string(verdict.point); break;
  }
  if (verdict.small_point) out += ", near zero " + to_string(*verdict.small_point);
  return out + ")";
}

DominationVerdict compare_tails(const TailGerm& f, const TailGerm& g, Strictness strictness) {
  const bool strict = strictness == Strictness::strict;
  const Rational start = max_of(f.start, g.start);
  const SparsePolynomial diff = f.poly - g.poly;
  DominationVerdict verdict;
  if (diff.is_zero()) {
    verdict.kind = strict ? DominationVerdict::Kind::no : DominationVerdict::Kind::yes;
    verdict.point = start;
    verdict.certificate = "identical tails " + f.poly.to_string() + " from " + to_string(start);
    return verdict;
  }
  if (sgn(diff.leading_coefficient()) > 0) {
    verdict.kind = DominationVerdict::Kind::yes;
    verdict.point = max_of(start, strict ? threshold_positive(diff) : threshold_nonnegative(diff));
    verdict.certificate = "difference " + diff.to_string() + " has leading term " + leading_term(diff);
    return verdict;
  }
  verdict.kind = DominationVerdict::Kind::no;
  verdict.point = max_of(start, threshold_positive(-diff));
  verdict.certificate = "difference " + diff.to_string() + " has leading term " + leading_term(diff) +
                        ", negative for every x >= " + to_string(verdict.point);
  return verdict;
}

DominationVerdict compare_heads(const LocalGerm& f, const LocalGerm& g, Strictness strictness) {
  if (sgn(f.lo) != 0 || sgn(g.lo) != 0) throw PreconditionError("near-zero comparison needs germs at zero");
  const bool strict = strictness == Strictness::strict;
  Rational radius(1);
  if (f.hi.is_finite()) radius = min_of(radius, f.hi.value());
  if (g.hi.is_finite()) radius = min_of(radius, g.hi.value());
  const SparsePolynomial diff = f.poly - g.poly;
  DominationVerdict verdict;
  if (diff.is_zero()) {
    verdict.kind = strict ? DominationVerdict::Kind::no : DominationVerdict::Kind::yes;
    verdict.point = radius;
    verdict.certificate = "identical germs " + f.poly.to_string() + " on [0, " + to_string(radius) + "]";
    return verdict;
  }
  if (sgn(diff.lowest_coefficient()) > 0) {
    verdict.kind = DominationVerdict::Kind::yes;
    verdict.point = min_of(radius, strict ? radius_positive(diff) : radius_nonnegative(diff));
    verdict.certificate = "difference " + diff.to_string() + " has lowest-order term " + lowest_term(diff);
    return verdict;
  }
  verdict.kind = DominationVerdict::Kind::no;
  verdict.point = min_of(radius, radius_positive(-diff));
  verdict.certificate = "difference " + diff.to_string() + " has lowest-order term " + lowest_term(diff) +
                        ", negative on (0, " + to_string(verdict.point) + "]";
  return verdict;
}

DominationVerdict eventually_dominates(const ControlFunction& f, const ControlFunction& g, Scale scale,
                                       Strictness strictness) {
  check_scales(f, g, scale);
  auto large_end = [&]() -> DominationVerdict {
    auto tf = f.tail_germ();
    auto tg = g.tail_germ();
    if (!tf || !tg) return sampled_unknown(f, g);
    return compare_tails(*tf, *tg, strictness);
  };
  auto small_end = [&]() -> DominationVerdict {
    if (sgn(f.domain_start()) != 0 || sgn(g.domain_start()) != 0) {
      throw PreconditionError("near-zero comparison needs functions defined at zero");
    }
    auto hf = f.head_germ();
    auto hg = g.head_germ();
    if (!hf || !hg) {
      DominationVerdict verdict;
      verdict.point = Rational(0);
      verdict.certificate = "no symbolic germ available near zero";
      return verdict;
    }
    return compare_heads(*hf, *hg, strictness);
  };
  if (scale == Scale::large) return large_end();
  if (scale == Scale::small) return small_end();
  DominationVerdict big = large_end();
  DominationVerdict little = small_end();
  DominationVerdict verdict;
  verdict.point = big.point;
  verdict.small_point = little.point;
  verdict.certificate = "near infinity: " + big.certificate + "; near zero: " + little.certificate;
  if (big.is_no() || little.is_no()) {
    verdict.kind = DominationVerdict::Kind::no;
  } else if (big.is_yes() && little.is_yes()) {
    verdict.kind = DominationVerdict::Kind::yes;
  } else {
    verdict.kind = DominationVerdict::Kind::unknown;
  }
  return verdict;
}

DimControlCertificate is_dim_control(const ControlFunction& f, Scale scale) {
  DimControlCertificate cert;
  cert.holds = true;
  const SparsePolynomial x = SparsePolynomial::monomial(Rational(1), 1);
  auto note = [&](const std::string& text) {
    if (!cert.reason.empty()) cert.reason += "; ";
    cert.reason += text;
  };
  if (scale == Scale::large || scale == Scale::global) {
    auto tail = f.tail_germ();
    if (f.domain_end().is_finite()) {
      cert.holds = false;
      note("bounded domain");
    } else if (!tail) {
      cert.holds = false;
      cert.decided = false;
      note("no symbolic germ near infinity");
    } else if (tail->poly.degree() == 0) {
      cert.holds = false;
      note("bounded: constant " + tail->poly.to_string() + " beyond " + to_string(tail->start));
    } else {
      const SparsePolynomial diff = tail->poly - x;
      if (diff.is_zero() || sgn(diff.leading_coefficient()) > 0) {
        cert.large_threshold = max_of(tail->start, threshold_nonnegative(diff));
        note("f(x) >= x for x >= " + to_string(*cert.large_threshold));
      } else {
        cert.holds = false;
        note("f(x) < x eventually: f - x has leading term " + leading_term(diff));
      }
    }
  }
  if (scale == Scale::small || scale == Scale::global) {
    if (sgn(f.domain_start()) != 0) {
      cert.holds = false;
      note("domain does not contain 0");
    } else if (sgn(f.evaluate(Rational(0))) != 0) {
      cert.holds = false;
      note("f(0) = " + to_string(f.evaluate(Rational(0))) + " is not 0");
    } else if (auto head = f.head_germ(); !head) {
      cert.holds = false;
      cert.decided = false;
      note("no symbolic germ near zero");
    } else {
      const SparsePolynomial diff = head->poly - x;
      Rational radius = head->hi.is_finite() ? head->hi.value() : Rational(1);
      if (diff.is_zero() || sgn(diff.lowest_coefficient()) > 0) {
        cert.small_radius = min_of(radius, radius_nonnegative(diff));
        note("f(x) >= x on [0, " + to_string(*cert.small_radius) + "]");
      } else {
        cert.holds = false;
        note("f(x) < x near 0: f - x has lowest-order term " + lowest_term(diff));
      }
    }
  }
  return cert;
}

// ---------------------------------------------------------------- constructions

ControlFunction paste_dominating(const ControlFunction& g, const Rational& lo, const Rational& hi,
                                 const Rational& f_left, const Rational& f_right) {
  if (!(lo < hi)) throw PreconditionError("paste interval must have lo < hi");
  if (!g.is_piecewise()) throw PreconditionError("paste_dominating needs a piecewise function");
  if (lo < g.domain_start() || ExtendedRational(hi) > g.domain_end()) {
    throw PreconditionError("paste interval outside the domain of g");
  }
  const Rational g_lo = g.evaluate(lo);
  const Rational g_hi = g.evaluate(hi);
  if (f_left < g_lo) throw PreconditionError("left value " + to_string(f_left) + " below g(lo) = " + to_string(g_lo));
  if (f_right < g_hi) throw PreconditionError("right value " + to_string(f_right) + " below g(hi) = " + to_string(g_hi));
  if (f_right < f_left) throw PreconditionError("right value below left value");

  const std::vector<Piece> base = clip_pieces(g.pieces(), lo, hi);
  auto shifted = [&](const Rational& k) {
    std::vector<Piece> out = base;
    for (auto& piece : out) piece.b += k;
    return out;
  };

  const Rational lift = f_left - g_lo;
  std::vector<Piece> aux = shifted(lift);
  const Rational aux_hi = g_hi + lift;
  if (aux_hi == f_right) return make_piecewise(std::move(aux), g.scale());
  if (aux_hi < f_right) {
    // Every piece is convex, so the chord over the last piece lies above it.
    const Rational z = aux.back().lo;
    const Rational aux_z = aux.back().value(z);
    aux.pop_back();
    aux.push_back(segment_piece(z, aux_z, hi, f_right));
    return make_piecewise(std::move(aux), g.scale());
  }
  std::vector<Piece> lowered = shifted(f_right - g_hi);
  std::size_t k = 0;
  while (lowered[k].hi.is_finite() && lowered[k].value(lowered[k].hi.value()) < f_left) ++k;
  const Rational q = lowered[k].hi.value();
  std::vector<Piece> out{segment_piece(lo, f_left, q, lowered[k].value(q))};
  out.insert(out.end(), lowered.begin() + static_cast<std::ptrdiff_t>(k) + 1, lowered.end());
  return make_piecewise(std::move(out), g.scale());
}

DiagonalDominator diagonal_dominator(const ControlFunction& f, std::uint64_t levels) {
  if (levels == 0) throw PreconditionError("diagonal dominator needs at least one level");
  auto tail = f.tail_germ();
  if (!tail) throw PreconditionError("diagonal dominator needs a symbolic tail");
  const SparsePolynomial x = SparsePolynomial::monomial(Rational(1), 1);
  const SparsePolynomial gap = tail->poly - x;
  if (gap.is_zero() || sgn(gap.leading_coefficient()) <= 0) {
    throw PreconditionError("function is not eventually strictly above the identity");
  }
  Rational start = max_of(tail->start, threshold_positive(gap));
  if (start < 1) start = 1;

  const PolyLimits limits{256, std::size_t{1} << 22};
  std::vector<SparsePolynomial> iterates{tail->poly};
  for (std::uint64_t n = 1; n <= levels; ++n) {
    auto next = tail->poly.compose(iterates.back(), limits);
    if (!next) throw CapExceeded("iterate " + std::to_string(n + 1) + " exceeds the symbolic size cap");
    iterates.push_back(std::move(*next));
  }

  DiagonalDominator out;
  for (std::uint64_t n = 0; n <= levels; ++n) out.knots.push_back(start + Rational(static_cast<long>(n)));
  out.threshold = out.knots.back();

  // Final piece: the last iterate itself, or a single monomial above it for x >= 1.
  Piece final_piece;
  const SparsePolynomial& top = iterates.back();
  if (auto form = top.as_piece_form(); form && sgn(form->a) > 0) {
    final_piece = Piece{out.threshold, ExtendedRational::infinity(), form->a, form->p, form->b};
  } else {
    Rational positive(0);
    for (const auto& [e, c] : top.terms()) {
      if (sgn(c) > 0) positive += c;
    }
    final_piece = Piece{out.threshold, ExtendedRational::infinity(), positive, top.degree(), Rational(0)};
  }

  std::vector<Rational> values;
  for (std::uint64_t n = 0; n < levels; ++n) values.push_back(iterates[n].evaluate(out.knots[n]));
  values.push_back(final_piece.value(out.threshold));

  std::vector<Piece> rest;
  for (std::uint64_t n = 0; n < levels; ++n) {
    rest.push_back(segment_piece(out.knots[n], values[n], out.knots[n + 1], values[n + 1]));
  }
  rest.push_back(final_piece);

  const Rational& x1 = out.knots.front();
  if (f.domain_start() >= x1) {
    out.function = make_piecewise(std::move(rest), f.scale());
  } else if (f.is_piecewise()) {
    std::vector<Piece> pieces = clip_pieces(f.pieces(), f.domain_start(), x1);
    pieces.insert(pieces.end(), rest.begin(), rest.end());
    out.function = make_piecewise(std::move(pieces), f.scale());
  } else {
    out.function = ControlFunction::paste({restrict(f, f.domain_start(), x1), make_piecewise(std::move(rest), f.scale())},
                                          {x1}, f.scale());
  }
  return out;
}

}  // namespace scdim
