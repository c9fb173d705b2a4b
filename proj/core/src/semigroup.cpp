#include "scdim/semigroup.hpp"

#include <algorithm>
#include <sstream>

#include "scdim/errors.hpp"

namespace scdim {
namespace {

struct Candidate {
  ChainElement element;
  std::optional<TailGerm> tail;
  std::optional<LocalGerm> head;
};

struct Composite {
  std::optional<TailGerm> tail;
  std::optional<LocalGerm> head;
};

bool wants_tail(Scale scale) { return scale != Scale::small; }
bool wants_head(Scale scale) { return scale != Scale::large; }

std::optional<Composite> compose_composite(const Composite& outer, const Candidate& inner, Scale scale,
                                           const PolyLimits& limits) {
  Composite out;
  if (wants_tail(scale)) {
    if (!outer.tail || !inner.tail) return std::nullopt;
    out.tail = compose_tails(*outer.tail, *inner.tail, limits);
    if (!out.tail) return std::nullopt;
  }
  if (wants_head(scale)) {
    if (!outer.head || !inner.head) return std::nullopt;
    out.head = compose_local(*outer.head, *inner.head, Rational(0), limits);
    if (!out.head) return std::nullopt;
  }
  return out;
}

DominationVerdict compare(const Composite& chain, const Composite& query, Scale scale) {
  if (scale == Scale::large) return compare_tails(*chain.tail, *query.tail);
  if (scale == Scale::small) return compare_heads(*chain.head, *query.head);
  DominationVerdict big = compare_tails(*chain.tail, *query.tail);
  DominationVerdict little = compare_heads(*chain.head, *query.head);
  DominationVerdict out;
  out.point = big.point;
  out.small_point = little.point;
  out.certificate = "near infinity: " + big.certificate + "; near zero: " + little.certificate;
  if (big.is_yes() && little.is_yes()) {
    out.kind = DominationVerdict::Kind::yes;
  } else if (big.is_no() || little.is_no()) {
    out.kind = DominationVerdict::Kind::no;
  }
  return out;
}

Candidate linear_candidate(const Rational& slope) {
  Candidate c;
  c.element.linear = true;
  c.element.slope = slope;
  const SparsePolynomial poly = SparsePolynomial::monomial(slope, 1);
  c.tail = TailGerm{poly, Rational(0)};
  c.head = LocalGerm{poly, Rational(0), ExtendedRational::infinity()};
  return c;
}

// Upper envelope of the generators near infinity, when one is available.
std::optional<TailGerm> envelope(const ControlSemigroup& s) {
  if (s.bound) return s.bound->tail_germ();
  if (s.generators.empty()) return TailGerm{SparsePolynomial::monomial(Rational(1), 1), Rational(0)};
  std::uint64_t degree = 1;
  Rational lead(1);
  for (const auto& g : s.generators) {
    auto tail = g.tail_germ();
    if (!tail) return std::nullopt;
    degree = std::max(degree, tail->poly.degree());
    if (tail->poly.leading_coefficient() > lead) lead = tail->poly.leading_coefficient();
  }
  if (degree <= 1) return TailGerm{SparsePolynomial::monomial(Rational(1), 1), Rational(0)};
  return TailGerm{SparsePolynomial::monomial(lead + 1, degree), Rational(0)};
}

std::optional<Refutation> refute(const TailGerm& query, const ControlSemigroup& s, std::size_t depth) {
  auto bound = envelope(s);
  if (!bound) return std::nullopt;
  if (bound->poly.degree() <= 1) {
    if (query.poly.degree() < 2) return std::nullopt;
    Refutation r;
    r.all_depths = true;
    r.reason = "query has degree " + std::to_string(query.poly.degree()) +
               " near infinity while every member is eventually below a linear function";
    return r;
  }
  TailGerm power = *bound;
  for (std::size_t i = 1; i < depth; ++i) {
    auto next = compose_tails(*bound, power);
    if (!next) return std::nullopt;
    power = std::move(*next);
  }
  const DominationVerdict verdict = compare_tails(query, power, Strictness::strict);
  if (!verdict.is_yes()) return std::nullopt;
  Refutation r;
  r.reason = "query exceeds the bound iterated " + std::to_string(depth) + " times (" + power.poly.to_string() +
             ") beyond " + to_string(verdict.point) + "; every chain of at most " + std::to_string(depth) +
             " factors stays below that iterate";
  return r;
}

void require_same_scale(const ControlSemigroup& a, const ControlSemigroup& b) {
  if (a.scale != b.scale) {
    throw ScaleMismatch("semigroup scales differ: " + to_string(a.scale) + " vs " + to_string(b.scale));
  }
}

}  // namespace

ControlSemigroup generated(std::vector<ControlFunction> generators, Scale scale, std::string name,
                           std::optional<ControlFunction> bound) {
  for (std::size_t i = 0; i < generators.size(); ++i) {
    generators[i] = generators[i].with_scale(scale);
    const auto cert = is_dim_control(generators[i], scale);
    if (!cert.holds) {
      throw InvalidInput("generator " + std::to_string(i) + " (" + generators[i].to_string() +
                         ") is not a dim-control function: " + cert.reason);
    }
  }
  if (bound) {
    bound = bound->with_scale(scale);
    if (!is_dim_control(*bound, scale).holds) throw InvalidInput("bound is not a dim-control function");
    for (const auto& g : generators) {
      if (!eventually_dominates(*bound, g, scale).is_yes()) {
        throw InvalidInput("bound does not dominate generator " + g.to_string());
      }
    }
  }
  return ControlSemigroup{scale, std::move(generators), std::move(name), std::move(bound)};
}

std::string describe_chain(const std::vector<ChainElement>& chain, const ControlSemigroup& semigroup) {
  std::string out = "[";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i > 0) out += ", ";
    if (chain[i].linear) {
      out += to_string(chain[i].slope) + "x";
    } else {
      out += semigroup.generators.at(chain[i].generator).to_string();
    }
  }
  return out + "]";
}

MembershipResult dominated_in(const ControlFunction& g, const ControlSemigroup& semigroup,
                              const SearchOptions& options) {
  if (options.depth == 0) throw PreconditionError("search depth must be at least 1");
  const Scale scale = semigroup.scale;
  const ControlFunction query_fn = g.with_scale(scale);
  Composite query;
  if (wants_tail(scale)) query.tail = query_fn.tail_germ();
  if (wants_head(scale)) query.head = query_fn.head_germ();

  MembershipResult result;
  if ((wants_tail(scale) && !query.tail) || (wants_head(scale) && !query.head)) return result;

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < semigroup.generators.size(); ++i) {
    Candidate c;
    c.element.generator = i;
    if (wants_tail(scale)) c.tail = semigroup.generators[i].tail_germ();
    if (wants_head(scale)) c.head = semigroup.generators[i].head_germ();
    candidates.push_back(std::move(c));
  }
  std::vector<Rational> slopes = options.slopes;
  // The query's own slope keeps witnesses for linear queries exact.
  if (query.tail && query.tail->poly.degree() == 1) slopes.push_back(query.tail->poly.leading_coefficient());
  if (query.head && query.head->poly.lowest_exponent() == 1 && sgn(query.head->poly.lowest_coefficient()) > 0) {
    slopes.push_back(query.head->poly.lowest_coefficient());
  }
  slopes.erase(std::remove_if(slopes.begin(), slopes.end(), [](const Rational& s) { return sgn(s) <= 0; }),
               slopes.end());
  std::sort(slopes.begin(), slopes.end());
  slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
  for (const auto& s : slopes) candidates.push_back(linear_candidate(s));

  const PolyLimits limits{64, std::size_t{1} << 16};
  std::vector<ChainElement> chain;
  // Depth-first over chains of exactly `length` factors.
  auto search = [&](auto&& self, const Composite& prefix, std::size_t length) -> bool {
    if (chain.size() == length) {
      ++result.chains_tried;
      DominationVerdict verdict = compare(prefix, query, scale);
      if (verdict.is_yes()) {
        result.witness = MembershipWitness{chain, std::move(verdict)};
        return true;
      }
      return false;
    }
    for (const auto& candidate : candidates) {
      std::optional<Composite> next;
      if (chain.empty()) {
        if ((wants_tail(scale) && !candidate.tail) || (wants_head(scale) && !candidate.head)) {
          ++result.chains_skipped;
          continue;
        }
        next = Composite{candidate.tail, candidate.head};
      } else {
        next = compose_composite(prefix, candidate, scale, limits);
      }
      if (!next) {
        ++result.chains_skipped;
        continue;
      }
      chain.push_back(candidate.element);
      if (self(self, *next, length)) return true;
      chain.pop_back();
    }
    return false;
  };
  for (std::size_t length = 1; length <= options.depth; ++length) {
    if (search(search, Composite{}, length)) return result;
  }
  if (query.tail && wants_tail(scale)) result.refutation = refute(*query.tail, semigroup, options.depth);
  return result;
}

std::string to_string(Verdict3 verdict) {
  switch (verdict) {
    case Verdict3::yes: return "Yes";
    case Verdict3::no: return "No";
    case Verdict3::unknown: return "Unknown";
  }
  return "Unknown";
}

FinerReport is_finer(const ControlSemigroup& fine, const ControlSemigroup& coarse, const SearchOptions& options) {
  require_same_scale(fine, coarse);
  FinerReport report;
  bool all = true;
  bool refuted = false;
  for (const auto& g : coarse.generators) {
    report.per_generator.push_back(dominated_in(g, fine, options));
    const auto& r = report.per_generator.back();
    all = all && r.found();
    refuted = refuted || r.refutation.has_value();
  }
  report.verdict = all ? Verdict3::yes : refuted ? Verdict3::no : Verdict3::unknown;
  return report;
}

ControlSemigroup truncate(const ControlSemigroup& global, Scale end) {
  if (global.scale != Scale::global) throw ScaleMismatch("truncation needs a global semigroup");
  if (end == Scale::global) throw ScaleMismatch("truncation target must be large or small");
  ControlSemigroup out;
  out.scale = end;
  out.name = global.name.empty() ? std::string() : "trunc(" + global.name + ")";
  for (const auto& g : global.generators) out.generators.push_back(g.with_scale(end));
  if (global.bound) out.bound = global.bound->with_scale(end);
  return out;
}

ControlFunction link_functions(const ControlFunction& small, const ControlFunction& large, const Rational& crossover) {
  if (sgn(crossover) <= 0) throw PreconditionError("crossover must be positive");
  const ControlFunction g1 = small.with_scale(Scale::global);
  const ControlFunction g2 = large.with_scale(Scale::global);
  if (sgn(g1.domain_start()) != 0 || ExtendedRational(crossover) > g1.domain_end()) {
    throw DomainError("small-scale function must be defined on [0, crossover]");
  }
  const Rational v = g1.evaluate(crossover);
  Rational far = crossover * 2;
  for (int k = 0; k < 4096; ++k, far *= 2) {
    if (far < g2.domain_start() || ExtendedRational(far) > g2.domain_end()) continue;
    if (g2.evaluate(far) >= v) break;
  }
  if (far < g2.domain_start() || g2.evaluate(far) < v) throw DomainError("large-scale function never reaches the junction value");
  const ControlFunction flat = ControlFunction::piecewise({Piece{crossover, far, Rational(0), 0, v}}, Scale::global);
  const ControlFunction bridge = paste_dominating(flat, crossover, far, v, g2.evaluate(far));
  return ControlFunction::paste({g1, bridge, g2}, {crossover, far}, Scale::global);
}

ControlSemigroup link(const ControlSemigroup& small, const ControlSemigroup& large, const Rational& crossover) {
  if (small.scale != Scale::small) throw ScaleMismatch("link needs a small-scale first argument");
  if (large.scale != Scale::large) throw ScaleMismatch("link needs a large-scale second argument");
  std::vector<ControlFunction> lows{ControlFunction::identity(Scale::small)};
  lows.insert(lows.end(), small.generators.begin(), small.generators.end());
  std::vector<ControlFunction> highs{ControlFunction::identity(Scale::large)};
  highs.insert(highs.end(), large.generators.begin(), large.generators.end());
  std::vector<ControlFunction> generators;
  for (std::size_t i = 0; i < lows.size(); ++i) {
    for (std::size_t j = 0; j < highs.size(); ++j) {
      if (i == 0 && j == 0) continue;
      generators.push_back(link_functions(lows[i], highs[j], crossover));
    }
  }
  std::string name;
  if (!small.name.empty() || !large.name.empty()) name = "link(" + small.name + "," + large.name + ")";
  return generated(std::move(generators), Scale::global, std::move(name));
}

std::vector<ControlSemigroup> tower(std::size_t levels, const TowerOptions& options) {
  if (levels == 0) throw PreconditionError("tower needs at least one level");
  std::vector<ControlSemigroup> out;
  out.push_back(generated({}, Scale::large, "S1"));
  if (levels == 1) return out;
  const ControlFunction square = ControlFunction::monomial(Rational(1), 2, Rational(1));
  out.push_back(generated({square}, Scale::large, "S2", square));
  while (out.size() < levels) {
    const ControlSemigroup& previous = out.back();
    const DiagonalDominator next = diagonal_dominator(*previous.bound, options.dominator_levels);
    std::vector<ControlFunction> generators = previous.generators;
    generators.push_back(next.function);
    out.push_back(generated(std::move(generators), Scale::large, "S" + std::to_string(out.size() + 1), next.function));
  }
  return out;
}

ControlSemigroup parse_semigroup(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<ControlSemigroup> header;
  std::vector<ControlFunction> generators;
  std::optional<ControlFunction> bound;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream words(line.substr(first));
    std::string keyword;
    words >> keyword;
    std::string rest;
    std::getline(words, rest);
    if (keyword == "semigroup") {
      std::istringstream fields(rest);
      std::string name, scale;
      fields >> name >> scale;
      if (name.empty() || scale.empty()) throw InvalidInput("semigroup header needs a name and a scale");
      header = ControlSemigroup{parse_scale(scale), {}, name == "-" ? std::string() : name, std::nullopt};
    } else if (!header) {
      throw InvalidInput("line " + std::to_string(line_number) + ": expected a semigroup header");
    } else if (keyword == "gen") {
      generators.push_back(ControlFunction::parse(rest).with_scale(header->scale));
    } else if (keyword == "bound") {
      bound = ControlFunction::parse(rest).with_scale(header->scale);
    } else {
      throw InvalidInput("line " + std::to_string(line_number) + ": unknown keyword '" + keyword + "'");
    }
  }
  if (!header) throw InvalidInput("missing semigroup header");
  return generated(std::move(generators), header->scale, header->name, std::move(bound));
}

std::string format_semigroup(const ControlSemigroup& semigroup) {
  std::string out = "semigroup " + (semigroup.name.empty() ? std::string("-") : semigroup.name) + " " +
                    to_string(semigroup.scale) + "\n";
  // Functions are written without their scale prefix; the header carries it.
  auto body = [](const ControlFunction& f) { return f.with_scale(Scale::large).to_string(); };
  if (semigroup.bound) out += "bound " + body(*semigroup.bound) + "\n";
  for (const auto& g : semigroup.generators) out += "gen " + body(g) + "\n";
  return out;
}

}  // namespace scdim
