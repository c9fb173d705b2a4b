#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scdim/funcalg.hpp"

namespace scdim {

// Generator list of a control semigroup. The linear family c*x is always
// an implicit member and is never stored. The optional bound eventually
// dominates every generator.
struct ControlSemigroup {
  Scale scale = Scale::large;
  std::vector<ControlFunction> generators;
  std::string name;
  std::optional<ControlFunction> bound;
};

/// Validates every generator (and the bound, when given) for `scale`.
ControlSemigroup generated(std::vector<ControlFunction> generators, Scale scale, std::string name = {},
                           std::optional<ControlFunction> bound = std::nullopt);

struct SearchOptions {
  std::size_t depth = 3;
  std::vector<Rational> slopes{Rational(1), Rational(2), Rational(4), Rational(8), Rational(16)};
};

// One factor of a composition chain: a generator by index or a linear map.
struct ChainElement {
  bool linear = false;
  std::size_t generator = 0;
  Rational slope;
};

std::string describe_chain(const std::vector<ChainElement>& chain, const ControlSemigroup& semigroup);

struct MembershipWitness {
  std::vector<ChainElement> chain;  // f_1 ∘ f_2 ∘ ... ∘ f_n
  DominationVerdict verdict;        // chain composite against the query
};

// Evidence that no chain of at most `depth` factors dominates the query
// (or no chain at all when `all_depths` is set).
struct Refutation {
  bool all_depths = false;
  std::string reason;
};

struct MembershipResult {
  std::optional<MembershipWitness> witness;
  std::optional<Refutation> refutation;
  std::size_t chains_tried = 0;
  std::size_t chains_skipped = 0;  // symbolic limits exceeded

  bool found() const { return witness.has_value(); }
};

/// Searches chains of generators and linear slopes for one whose composite
/// eventually dominates g. Chains are tried by length, then lexicographically
/// with generators before slopes.
MembershipResult dominated_in(const ControlFunction& g, const ControlSemigroup& semigroup,
                              const SearchOptions& options = {});

enum class Verdict3 { yes, no, unknown };
std::string to_string(Verdict3 verdict);

struct FinerReport {
  Verdict3 verdict = Verdict3::unknown;
  std::vector<MembershipResult> per_generator;  // one per generator of the second semigroup
};

/// Every generator of `coarse` is dominated in `fine`.
FinerReport is_finer(const ControlSemigroup& fine, const ControlSemigroup& coarse, const SearchOptions& options = {});

/// Re-tags the generators of a global semigroup to one end.
ControlSemigroup truncate(const ControlSemigroup& global, Scale end);

/// Pairs (g1, g2) of small and large generators (identity included, the pair
/// of identities excluded), each pasted as g1 on [0, crossover], a monotone
/// bridge, then g2.
ControlSemigroup link(const ControlSemigroup& small, const ControlSemigroup& large, const Rational& crossover);

/// The bridged paste used by link().
ControlFunction link_functions(const ControlFunction& small, const ControlFunction& large, const Rational& crossover);

struct TowerOptions {
  std::uint64_t dominator_levels = 3;
};

/// S_1 = linear family, S_2 adds x^2 on [1, inf), and every further level adds
/// a diagonal dominator of the previous bound, which becomes the new bound.
std::vector<ControlSemigroup> tower(std::size_t levels, const TowerOptions& options = {});

/// Text form: `semigroup <name> <scale>`, optional `bound <expr>`, then `gen <expr>` lines.
ControlSemigroup parse_semigroup(std::string_view text);
std::string format_semigroup(const ControlSemigroup& semigroup);

}  // namespace scdim
