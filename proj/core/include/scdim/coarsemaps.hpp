#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scdim/covers.hpp"
#include "scdim/dimsolver.hpp"
#include "scdim/funcalg.hpp"
#include "scdim/metricspace.hpp"

namespace scdim {

// Total map between finite spaces; need not be injective.
class PointMap {
 public:
  PointMap(FiniteMetricSpace source, FiniteMetricSpace target, std::vector<std::size_t> image);
  /// Every source label must appear exactly once.
  static PointMap from_labels(FiniteMetricSpace source, FiniteMetricSpace target,
                              const std::vector<std::pair<std::string, std::string>>& pairs);
  static PointMap identity(const FiniteMetricSpace& x);

  const FiniteMetricSpace& source() const { return source_; }
  const FiniteMetricSpace& target() const { return target_; }
  std::size_t operator()(std::size_t x) const { return image_[x]; }
  const std::vector<std::size_t>& image() const { return image_; }
  /// d_Y(f(x), f(y)).
  const Rational& image_distance(std::size_t x, std::size_t y) const;
  /// Source points mapped into `target_points`.
  PointSet preimage(const PointSet& target_points) const;

 private:
  FiniteMetricSpace source_;
  FiniteMetricSpace target_;
  std::vector<std::size_t> image_;
};

/// Header `map <source-file> <target-file>`, then `src-label -> tgt-label` lines.
struct MapFile {
  std::string source_path;
  std::string target_path;
  std::vector<std::pair<std::string, std::string>> pairs;
};
MapFile parse_map_file(std::string_view text);
std::string format_map(const PointMap& map, std::string_view source_path, std::string_view target_path);

struct EmbeddingFailure {
  enum class Side { lower, upper };
  Side side;
  std::size_t x = 0, y = 0;
  Rational source_distance;
  Rational image_distance;
  Rational bound;  // rho_-(d) for lower, rho_+(d) for upper
  std::string describe(const PointMap& map) const;
};

struct EmbeddingWitness {
  ControlFunction rho_minus;
  ControlFunction rho_plus;
  bool verified = false;
  std::optional<EmbeddingFailure> failure;  // first violating pair in (x, y) order
};

/// rho_-(d(x, y)) <= d(f x, f y) <= rho_+(d(x, y)) for every pair x < y.
EmbeddingWitness verify_embedding(const PointMap& map, const ControlFunction& rho_minus,
                                  const ControlFunction& rho_plus);

/// Smallest nondecreasing dilatation sampled at s: max d(f x, f y) over d(x, y) <= s.
Rational empirical_dilatation(const PointMap& map, const Rational& s);

struct PullbackOptions {
  std::optional<EmbeddingWitness> witness;
  std::optional<Rational> lebesgue_target;  // the t of the Lebesgue check
};

struct PullbackReport {
  std::size_t source_multiplicity = 0;
  std::size_t target_multiplicity = 0;
  bool multiplicity_ok = true;

  // Lebesgue transfer: needs a verified witness and a caller-supplied t.
  bool lebesgue_checked = false;
  Rational t;
  Rational required_target_lebesgue;  // rho_+(t)
  ExtendedRational target_lebesgue;
  ExtendedRational source_lebesgue;
  bool lebesgue_premise = false;      // target Lebesgue >= rho_+(t)
  bool lebesgue_ok = true;            // premise implies source Lebesgue >= t

  // Bound transfer: needs a verified witness with a non-opaque rho_-.
  bool bound_checked = false;
  Rational target_bound;
  std::optional<ExtendedRational> inverse_bound;  // rho_-^{-1}(target bound)
  Rational source_bound;
  bool bound_ok = true;
  std::string note;

  bool ok() const { return multiplicity_ok && lebesgue_ok && bound_ok; }
};

struct Pullback {
  ColoredCover cover;
  PullbackReport report;
};

/// Preimages of the target pieces (empty ones dropped), colors inherited.
Pullback pullback_cover(const PointMap& map, const ColoredCover& target_cover, const PullbackOptions& options = {});

struct UltrametricReport {
  bool ultrametric = true;
  bool below = true;       // d_u <= d
  bool controlled = true;  // d <= D_0(d_u)
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
  bool ok() const { return ultrametric && below && controlled; }
};

/// d_u(x, y) = least distance value s with x and y in one s-component.
std::pair<FiniteMetricSpace, UltrametricReport> ultrametrize(const FiniteMetricSpace& x);

struct LOmegaEmbedding {
  PointMap map;
  std::int64_t window_start = 0;
  Rational c1 = 1, c2 = 1;  // c1 * d <= d_L(f x, f y) <= c2 * d on every pair
  bool certified = false;   // all-pairs check passed with c2 <= 3 * c1
};

/// Snaps distances up to powers of 3; the symbol at index -m is the class of
/// the relation d < 3^m. Throws InvalidInput on non-ultrametric input.
LOmegaEmbedding embed_lomega(const FiniteMetricSpace& x);

struct MapControlOptions {
  std::size_t clique_cap = 20000;
  SolveOptions solve;
};

struct BoundedSubset {
  PointSet points;
  Rational bound;
  std::vector<std::size_t> colors;  // optimal (m+1)-decomposition
};

struct MapControlSample {
  std::size_t m = 0;
  Rational r, big_r;
  Rational value;
  std::size_t worst = 0;  // index into subsets
  std::vector<BoundedSubset> subsets;  // maximal (inf, R)-bounded subsets
};

/// Max over maximal (inf, R)-bounded subsets of the exact (m+1)-decomposition
/// objective at scale r.
MapControlSample map_dim_control(const PointMap& map, std::size_t m, const Rational& r, const Rational& big_r,
                                 const MapControlOptions& options = {});

/// Maximal cliques of the graph, each sorted, in lexicographic order (Bron–Kerbosch with pivoting).
std::vector<PointSet> maximal_cliques(const std::vector<std::vector<char>>& adjacency, std::size_t cap);

// (r, R) -> D_K(r + 2R) + 2R.
class TwoArgumentControl {
 public:
  explicit TwoArgumentControl(ControlFunction dk);
  Rational evaluate(const Rational& r, const Rational& big_r) const;
  /// The function r -> D_K(r + 2R) + 2R at fixed R.
  ControlFunction slice(const Rational& big_r) const;
  /// Expanded polynomial in r and R when D_K is a single polynomial piece from 0.
  std::optional<std::string> polynomial_form() const;
  std::string to_string() const;
  const ControlFunction& kernel_control() const { return dk_; }

 private:
  ControlFunction dk_;
};

TwoArgumentControl exact_sequence_control(const ControlFunction& dk);

struct HurewiczRow {
  Rational s;
  Rational dilatation;           // empirical rho_+(s)
  Rational target_bound;         // bound of the (n+1)-colored cover of Y at rho_+(s)
  SolveMethod target_method = SolveMethod::exact;
  Rational fiber_bound;          // worst (m+1)-decomposition of a preimage
  bool fibers_exact = true;
  Rational assembled_bound;      // ((m+1)(n+1))-colored cover of X
  bool assembled_valid = false;  // covering and s-disjoint per color
  std::optional<Rational> exact_bound;  // exact D_{m+n}(s) of X
  bool exact_le_assembled = false;
  std::string status = "ok";
};

struct HurewiczReport {
  std::size_t m = 0, n = 0;
  std::vector<HurewiczRow> rows;
  bool ok() const;
};

/// Assembles color i * (n + 1) + j from class i of the decomposition of the
/// preimage of a color-j piece of Y, and compares with exact D_{m+n}.
HurewiczReport hurewicz_check(const PointMap& map, std::size_t m, std::size_t n, const std::vector<Rational>& scales,
                              const SolveOptions& options = {});

/// The assembled cover at one scale, for inspection.
ColoredCover hurewicz_assembly(const PointMap& map, std::size_t m, std::size_t n, const Rational& s,
                               const SolveOptions& options = {});

}  // namespace scdim
