#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scdim/funcalg.hpp"
#include "scdim/rational.hpp"

namespace scdim {

// Generator name plus parameters, in generation order.
struct Provenance {
  std::string generator;
  std::vector<std::pair<std::string, std::string>> params;

  std::optional<std::string> param(std::string_view key) const;
  std::string to_string() const;  // "grid dims=2 side=8"
  static Provenance parse(std::string_view text);
  bool empty() const { return generator.empty(); }
};

struct MetricViolation {
  enum class Kind { negative, nonzero_diagonal, asymmetry, zero_distance, triangle };
  Kind kind;
  std::size_t i = 0, j = 0, k = 0;
  std::string describe(const std::vector<std::string>& labels) const;
};

// Finite metric space with exact distances. Immutable and cheap to copy.
// Besides the rational matrix it keeps every distance as a rank into the
// sorted list of distinct values, so threshold tests d <= s become integer
// comparisons.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace();  // single point "0"

  /// Validates and lists every violation in the thrown InvalidInput.
  static FiniteMetricSpace from_matrix(std::vector<std::string> labels, const std::vector<std::vector<Rational>>& matrix,
                                       Provenance provenance = {});
  /// Skips the cubic triangle check; for constructions that are metric by design.
  static FiniteMetricSpace from_trusted_matrix(std::vector<std::string> labels,
                                               const std::vector<std::vector<Rational>>& matrix,
                                               Provenance provenance = {});
  /// Row-major integer matrix. Validated only when `validate` is set.
  static FiniteMetricSpace from_integer_matrix(std::vector<std::string> labels, const std::vector<std::int64_t>& flat,
                                               Provenance provenance = {}, bool validate = true);
  /// `values` strictly increasing; `ranks` row-major indices into it.
  static FiniteMetricSpace from_ranks(std::vector<std::string> labels, std::vector<Rational> values,
                                      std::vector<std::uint32_t> ranks, Provenance provenance = {},
                                      bool validate = true);
  static std::vector<MetricViolation> validate(const std::vector<std::vector<Rational>>& matrix);

  std::size_t size() const;
  const Rational& distance(std::size_t i, std::size_t j) const;
  const std::string& label(std::size_t i) const;
  const std::vector<std::string>& labels() const;
  std::optional<std::size_t> index_of(std::string_view label) const;
  const Provenance& provenance() const;
  FiniteMetricSpace with_provenance(Provenance provenance) const;

  /// Distinct positive distances, increasing.
  std::vector<Rational> distinct_distances() const;
  Rational diameter() const;

  /// Rank of d(i, j) among the distinct values; the diagonal has rank 0.
  std::uint32_t rank(std::size_t i, std::size_t j) const;
  /// Distinct values including 0; value_of_rank(rank(i, j)) == distance(i, j).
  const Rational& value_of_rank(std::uint32_t r) const;
  std::uint32_t rank_count() const;
  /// Number of distinct values (0 included) that are <= s, so that
  /// d(i, j) <= s exactly when rank(i, j) < rank_threshold(s).
  std::uint32_t rank_threshold(const Rational& s) const;

  FiniteMetricSpace subspace(const std::vector<std::size_t>& indices) const;
  std::vector<std::vector<Rational>> matrix() const;

  /// First triple (i, j, k) with d(i, k) > max(d(i, j), d(j, k)).
  std::optional<std::array<std::size_t, 3>> ultrametric_violation() const;
  bool is_ultrametric() const { return !ultrametric_violation().has_value(); }

  bool same_data(const FiniteMetricSpace& other) const { return data_ == other.data_; }

 private:
  struct Data;
  explicit FiniteMetricSpace(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

// Deterministic bounded integer draw in [0, n), identical on every platform.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n);

struct CounterexampleBlueprint {
  ControlFunction source;
  std::size_t depth = 0;
  std::vector<Rational> a;                      // a_0 .. a_depth
  std::vector<Rational> n;                      // n_1 .. n_depth (n[0] is n_1)
  std::vector<std::vector<Rational>> blocks;    // C_1 .. C_depth as point values
  std::vector<std::vector<std::size_t>> block_indices;  // same blocks as point indices
};

struct CounterexampleOptions {
  std::uint64_t search_cap = 1000000;
};

/// Points of the blocks C_1 .. C_depth on the real line.
std::pair<FiniteMetricSpace, CounterexampleBlueprint> counterexample_space(const ControlFunction& f, std::size_t depth,
                                                                           const CounterexampleOptions& options = {});

struct GridOptions {
  std::size_t max_points = 4096;
};

/// {0..side}^dims with the sup-metric.
FiniteMetricSpace grid_box(std::size_t dims, std::size_t side, const GridOptions& options = {});

struct LOmegaPoint {
  std::string label;
  std::vector<std::string> symbols;  // symbols at indices window_start, window_start + 1, ...
};

/// Distance 3^(-m) for m the first index where two sequences differ.
FiniteMetricSpace lomega_slice(std::int64_t window_start, const std::vector<LOmegaPoint>& points,
                               const std::string& basepoint_symbol = "0");

FiniteMetricSpace perturb_min(const FiniteMetricSpace& x, const Rational& c);
FiniteMetricSpace perturb_max(const FiniteMetricSpace& x, const Rational& c);

/// X × Y with the sup-metric; labels "(a,b)".
FiniteMetricSpace product(const FiniteMetricSpace& x, const FiniteMetricSpace& y, std::size_t max_points = 4096);

struct UltrametricOptions {
  // Multiply each split value 3^k by a random factor in [1, 3) so that
  // distances are not all powers of three.
  bool jitter = false;
};

/// Random hierarchical partition; points first separated at level l (of
/// level_count) are at distance 3^(level_count - 1 - l), times the jitter.
FiniteMetricSpace random_ultrametric(std::uint64_t seed, std::size_t size, std::size_t level_count,
                                     const UltrametricOptions& options = {});

/// Shortest-path metric of a complete graph with integer weights in [1, max_weight].
FiniteMetricSpace random_metric(std::uint64_t seed, std::size_t size, std::uint64_t max_weight = 10);

/// Line format: `metricspace N`, labels, then N matrix rows. Lines starting
/// with '#' are comments; `# provenance: ...` is read back.
FiniteMetricSpace parse_space(std::string_view text);
std::string format_space(const FiniteMetricSpace& x);

}  // namespace scdim
