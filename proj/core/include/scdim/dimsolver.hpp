#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scdim/covers.hpp"
#include "scdim/funcalg.hpp"
#include "scdim/metricspace.hpp"

namespace scdim {

struct SolveOptions {
  std::size_t exact_cap = 24;            // largest space handed to the exact solver (at most 64)
  std::uint64_t node_budget = 200000000;  // branch-and-bound nodes per exact solve
  std::uint64_t seed = 0;                 // heuristic restarts
  std::size_t restarts = 4;

  /// Defaults with `exact_cap` taken from SCDIM_EXACT_CAP when set.
  static SolveOptions from_environment();
};

enum class SolveMethod { exact, heuristic };
std::string to_string(SolveMethod method);

struct DnSolution {
  Rational bound;
  std::vector<std::size_t> colors;  // color of every point
  ColoredCover cover;               // per-color s-components of `colors`
  SolveMethod method = SolveMethod::exact;
  std::uint64_t nodes = 0;
};

/// Largest diameter of an s-component of X; the exact one-color optimum.
Rational d0_bound(const FiniteMetricSpace& x, const Rational& s);

/// Minimum over colorings with n+1 colors of the largest s-component
/// diameter, with the lexicographically smallest optimal coloring.
/// Throws CapExceeded above options.exact_cap points or when the node budget runs out.
DnSolution exact_dn(const FiniteMetricSpace& x, std::size_t n, const Rational& s, const SolveOptions& options = {});

/// Upper bound from greedy placement with local search, plus brick colorings
/// for grid boxes recognized by their provenance.
DnSolution heuristic_dn(const FiniteMetricSpace& x, std::size_t n, const Rational& s, const SolveOptions& options = {});

/// Largest s-component diameter of a given coloring.
Rational coloring_bound(const FiniteMetricSpace& x, const std::vector<std::size_t>& colors, std::size_t color_count,
                        const Rational& s);

struct ProfileSample {
  Rational s;
  Rational bound;
  SolveMethod method = SolveMethod::exact;
  std::string status = "ok";  // "ok", or why the exact solver was not used
  std::optional<ColoredCover> cover;
};

struct DimensionProfile {
  std::string provenance;
  std::size_t color_count = 1;  // n + 1
  std::string grid;             // "auto" or "list"
  std::vector<ProfileSample> samples;
};

/// Distinct positive distances of X.
std::vector<Rational> auto_scales(const FiniteMetricSpace& x);

/// Exact samples up to the cap, heuristic beyond it. Throws std::logic_error
/// if exact samples are not non-decreasing in s.
DimensionProfile profile(const FiniteMetricSpace& x, std::size_t n, const std::vector<Rational>& scales,
                         const SolveOptions& options = {}, bool keep_covers = false);

/// Columns `s,n,bound,method,status`; lines starting with '#' are comments.
std::string format_profile_csv(const DimensionProfile& p);
DimensionProfile parse_profile_csv(std::string_view text);

struct GrowthVerdict {
  enum class Kind { linear, power, dominated, not_dominated, unknown };
  Kind kind = Kind::unknown;
  Rational constant;                  // C of Linear(C), coefficient of Power
  double exponent = 0;                // p of Power(p)
  std::string class_description;     // tested class for dominated / not_dominated
  std::vector<Rational> evidence;     // witness scales
  std::size_t tail_start = 0;         // index of the first tail sample
  std::string to_string() const;
};

struct ClassifyOptions {
  Rational linear_cap = 64;          // largest C of the geometric grid 1, 2, 4, ...
  double power_tolerance = 0.05;     // allowed spread of successive log-log slopes
  std::optional<std::size_t> tail_size;  // default: half of the samples, at least 3
};

GrowthVerdict classify_linear(const DimensionProfile& p, const ClassifyOptions& options = {});
GrowthVerdict classify_power(const DimensionProfile& p, const ClassifyOptions& options = {});
/// Dominated when D(s) <= g(s) at every tail sample.
GrowthVerdict classify_against(const DimensionProfile& p, const ControlFunction& g, const ClassifyOptions& options = {});

struct UnionRow {
  Rational s;
  Rational a, b, x;
  bool monotone = true;  // max(a, b) <= x
  bool exact = true;     // all three samples exact
  Rational gap;          // x - max(a, b)
};

struct UnionReport {
  std::vector<UnionRow> rows;
  bool holds() const;
};

/// Profiles of A, B and A ∪ B = X at the same scales.
UnionReport verify_union_max(const FiniteMetricSpace& x, const PointSet& a, const PointSet& b, std::size_t n,
                             const std::vector<Rational>& scales, const SolveOptions& options = {});

}  // namespace scdim
