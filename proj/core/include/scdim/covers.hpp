#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scdim/metricspace.hpp"
#include "scdim/rational.hpp"

namespace scdim {

using PointSet = std::vector<std::size_t>;  // sorted, duplicate-free point indices

struct CoverPiece {
  PointSet points;
  std::size_t color = 0;
};

// Pieces with colors 0 .. color_count-1 covering every point of the space.
class ColoredCover {
 public:
  ColoredCover(FiniteMetricSpace space, std::size_t color_count, std::vector<CoverPiece> pieces);

  const FiniteMetricSpace& space() const { return space_; }
  std::size_t color_count() const { return color_count_; }
  const std::vector<CoverPiece>& pieces() const { return pieces_; }
  /// Indices into pieces() of the given color.
  std::vector<std::size_t> pieces_of_color(std::size_t color) const;
  /// Largest piece diameter.
  Rational bound() const;

 private:
  FiniteMetricSpace space_;
  std::size_t color_count_;
  std::vector<CoverPiece> pieces_;
};

/// The color classes of `colors` split into their s-components.
ColoredCover cover_from_coloring(const FiniteMetricSpace& x, const std::vector<std::size_t>& colors,
                                 std::size_t color_count, const Rational& s);

Rational set_diameter(const FiniteMetricSpace& x, const PointSet& a);
/// min d(a, b); +inf when either set is empty.
ExtendedRational set_distance(const FiniteMetricSpace& x, const PointSet& a, const PointSet& b);

/// Classes of the chain relation "consecutive distances <= s" inside A,
/// ordered by smallest member.
std::vector<PointSet> s_components(const FiniteMetricSpace& x, const PointSet& a, const Rational& s);

struct SDisjointness {
  bool holds = true;
  // Offending pair (indices into the piece list that was checked) and their distance.
  std::size_t first = 0, second = 0;
  Rational distance;
};

/// Every two distinct pieces are at distance > s.
SDisjointness is_s_disjoint(const FiniteMetricSpace& x, const std::vector<PointSet>& pieces, const Rational& s);

struct LebesgueNumbers {
  std::vector<ExtendedRational> local;  // per point
  ExtendedRational global;              // min over points
};

/// L_x = max over pieces U of d(x, X \ U), with d(x, {}) = +inf.
LebesgueNumbers lebesgue(const ColoredCover& cover);

struct Multiplicities {
  std::size_t multiplicity = 0;     // s = 0
  std::size_t s_multiplicity = 0;   // max of local
  std::vector<std::size_t> local;   // pieces meeting the closed ball B(x, s)
};

Multiplicities multiplicities(const ColoredCover& cover, const Rational& s);

/// Each piece replaced by its closed r-neighborhood.
ColoredCover enlarge(const ColoredCover& cover, const Rational& r);

/// Barycentric coordinates f_U(x) / sum_V f_V(x) with f_U(x) = d(x, X \ U).
/// Pieces equal to the whole space share the weight equally.
std::vector<Rational> nerve_coordinates(const ColoredCover& cover, std::size_t x);

/// Max over point pairs of the l1 distance of coordinates divided by d(x, y).
Rational lipschitz_estimate(const ColoredCover& cover);

struct CoverReport {
  std::vector<SDisjointness> per_color;  // witnesses index cover.pieces()
  std::size_t piece_count = 0;
  Rational bound;
  ExtendedRational lebesgue;
  std::size_t multiplicity = 0;
  Rational s;
  std::size_t s_multiplicity = 0;

  bool all_disjoint() const;
};

CoverReport report(const ColoredCover& cover, const Rational& s);
std::string report_text(const CoverReport& r);  // key: value lines
std::string report_csv(const CoverReport& r);   // header plus one row per color

/// Header `cover <space-file> <n+1>`, then `color: idx idx ...` per piece.
struct CoverFile {
  std::string space_path;
  std::size_t color_count = 0;
  std::vector<CoverPiece> pieces;
};
CoverFile parse_cover_file(std::string_view text);
std::string format_cover(const ColoredCover& cover, std::string_view space_path);

}  // namespace scdim
