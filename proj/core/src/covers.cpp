#include "scdim/covers.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "scdim/errors.hpp"

namespace scdim {

namespace {

PointSet normalized(PointSet points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<char> membership(std::size_t n, const PointSet& set) {
  std::vector<char> in(n, 0);
  for (auto p : set) in[p] = 1;
  return in;
}

// Smallest-rank distance from x to a point outside `in`; nullopt when none exists.
std::optional<std::uint32_t> rank_to_complement(const FiniteMetricSpace& x, std::size_t p,
                                                const std::vector<std::size_t>& by_distance,
                                                const std::vector<char>& in) {
  for (auto y : by_distance) {
    if (!in[y]) return x.rank(p, y);
  }
  return std::nullopt;
}

std::vector<std::size_t> points_by_distance(const FiniteMetricSpace& x, std::size_t p) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x.rank(p, a) < x.rank(p, b); });
  return order;
}

// f_U(p) = d(p, X \ U) for every piece, +inf for pieces equal to X.
std::vector<ExtendedRational> complement_distances(const ColoredCover& cover, std::size_t p,
                                                   const std::vector<std::vector<char>>& member) {
  const auto& x = cover.space();
  const auto order = points_by_distance(x, p);
  std::vector<ExtendedRational> out;
  out.reserve(member.size());
  for (const auto& in : member) {
    const auto r = rank_to_complement(x, p, order, in);
    out.push_back(r ? ExtendedRational(x.value_of_rank(*r)) : ExtendedRational::infinity());
  }
  return out;
}

std::vector<std::vector<char>> memberships(const ColoredCover& cover) {
  std::vector<std::vector<char>> out;
  out.reserve(cover.pieces().size());
  for (const auto& piece : cover.pieces()) out.push_back(membership(cover.space().size(), piece.points));
  return out;
}

std::vector<Rational> coordinates_from(const std::vector<ExtendedRational>& f, std::size_t point,
                                       const FiniteMetricSpace& x) {
  std::vector<Rational> coords(f.size(), Rational(0));
  const auto infinite = static_cast<long>(std::count_if(f.begin(), f.end(), [](const auto& v) { return v.is_infinite(); }));
  if (infinite > 0) {
    for (std::size_t u = 0; u < f.size(); ++u) {
      if (f[u].is_infinite()) coords[u] = make_rational(1, infinite);
    }
    return coords;
  }
  Rational sum = 0;
  for (const auto& v : f) sum += v.value();
  if (sgn(sum) == 0) throw DomainError("Lebesgue number is 0 at point " + x.label(point));
  for (std::size_t u = 0; u < f.size(); ++u) coords[u] = f[u].value() / sum;
  return coords;
}

}  // namespace

ColoredCover::ColoredCover(FiniteMetricSpace space, std::size_t color_count, std::vector<CoverPiece> pieces)
    : space_(std::move(space)), color_count_(color_count), pieces_(std::move(pieces)) {
  if (color_count_ == 0) throw InvalidInput("a cover needs at least one color");
  const std::size_t n = space_.size();
  std::vector<char> covered(n, 0);
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    auto& piece = pieces_[k];
    piece.points = normalized(std::move(piece.points));
    if (piece.points.empty()) throw InvalidInput("piece " + std::to_string(k) + " is empty");
    if (piece.color >= color_count_) {
      throw InvalidInput("piece " + std::to_string(k) + " has color " + std::to_string(piece.color) + " outside 0.." +
                         std::to_string(color_count_ - 1));
    }
    if (piece.points.back() >= n) {
      throw InvalidInput("piece " + std::to_string(k) + " refers to point " + std::to_string(piece.points.back()) +
                         " of a " + std::to_string(n) + "-point space");
    }
    for (auto p : piece.points) covered[p] = 1;
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (!covered[p]) throw InvalidInput("point " + space_.label(p) + " is not covered");
  }
}

std::vector<std::size_t> ColoredCover::pieces_of_color(std::size_t color) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (pieces_[k].color == color) out.push_back(k);
  }
  return out;
}

Rational ColoredCover::bound() const {
  Rational b = 0;
  for (const auto& piece : pieces_) b = std::max(b, set_diameter(space_, piece.points));
  return b;
}

ColoredCover cover_from_coloring(const FiniteMetricSpace& x, const std::vector<std::size_t>& colors,
                                 std::size_t color_count, const Rational& s) {
  if (colors.size() != x.size()) throw InvalidInput("coloring length does not match the space size");
  std::vector<PointSet> classes(color_count);
  for (std::size_t p = 0; p < colors.size(); ++p) {
    if (colors[p] >= color_count) throw InvalidInput("color out of range");
    classes[colors[p]].push_back(p);
  }
  std::vector<CoverPiece> pieces;
  for (std::size_t c = 0; c < color_count; ++c) {
    for (auto& comp : s_components(x, classes[c], s)) pieces.push_back({std::move(comp), c});
  }
  return ColoredCover(x, color_count, std::move(pieces));
}

Rational set_diameter(const FiniteMetricSpace& x, const PointSet& a) {
  std::uint32_t best = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) best = std::max(best, x.rank(a[i], a[j]));
  }
  return x.value_of_rank(best);
}

ExtendedRational set_distance(const FiniteMetricSpace& x, const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) return ExtendedRational::infinity();
  std::uint32_t best = x.rank_count();
  for (auto p : a) {
    for (auto q : b) best = std::min(best, x.rank(p, q));
  }
  return ExtendedRational(x.value_of_rank(best));
}

std::vector<PointSet> s_components(const FiniteMetricSpace& x, const PointSet& a, const Rational& s) {
  const PointSet pts = normalized(a);
  for (auto p : pts) {
    if (p >= x.size()) throw InvalidInput("point index " + std::to_string(p) + " out of range");
  }
  const auto t = x.rank_threshold(s);
  DisjointSets sets(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (x.rank(pts[i], pts[j]) < t) sets.join(i, j);
    }
  }
  std::vector<PointSet> out;
  std::vector<std::size_t> slot(pts.size(), SIZE_MAX);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto root = sets.find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = out.size();
      out.emplace_back();
    }
    out[slot[root]].push_back(pts[i]);
  }
  return out;
}

SDisjointness is_s_disjoint(const FiniteMetricSpace& x, const std::vector<PointSet>& pieces, const Rational& s) {
  const auto t = x.rank_threshold(s);
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    for (std::size_t b = a + 1; b < pieces.size(); ++b) {
      const auto d = set_distance(x, pieces[a], pieces[b]);
      if (d.is_finite() && x.rank_threshold(d.value()) <= t) return {false, a, b, d.value()};
    }
  }
  return {};
}

LebesgueNumbers lebesgue(const ColoredCover& cover) {
  const auto member = memberships(cover);
  LebesgueNumbers out;
  out.global = ExtendedRational::infinity();
  for (std::size_t p = 0; p < cover.space().size(); ++p) {
    ExtendedRational best(Rational(0));
    for (const auto& v : complement_distances(cover, p, member)) best = std::max(best, v);
    out.local.push_back(best);
    out.global = std::min(out.global, best);
  }
  return out;
}

Multiplicities multiplicities(const ColoredCover& cover, const Rational& s) {
  if (sgn(s) < 0) throw InvalidInput("multiplicity radius must be nonnegative");
  const auto& x = cover.space();
  const auto t = x.rank_threshold(s);
  Multiplicities out;
  out.local.assign(x.size(), 0);
  for (std::size_t p = 0; p < x.size(); ++p) {
    std::size_t at_point = 0;
    for (const auto& piece : cover.pieces()) {
      if (std::binary_search(piece.points.begin(), piece.points.end(), p)) {
        ++at_point;
        ++out.local[p];
        continue;
      }
      if (std::any_of(piece.points.begin(), piece.points.end(), [&](std::size_t q) { return x.rank(p, q) < t; })) {
        ++out.local[p];
      }
    }
    out.multiplicity = std::max(out.multiplicity, at_point);
    out.s_multiplicity = std::max(out.s_multiplicity, out.local[p]);
  }
  return out;
}

ColoredCover enlarge(const ColoredCover& cover, const Rational& r) {
  if (sgn(r) < 0) throw InvalidInput("enlargement radius must be nonnegative");
  const auto& x = cover.space();
  const auto t = x.rank_threshold(r);
  std::vector<CoverPiece> pieces;
  for (const auto& piece : cover.pieces()) {
    PointSet grown;
    for (std::size_t y = 0; y < x.size(); ++y) {
      if (std::any_of(piece.points.begin(), piece.points.end(), [&](std::size_t u) { return x.rank(u, y) < t; })) {
        grown.push_back(y);
      }
    }
    pieces.push_back({std::move(grown), piece.color});
  }
  return ColoredCover(x, cover.color_count(), std::move(pieces));
}

std::vector<Rational> nerve_coordinates(const ColoredCover& cover, std::size_t x) {
  if (x >= cover.space().size()) throw InvalidInput("point index out of range");
  return coordinates_from(complement_distances(cover, x, memberships(cover)), x, cover.space());
}

Rational lipschitz_estimate(const ColoredCover& cover) {
  const auto& x = cover.space();
  const auto member = memberships(cover);
  std::vector<std::vector<Rational>> coords;
  coords.reserve(x.size());
  for (std::size_t p = 0; p < x.size(); ++p) coords.push_back(coordinates_from(complement_distances(cover, p, member), p, x));
  Rational best = 0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    for (std::size_t q = p + 1; q < x.size(); ++q) {
      Rational l1 = 0;
      for (std::size_t u = 0; u < coords[p].size(); ++u) l1 += abs(coords[p][u] - coords[q][u]);
      best = std::max(best, Rational(l1 / x.distance(p, q)));
    }
  }
  return best;
}

bool CoverReport::all_disjoint() const {
  return std::all_of(per_color.begin(), per_color.end(), [](const SDisjointness& d) { return d.holds; });
}

CoverReport report(const ColoredCover& cover, const Rational& s) {
  CoverReport r;
  for (std::size_t c = 0; c < cover.color_count(); ++c) {
    const auto ids = cover.pieces_of_color(c);
    std::vector<PointSet> sets;
    for (auto k : ids) sets.push_back(cover.pieces()[k].points);
    auto verdict = is_s_disjoint(cover.space(), sets, s);
    if (!verdict.holds) {
      verdict.first = ids[verdict.first];
      verdict.second = ids[verdict.second];
    }
    r.per_color.push_back(std::move(verdict));
  }
  r.piece_count = cover.pieces().size();
  r.bound = cover.bound();
  r.lebesgue = lebesgue(cover).global;
  const auto m = multiplicities(cover, s);
  r.multiplicity = m.multiplicity;
  r.s = s;
  r.s_multiplicity = m.s_multiplicity;
  return r;
}

std::string report_text(const CoverReport& r) {
  std::ostringstream out;
  out << "colors: " << r.per_color.size() << "\n";
  out << "pieces: " << r.piece_count << "\n";
  out << "s: " << to_string(r.s) << "\n";
  out << "bound: " << to_string(r.bound) << "\n";
  out << "lebesgue: " << to_string(r.lebesgue) << "\n";
  out << "multiplicity: " << r.multiplicity << "\n";
  out << "s_multiplicity: " << r.s_multiplicity << "\n";
  for (std::size_t c = 0; c < r.per_color.size(); ++c) {
    const auto& d = r.per_color[c];
    out << "color " << c << " s_disjoint: ";
    if (d.holds) {
      out << "yes\n";
    } else {
      out << "no (pieces " << d.first << " and " << d.second << " at distance " << to_string(d.distance) << ")\n";
    }
  }
  return out.str();
}

std::string report_csv(const CoverReport& r) {
  std::ostringstream out;
  out << "color,s,s_disjoint,first_piece,second_piece,distance,bound,lebesgue,multiplicity,s_multiplicity\n";
  for (std::size_t c = 0; c < r.per_color.size(); ++c) {
    const auto& d = r.per_color[c];
    out << c << "," << to_string(r.s) << "," << (d.holds ? "yes" : "no") << ",";
    if (d.holds) {
      out << ",,";
    } else {
      out << d.first << "," << d.second << "," << to_string(d.distance);
    }
    out << "," << to_string(r.bound) << "," << to_string(r.lebesgue) << "," << r.multiplicity << ","
        << r.s_multiplicity << "\n";
  }
  return out.str();
}

CoverFile parse_cover_file(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  CoverFile out;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = "cover line " + std::to_string(line_no) + ": ";
    std::istringstream tokens(line);
    if (!header) {
      std::string kw, count;
      if (!(tokens >> kw >> out.space_path >> count) || kw != "cover") {
        throw InvalidInput(where + "expected 'cover <space-file> <colors>'");
      }
      try {
        out.color_count = std::stoul(count);
      } catch (const std::exception&) {
        throw InvalidInput(where + "bad color count '" + count + "'");
      }
      header = true;
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw InvalidInput(where + "expected 'color: idx idx ...'");
    CoverPiece piece;
    try {
      piece.color = std::stoul(line.substr(0, colon));
      std::istringstream idx(line.substr(colon + 1));
      std::string t;
      while (idx >> t) {
        std::size_t used = 0;
        piece.points.push_back(std::stoul(t, &used));
        if (used != t.size()) throw std::invalid_argument(t);
      }
    } catch (const std::exception&) {
      throw InvalidInput(where + "bad piece line");
    }
    out.pieces.push_back(std::move(piece));
  }
  if (!header) throw InvalidInput("cover file lacks the 'cover' header");
  return out;
}

std::string format_cover(const ColoredCover& cover, std::string_view space_path) {
  std::string out = "cover " + std::string(space_path) + " " + std::to_string(cover.color_count()) + "\n";
  for (const auto& piece : cover.pieces()) {
    out += std::to_string(piece.color) + ":";
    for (auto p : piece.points) out += " " + std::to_string(p);
    out += "\n";
  }
  return out;
}

}  // namespace scdim
