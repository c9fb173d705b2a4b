#include "scdim/coarsemaps.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

#include "scdim/errors.hpp"

namespace scdim {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Exact solver within the cap, heuristic above it.
DnSolution solve_dn(const FiniteMetricSpace& x, std::size_t n, const Rational& s, const SolveOptions& options) {
  if (x.size() <= std::min<std::size_t>(options.exact_cap, 64)) return exact_dn(x, n, s, options);
  return heuristic_dn(x, n, s, options);
}

}  // namespace

PointMap::PointMap(FiniteMetricSpace source, FiniteMetricSpace target, std::vector<std::size_t> image)
    : source_(std::move(source)), target_(std::move(target)), image_(std::move(image)) {
  if (image_.size() != source_.size()) {
    throw InvalidInput("map assigns " + std::to_string(image_.size()) + " images to " +
                       std::to_string(source_.size()) + " source points");
  }
  for (std::size_t i = 0; i < image_.size(); ++i) {
    if (image_[i] >= target_.size()) {
      throw InvalidInput("image of " + source_.label(i) + " is outside the target");
    }
  }
}

PointMap PointMap::from_labels(FiniteMetricSpace source, FiniteMetricSpace target,
                               const std::vector<std::pair<std::string, std::string>>& pairs) {
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> image(source.size(), unset);
  for (const auto& [from, to] : pairs) {
    auto i = source.index_of(from);
    if (!i) throw InvalidInput("unknown source label '" + from + "'");
    auto j = target.index_of(to);
    if (!j) throw InvalidInput("unknown target label '" + to + "'");
    if (image[*i] != unset) throw InvalidInput("source label '" + from + "' is mapped twice");
    image[*i] = *j;
  }
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image[i] == unset) throw InvalidInput("source label '" + source.label(i) + "' has no image");
  }
  return PointMap(std::move(source), std::move(target), std::move(image));
}

PointMap PointMap::identity(const FiniteMetricSpace& x) {
  std::vector<std::size_t> image(x.size());
  std::iota(image.begin(), image.end(), std::size_t{0});
  return PointMap(x, x, std::move(image));
}

const Rational& PointMap::image_distance(std::size_t x, std::size_t y) const {
  return target_.distance(image_[x], image_[y]);
}

PointSet PointMap::preimage(const PointSet& target_points) const {
  std::vector<char> in(target_.size(), 0);
  for (auto p : target_points) in.at(p) = 1;
  PointSet out;
  for (std::size_t i = 0; i < image_.size(); ++i) {
    if (in[image_[i]]) out.push_back(i);
  }
  return out;
}

MapFile parse_map_file(std::string_view text) {
  MapFile out;
  bool header = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header) {
      std::istringstream h(t);
      std::string word, extra;
      if (!(h >> word >> out.source_path >> out.target_path) || word != "map" || (h >> extra)) {
        throw InvalidInput("line " + std::to_string(line_no) + ": expected 'map <source-file> <target-file>'");
      }
      header = true;
      continue;
    }
    auto arrow = t.find("->");
    if (arrow == std::string::npos) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected 'source -> target'");
    }
    std::string from = trim(std::string_view(t).substr(0, arrow));
    std::string to = trim(std::string_view(t).substr(arrow + 2));
    if (from.empty() || to.empty()) {
      throw InvalidInput("line " + std::to_string(line_no) + ": empty label");
    }
    out.pairs.emplace_back(std::move(from), std::move(to));
  }
  if (!header) throw InvalidInput("missing 'map' header");
  return out;
}

std::string format_map(const PointMap& map, std::string_view source_path, std::string_view target_path) {
  std::string out = "map " + std::string(source_path) + " " + std::string(target_path) + "\n";
  for (std::size_t i = 0; i < map.source().size(); ++i) {
    out += map.source().label(i) + " -> " + map.target().label(map(i)) + "\n";
  }
  return out;
}

std::string EmbeddingFailure::describe(const PointMap& map) const {
  const std::string pair = "(" + map.source().label(x) + ", " + map.source().label(y) + ")";
  if (side == Side::lower) {
    return "lower inequality fails at " + pair + ": rho_-(" + to_string(source_distance) + ") = " +
           to_string(bound) + " > " + to_string(image_distance);
  }
  return "upper inequality fails at " + pair + ": " + to_string(image_distance) + " > rho_+(" +
         to_string(source_distance) + ") = " + to_string(bound);
}

EmbeddingWitness verify_embedding(const PointMap& map, const ControlFunction& rho_minus,
                                  const ControlFunction& rho_plus) {
  EmbeddingWitness w{rho_minus, rho_plus, false, std::nullopt};
  const auto& x = map.source();
  // Each function is evaluated once per distinct distance.
  std::vector<std::optional<Rational>> lower(x.rank_count()), upper(x.rank_count());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const auto r = x.rank(i, j);
      if (!lower[r]) lower[r] = rho_minus.evaluate(x.value_of_rank(r));
      if (!upper[r]) upper[r] = rho_plus.evaluate(x.value_of_rank(r));
      const Rational& dy = map.image_distance(i, j);
      if (*lower[r] > dy) {
        w.failure = EmbeddingFailure{EmbeddingFailure::Side::lower, i, j, x.value_of_rank(r), dy, *lower[r]};
        return w;
      }
      if (dy > *upper[r]) {
        w.failure = EmbeddingFailure{EmbeddingFailure::Side::upper, i, j, x.value_of_rank(r), dy, *upper[r]};
        return w;
      }
    }
  }
  w.verified = true;
  return w;
}

Rational empirical_dilatation(const PointMap& map, const Rational& s) {
  const auto& x = map.source();
  const auto t = x.rank_threshold(s);
  Rational best = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (x.rank(i, j) < t) best = std::max(best, map.image_distance(i, j));
    }
  }
  return best;
}

Pullback pullback_cover(const PointMap& map, const ColoredCover& target_cover, const PullbackOptions& options) {
  if (target_cover.space().size() != map.target().size()) {
    throw InvalidInput("cover does not live on the target of the map");
  }
  std::vector<CoverPiece> pieces;
  for (const auto& piece : target_cover.pieces()) {
    PointSet pre = map.preimage(piece.points);
    if (!pre.empty()) pieces.push_back({std::move(pre), piece.color});
  }
  ColoredCover cover(map.source(), target_cover.color_count(), std::move(pieces));

  PullbackReport r;
  r.source_multiplicity = multiplicities(cover, 0).multiplicity;
  r.target_multiplicity = multiplicities(target_cover, 0).multiplicity;
  r.multiplicity_ok = r.source_multiplicity <= r.target_multiplicity;

  const bool verified = options.witness && options.witness->verified;
  if (!verified) {
    r.note = "no verified witness; only multiplicity checked";
    return {std::move(cover), std::move(r)};
  }
  const auto& w = *options.witness;

  if (options.lebesgue_target) {
    r.t = *options.lebesgue_target;
    try {
      r.required_target_lebesgue = w.rho_plus.evaluate(r.t);
      r.lebesgue_checked = true;
    } catch (const DomainError&) {
      r.note = "t outside the domain of rho_+; Lebesgue transfer not checked";
    }
    if (r.lebesgue_checked) {
      r.target_lebesgue = lebesgue(target_cover).global;
      r.source_lebesgue = lebesgue(cover).global;
      r.lebesgue_premise = r.target_lebesgue >= ExtendedRational(r.required_target_lebesgue);
      r.lebesgue_ok = !r.lebesgue_premise || r.source_lebesgue >= ExtendedRational(r.t);
    }
  }

  r.target_bound = target_cover.bound();
  r.source_bound = cover.bound();
  if (w.rho_minus.function_class() == FunctionClass::opaque) {
    if (!r.note.empty()) r.note += "; ";
    r.note += "rho_- is opaque; bound transfer not certified";
    return {std::move(cover), std::move(r)};
  }
  r.bound_checked = true;
  r.inverse_bound = w.rho_minus.preimage_lower(r.target_bound);
  // diam V <= sup{x : rho_-(x) <= B} is equivalent to rho_-(diam V) <= B.
  r.bound_ok = sgn(r.source_bound) == 0 || w.rho_minus.evaluate(r.source_bound) <= r.target_bound;
  return {std::move(cover), std::move(r)};
}

std::pair<FiniteMetricSpace, UltrametricReport> ultrametrize(const FiniteMetricSpace& x) {
  const std::size_t n = x.size();
  std::vector<std::pair<std::uint32_t, std::pair<std::size_t, std::size_t>>> edges;
  edges.reserve(n * (n - (n > 0)) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({x.rank(i, j), {i, j}});
  }
  std::sort(edges.begin(), edges.end());

  // Kruskal merges; every cross pair of a merge gets the merging rank.
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<std::size_t> root(n);
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {i};
    root[i] = i;
  }
  std::vector<std::uint32_t> ranks(n * n, 0);
  for (const auto& [rank, e] : edges) {
    std::size_t a = root[e.first], b = root[e.second];
    if (a == b) continue;
    if (members[a].size() < members[b].size()) std::swap(a, b);
    for (auto p : members[a]) {
      for (auto q : members[b]) ranks[p * n + q] = ranks[q * n + p] = rank;
    }
    for (auto q : members[b]) root[q] = a;
    members[a].insert(members[a].end(), members[b].begin(), members[b].end());
    members[b].clear();
  }

  // Keep only the values that occur.
  std::vector<char> used(x.rank_count(), 0);
  used[0] = 1;
  for (auto r : ranks) used[r] = 1;
  std::vector<std::uint32_t> remap(x.rank_count(), 0);
  std::vector<Rational> values;
  for (std::uint32_t r = 0; r < x.rank_count(); ++r) {
    if (used[r]) {
      remap[r] = static_cast<std::uint32_t>(values.size());
      values.push_back(x.value_of_rank(r));
    }
  }
  for (auto& r : ranks) r = remap[r];
  auto du = FiniteMetricSpace::from_ranks(x.labels(), values, std::move(ranks), {}, false);

  UltrametricReport report;
  report.ultrametric = du.is_ultrametric();
  std::map<std::uint32_t, Rational> d0;
  for (std::size_t i = 0; i < n && !report.first_violation; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Rational& u = du.distance(i, j);
      const Rational& d = x.distance(i, j);
      if (u > d) report.below = false;
      auto it = d0.find(du.rank(i, j));
      if (it == d0.end()) it = d0.emplace(du.rank(i, j), d0_bound(x, u)).first;
      if (d > it->second) report.controlled = false;
      if (!report.below || !report.controlled) {
        report.first_violation = std::pair{i, j};
        break;
      }
    }
  }
  return {std::move(du), std::move(report)};
}

LOmegaEmbedding embed_lomega(const FiniteMetricSpace& x) {
  if (auto v = x.ultrametric_violation()) {
    throw InvalidInput("not an ultrametric: d(" + x.label((*v)[0]) + ", " + x.label((*v)[2]) + ") exceeds the max over " +
                       x.label((*v)[1]));
  }
  const std::size_t n = x.size();
  // Exponent of the snapped distance for every rank.
  std::vector<std::int64_t> expo(x.rank_count(), 0);
  std::int64_t e_min = 0, e_max = 0;
  for (std::uint32_t r = 1; r < x.rank_count(); ++r) {
    expo[r] = ceil_log3(x.value_of_rank(r));
    if (r == 1) e_min = e_max = expo[r];
    e_min = std::min(e_min, expo[r]);
    e_max = std::max(e_max, expo[r]);
  }
  std::vector<LOmegaPoint> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i].label = x.label(i);

  std::int64_t window_start = 0;
  if (x.rank_count() <= 1) {
    for (auto& p : points) p.symbols = {"0"};
  } else {
    window_start = -e_max;
    for (std::int64_t m = e_max; m >= e_min; --m) {
      // Classes of d < 3^m, numbered by first member.
      std::vector<std::size_t> cls(n, n);
      std::size_t next = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (cls[i] != n) continue;
        cls[i] = next;
        for (std::size_t j = i + 1; j < n; ++j) {
          if (cls[j] == n && expo[x.rank(i, j)] < m) cls[j] = next;
        }
        ++next;
      }
      for (std::size_t i = 0; i < n; ++i) points[i].symbols.push_back(std::to_string(cls[i]));
    }
  }
  auto target = lomega_slice(window_start, points);
  std::vector<std::size_t> image(n);
  std::iota(image.begin(), image.end(), std::size_t{0});
  LOmegaEmbedding out{PointMap(x, target, std::move(image)), window_start, 1, 1, false};

  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational ratio = out.map.image_distance(i, j) / x.distance(i, j);
      if (first || ratio < out.c1) out.c1 = ratio;
      if (first || ratio > out.c2) out.c2 = ratio;
      first = false;
    }
  }
  bool holds = true;
  for (std::size_t i = 0; i < n && holds; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Rational& d = x.distance(i, j);
      const Rational& dl = out.map.image_distance(i, j);
      if (out.c1 * d > dl || dl > out.c2 * d) {
        holds = false;
        break;
      }
    }
  }
  out.certified = holds && out.c2 <= 3 * out.c1;
  return out;
}

std::vector<PointSet> maximal_cliques(const std::vector<std::vector<char>>& adjacency, std::size_t cap) {
  const std::size_t n = adjacency.size();
  std::vector<PointSet> out;
  PointSet current;
  auto expand = [&](auto&& self, std::vector<std::size_t> p, std::vector<std::size_t> x) -> void {
    if (p.empty()) {
      if (x.empty()) {
        if (out.size() >= cap) throw CapExceeded("more than " + std::to_string(cap) + " maximal cliques");
        PointSet c = current;
        std::sort(c.begin(), c.end());
        out.push_back(std::move(c));
      }
      return;
    }
    // Pivot with the most neighbours in P.
    std::size_t pivot = p.front(), best = 0;
    for (const auto* set : {&p, &x}) {
      for (auto u : *set) {
        std::size_t count = 0;
        for (auto v : p) count += adjacency[u][v] != 0;
        if (count > best) {
          best = count;
          pivot = u;
        }
      }
    }
    std::vector<std::size_t> candidates;
    for (auto v : p) {
      if (!adjacency[pivot][v]) candidates.push_back(v);
    }
    for (auto v : candidates) {
      std::vector<std::size_t> np, nx;
      for (auto u : p) {
        if (u != v && adjacency[v][u]) np.push_back(u);
      }
      for (auto u : x) {
        if (adjacency[v][u]) nx.push_back(u);
      }
      current.push_back(v);
      self(self, std::move(np), std::move(nx));
      current.pop_back();
      p.erase(std::find(p.begin(), p.end(), v));
      x.push_back(v);
    }
  };
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (n > 0) expand(expand, std::move(all), {});
  std::sort(out.begin(), out.end());
  return out;
}

MapControlSample map_dim_control(const PointMap& map, std::size_t m, const Rational& r, const Rational& big_r,
                                 const MapControlOptions& options) {
  if (sgn(r) < 0 || sgn(big_r) < 0) throw DomainError("scales must be nonnegative");
  const auto& x = map.source();
  const std::size_t n = x.size();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) adj[i][j] = i != j && map.image_distance(i, j) <= big_r;
  }
  MapControlSample out;
  out.m = m;
  out.r = r;
  out.big_r = big_r;
  for (auto& clique : maximal_cliques(adj, options.clique_cap)) {
    auto sol = exact_dn(x.subspace(clique), m, r, options.solve);
    if (out.subsets.empty() || sol.bound > out.value) {
      out.value = sol.bound;
      out.worst = out.subsets.size();
    }
    out.subsets.push_back({std::move(clique), sol.bound, std::move(sol.colors)});
  }
  return out;
}

TwoArgumentControl::TwoArgumentControl(ControlFunction dk) : dk_(std::move(dk)) {}

TwoArgumentControl exact_sequence_control(const ControlFunction& dk) {
  if (dk.scale() != Scale::large) throw ScaleMismatch("the kernel control function must be large-scale");
  return TwoArgumentControl(dk);
}

Rational TwoArgumentControl::evaluate(const Rational& r, const Rational& big_r) const {
  if (sgn(r) < 0 || sgn(big_r) < 0) throw DomainError("arguments must be nonnegative");
  return dk_.evaluate(r + 2 * big_r) + 2 * big_r;
}

ControlFunction TwoArgumentControl::slice(const Rational& big_r) const {
  if (sgn(big_r) < 0) throw DomainError("R must be nonnegative");
  const Rational shift = 2 * big_r;
  Rational lo = dk_.domain_start() - shift;
  if (sgn(lo) < 0) lo = 0;
  auto pre = ControlFunction::piecewise({Piece{lo, ExtendedRational::infinity(), 1, 1, shift}}, dk_.scale());
  auto post = ControlFunction::piecewise({Piece{0, ExtendedRational::infinity(), 1, 1, shift}}, dk_.scale());
  return compose(post, compose(dk_, pre));
}

std::optional<std::string> TwoArgumentControl::polynomial_form() const {
  if (!dk_.is_piecewise() || dk_.pieces().size() != 1) return std::nullopt;
  const Piece& piece = dk_.pieces().front();
  if (sgn(piece.lo) != 0 || piece.hi.is_finite() || piece.p > 64) return std::nullopt;

  // a * (r + 2R)^p + b + 2R as coefficients of r^i R^j.
  std::map<std::pair<std::uint64_t, std::uint64_t>, Rational> terms;
  const std::uint64_t p = piece.is_constant() ? 0 : piece.p;
  Rational binom = 1;
  for (std::uint64_t i = 0; i <= p; ++i) {
    if (i > 0) binom = binom * Rational(static_cast<long>(p - i + 1)) / Rational(static_cast<long>(i));
    // C(p, i) r^(p-i) (2R)^i
    terms[{p - i, i}] += piece.a * binom * pow(Rational(2), i);
  }
  terms[{0, 0}] += piece.b;
  terms[{0, 1}] += 2;

  std::vector<std::pair<std::pair<std::uint64_t, std::uint64_t>, Rational>> ordered(terms.begin(), terms.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    const auto da = a.first.first + a.first.second, db = b.first.first + b.first.second;
    if (da != db) return da > db;
    return a.first.first > b.first.first;
  });
  auto power = [](const char* v, std::uint64_t e) {
    return e == 1 ? std::string(v) : std::string(v) + "^" + std::to_string(e);
  };
  std::string out;
  for (const auto& [key, c] : ordered) {
    if (sgn(c) == 0) continue;
    const auto [i, j] = key;
    Rational mag = abs(c);
    std::string body;
    if (i > 0) body = power("r", i);
    if (j > 0) body += (body.empty() ? "" : "*") + power("R", j);
    std::string term;
    if (body.empty()) {
      term = scdim::to_string(mag);
    } else if (mag == 1) {
      term = body;
    } else {
      term = scdim::to_string(mag) + "*" + body;
    }
    if (out.empty()) {
      out = (sgn(c) < 0 ? "-" : "") + term;
    } else {
      out += (sgn(c) < 0 ? " - " : " + ") + term;
    }
  }
  return out.empty() ? "0" : out;
}

std::string TwoArgumentControl::to_string() const {
  if (auto form = polynomial_form()) return *form;
  return "D(r + 2*R) + 2*R with D = " + dk_.to_string();
}

namespace {

struct Assembly {
  Rational dilatation;
  DnSolution target;
  Rational fiber_bound;
  bool fibers_exact = true;
  std::vector<std::size_t> colors;
};

Assembly assemble(const PointMap& map, std::size_t m, std::size_t n, const Rational& s, const SolveOptions& options) {
  Assembly a{empirical_dilatation(map, s), solve_dn(map.target(), n, empirical_dilatation(map, s), options), 0, true,
             std::vector<std::size_t>(map.source().size(), 0)};
  const auto& x = map.source();
  for (const auto& piece : a.target.cover.pieces()) {
    PointSet fiber = map.preimage(piece.points);
    if (fiber.empty()) continue;
    auto sol = solve_dn(x.subspace(fiber), m, s, options);
    a.fibers_exact = a.fibers_exact && sol.method == SolveMethod::exact;
    a.fiber_bound = std::max(a.fiber_bound, sol.bound);
    for (std::size_t k = 0; k < fiber.size(); ++k) a.colors[fiber[k]] = sol.colors[k] * (n + 1) + piece.color;
  }
  return a;
}

}  // namespace

ColoredCover hurewicz_assembly(const PointMap& map, std::size_t m, std::size_t n, const Rational& s,
                               const SolveOptions& options) {
  auto a = assemble(map, m, n, s, options);
  return cover_from_coloring(map.source(), a.colors, (m + 1) * (n + 1), s);
}

bool HurewiczReport::ok() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const HurewiczRow& r) { return r.assembled_valid && r.exact_le_assembled; });
}

HurewiczReport hurewicz_check(const PointMap& map, std::size_t m, std::size_t n, const std::vector<Rational>& scales,
                              const SolveOptions& options) {
  HurewiczReport out;
  out.m = m;
  out.n = n;
  const auto& x = map.source();
  for (const auto& s : scales) {
    if (sgn(s) < 0) throw DomainError("scales must be nonnegative");
    auto a = assemble(map, m, n, s, options);
    auto cover = cover_from_coloring(x, a.colors, (m + 1) * (n + 1), s);
    auto rep = report(cover, s);
    HurewiczRow row;
    row.s = s;
    row.dilatation = a.dilatation;
    row.target_bound = a.target.bound;
    row.target_method = a.target.method;
    row.fiber_bound = a.fiber_bound;
    row.fibers_exact = a.fibers_exact;
    row.assembled_bound = cover.bound();
    row.assembled_valid = rep.all_disjoint();
    // Throws CapExceeded when X is beyond the exact solver.
    row.exact_bound = exact_dn(x, m + n, s, options).bound;
    row.exact_le_assembled = *row.exact_bound <= row.assembled_bound;
    if (!a.fibers_exact || a.target.method != SolveMethod::exact) row.status = "heuristic_parts";
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace scdim
