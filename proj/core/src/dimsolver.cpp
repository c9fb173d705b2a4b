#include "scdim/dimsolver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "scdim/errors.hpp"

namespace scdim {

namespace {

constexpr std::size_t kMaskBits = 64;
constexpr std::size_t kLocalSearchUpTo = 128;
constexpr int kLocalSearchPasses = 10;
constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

std::vector<std::size_t> farthest_point_order(const FiniteMetricSpace& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order;
  if (n == 0) return order;
  std::vector<std::uint32_t> nearest(n, UINT32_MAX);
  std::vector<char> taken(n, 0);
  std::size_t next = 0;
  for (std::size_t step = 0; step < n; ++step) {
    order.push_back(next);
    taken[next] = 1;
    std::size_t best = kUnassigned;
    for (std::size_t q = 0; q < n; ++q) {
      if (taken[q]) continue;
      nearest[q] = std::min(nearest[q], x.rank(next, q));
      if (best == kUnassigned || nearest[q] > nearest[best]) best = q;
    }
    next = best;
  }
  return order;
}

// Rank of the largest s-component diameter of a coloring, and how many
// points lie in components attaining it.
struct CostRank {
  std::uint32_t worst = 0;
  std::size_t weight = 0;
  bool operator<(const CostRank& o) const { return worst != o.worst ? worst < o.worst : weight < o.weight; }
};

CostRank coloring_cost(const FiniteMetricSpace& x, const std::vector<std::size_t>& colors, std::uint32_t t) {
  const std::size_t n = x.size();
  std::vector<char> seen(n, 0);
  CostRank cost;
  std::vector<std::size_t> comp;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    comp.assign(1, start);
    seen[start] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      const std::size_t p = comp[head];
      for (std::size_t q = 0; q < n; ++q) {
        if (!seen[q] && colors[q] == colors[start] && x.rank(p, q) < t) {
          seen[q] = 1;
          comp.push_back(q);
        }
      }
    }
    std::uint32_t d = 0;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (std::size_t j = i + 1; j < comp.size(); ++j) d = std::max(d, x.rank(comp[i], comp[j]));
    }
    if (d > cost.worst) {
      cost = {d, comp.size()};
    } else if (d == cost.worst) {
      cost.weight += comp.size();
    }
  }
  return cost;
}

// Diameter rank of p's component if p joined class c.
std::uint32_t joined_diameter(const FiniteMetricSpace& x, const std::vector<std::size_t>& colors, std::size_t c,
                              std::size_t p, std::uint32_t t) {
  const std::size_t n = x.size();
  std::vector<std::size_t> comp{p};
  std::vector<char> seen(n, 0);
  seen[p] = 1;
  for (std::size_t head = 0; head < comp.size(); ++head) {
    for (std::size_t q = 0; q < n; ++q) {
      if (!seen[q] && colors[q] == c && x.rank(comp[head], q) < t) {
        seen[q] = 1;
        comp.push_back(q);
      }
    }
  }
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < comp.size(); ++i) {
    for (std::size_t j = i + 1; j < comp.size(); ++j) d = std::max(d, x.rank(comp[i], comp[j]));
  }
  return d;
}

std::vector<std::size_t> greedy_coloring(const FiniteMetricSpace& x, std::size_t k, std::uint32_t t,
                                         const std::vector<std::size_t>& order) {
  std::vector<std::size_t> colors(x.size(), kUnassigned);
  for (auto p : order) {
    std::size_t best = 0;
    std::uint32_t best_d = UINT32_MAX;
    for (std::size_t c = 0; c < k; ++c) {
      const auto d = joined_diameter(x, colors, c, p, t);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    colors[p] = best;
  }
  return colors;
}

void local_search(const FiniteMetricSpace& x, std::size_t k, std::uint32_t t, std::vector<std::size_t>& colors) {
  CostRank current = coloring_cost(x, colors, t);
  for (int pass = 0; pass < kLocalSearchPasses; ++pass) {
    bool improved = false;
    for (std::size_t p = 0; p < x.size(); ++p) {
      const std::size_t original = colors[p];
      for (std::size_t c = 0; c < k; ++c) {
        if (c == original) continue;
        colors[p] = c;
        const auto cost = coloring_cost(x, colors, t);
        if (cost < current) {
          current = cost;
          improved = true;
          break;
        }
        colors[p] = original;
      }
    }
    if (!improved || current.worst == 0) break;
  }
}

std::optional<std::vector<std::int64_t>> parse_coordinates(const std::string& label, std::size_t dims) {
  std::vector<std::int64_t> out;
  std::istringstream in(label);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(part, &used));
      if (used != part.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (out.size() != dims) return std::nullopt;
  return out;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

// Slab (one dimension, two colors) or brick (two dimensions, three colors)
// coloring with blocks of S = ceil(s) and brick length 3S, the smallest
// multiple of S exceeding 2S. Consecutive bands shift by 4S so that equal
// colors in adjacent bands are S + 1 apart.
std::optional<std::vector<std::size_t>> brick_coloring(const FiniteMetricSpace& x, std::size_t k, const Rational& s) {
  const auto& prov = x.provenance();
  if (prov.generator != "grid") return std::nullopt;
  const auto dims_text = prov.param("dims");
  if (!dims_text) return std::nullopt;
  const std::size_t dims = std::stoul(*dims_text);
  if (!((dims == 1 && k >= 2) || (dims == 2 && k >= 3))) return std::nullopt;
  const Rational sc = ceil(s);
  const std::int64_t block = std::max<std::int64_t>(1, sc.get_num().get_si());
  std::vector<std::size_t> colors(x.size());
  for (std::size_t p = 0; p < x.size(); ++p) {
    const auto c = parse_coordinates(x.label(p), dims);
    if (!c) return std::nullopt;
    if (dims == 1) {
      colors[p] = static_cast<std::size_t>(floor_div((*c)[0], block) % 2 + 2) % 2;
    } else {
      const std::int64_t band = floor_div((*c)[0], block);
      const std::int64_t brick = floor_div((*c)[1] - 4 * block * band, 3 * block);
      colors[p] = static_cast<std::size_t>((brick % 3 + 3) % 3);
    }
  }
  return colors;
}

// Branch and bound over bitmask color classes.
class ExactSearch {
 public:
  ExactSearch(const FiniteMetricSpace& x, std::size_t k, std::uint32_t t, std::uint64_t budget)
      : x_(x), n_(x.size()), k_(k), budget_(budget), adj_(n_, 0) {
    for (std::size_t p = 0; p < n_; ++p) {
      for (std::size_t q = 0; q < n_; ++q) {
        if (p != q && x.rank(p, q) < t) adj_[p] |= std::uint64_t{1} << q;
      }
    }
  }

  // Phase one: the optimal value, searching in `order`, seeded by an upper bound.
  std::uint32_t optimum(const std::vector<std::size_t>& order, std::uint32_t upper_bound) {
    order_ = order;
    incumbent_ = upper_bound;
    strict_ = true;
    std::vector<std::uint64_t> classes(k_, 0);
    improve(0, classes, 0, 0);
    return incumbent_;
  }

  // Phase two: lexicographically smallest coloring with cost <= value.
  std::vector<std::size_t> smallest_within(std::uint32_t value) {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    incumbent_ = value;
    strict_ = false;
    found_ = false;
    colors_.assign(n_, 0);
    std::vector<std::uint64_t> classes(k_, 0);
    first_within(0, classes, 0, 0);
    if (!found_) throw std::logic_error("exact solver lost its optimum");
    return colors_;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  std::uint32_t component_diameter(std::uint64_t cls, std::size_t p) const {
    std::uint64_t comp = std::uint64_t{1} << p;
    std::uint64_t frontier = comp;
    while (frontier) {
      std::uint64_t next = 0;
      for (std::uint64_t f = frontier; f; f &= f - 1) next |= adj_[std::countr_zero(f)];
      next &= cls & ~comp;
      comp |= next;
      frontier = next;
    }
    std::uint32_t d = 0;
    for (std::uint64_t a = comp; a; a &= a - 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(a));
      for (std::uint64_t b = a & (a - 1); b; b &= b - 1) d = std::max(d, x_.rank(i, std::countr_zero(b)));
    }
    return d;
  }

  bool exceeds(std::uint32_t cost) const { return strict_ ? cost >= incumbent_ : cost > incumbent_; }

  void tick() {
    if (++nodes_ > budget_) {
      throw CapExceeded("exact solver exceeded its node budget of " + std::to_string(budget_) +
                        "; use the heuristic solver");
    }
  }

  // Largest over unplaced points of their cheapest placement.
  bool forward_check(std::size_t depth, const std::vector<std::uint64_t>& classes, std::size_t used,
                     std::uint32_t cost) const {
    const std::size_t options = std::min(used + 1, k_);
    for (std::size_t i = depth; i < n_; ++i) {
      const std::size_t q = order_[i];
      std::uint32_t cheapest = UINT32_MAX;
      for (std::size_t c = 0; c < options && cheapest > cost; ++c) {
        cheapest = std::min(cheapest, std::max(cost, component_diameter(classes[c], q)));
      }
      if (exceeds(cheapest)) return false;
    }
    return true;
  }

  void improve(std::size_t depth, std::vector<std::uint64_t>& classes, std::size_t used, std::uint32_t cost) {
    tick();
    if (depth == n_) {
      incumbent_ = cost;
      return;
    }
    if (!forward_check(depth, classes, used, cost)) return;
    const std::size_t p = order_[depth];
    const std::size_t options = std::min(used + 1, k_);
    std::vector<std::pair<std::uint32_t, std::size_t>> children;
    for (std::size_t c = 0; c < options; ++c) {
      const auto d = std::max(cost, component_diameter(classes[c], p));
      if (!exceeds(d)) children.emplace_back(d, c);
    }
    std::sort(children.begin(), children.end());
    for (const auto& [d, c] : children) {
      if (exceeds(d)) continue;  // the incumbent may have improved
      classes[c] |= std::uint64_t{1} << p;
      improve(depth + 1, classes, std::max(used, c + 1), d);
      classes[c] &= ~(std::uint64_t{1} << p);
    }
  }

  void first_within(std::size_t depth, std::vector<std::uint64_t>& classes, std::size_t used, std::uint32_t cost) {
    tick();
    if (depth == n_) {
      found_ = true;
      return;
    }
    if (!forward_check(depth, classes, used, cost)) return;
    const std::size_t p = depth;
    const std::size_t options = std::min(used + 1, k_);
    for (std::size_t c = 0; c < options && !found_; ++c) {
      const auto d = std::max(cost, component_diameter(classes[c], p));
      if (exceeds(d)) continue;
      colors_[p] = c;
      classes[c] |= std::uint64_t{1} << p;
      first_within(depth + 1, classes, std::max(used, c + 1), d);
      classes[c] &= ~(std::uint64_t{1} << p);
    }
  }

  const FiniteMetricSpace& x_;
  std::size_t n_;
  std::size_t k_;
  std::uint64_t budget_;
  std::vector<std::uint64_t> adj_;
  std::vector<std::size_t> order_;
  std::uint32_t incumbent_ = 0;
  bool strict_ = true;
  bool found_ = false;
  std::vector<std::size_t> colors_;
  std::uint64_t nodes_ = 0;
};

void check_scale(const Rational& s) {
  if (sgn(s) < 0) throw InvalidInput("scale must be nonnegative");
}

DnSolution make_solution(const FiniteMetricSpace& x, std::vector<std::size_t> colors, std::size_t k, const Rational& s,
                         SolveMethod method, std::uint64_t nodes) {
  ColoredCover cover = cover_from_coloring(x, colors, k, s);
  Rational bound = cover.bound();
  return {std::move(bound), std::move(colors), std::move(cover), method, nodes};
}

}  // namespace

SolveOptions SolveOptions::from_environment() {
  SolveOptions o;
  if (const char* env = std::getenv("SCDIM_EXACT_CAP")) {
    try {
      const auto v = std::stoul(env);
      if (v == 0) throw std::invalid_argument("zero");
      o.exact_cap = v;
    } catch (const std::exception&) {
      throw InvalidInput(std::string("SCDIM_EXACT_CAP must be a positive integer, got '") + env + "'");
    }
  }
  return o;
}

std::string to_string(SolveMethod method) { return method == SolveMethod::exact ? "exact" : "heuristic"; }

Rational coloring_bound(const FiniteMetricSpace& x, const std::vector<std::size_t>& colors, std::size_t color_count,
                        const Rational& s) {
  return cover_from_coloring(x, colors, color_count, s).bound();
}

Rational d0_bound(const FiniteMetricSpace& x, const Rational& s) {
  check_scale(s);
  return coloring_bound(x, std::vector<std::size_t>(x.size(), 0), 1, s);
}

DnSolution heuristic_dn(const FiniteMetricSpace& x, std::size_t n, const Rational& s, const SolveOptions& options) {
  check_scale(s);
  const std::size_t k = n + 1;
  const auto t = x.rank_threshold(s);
  std::vector<std::vector<std::size_t>> candidates;
  if (auto brick = brick_coloring(x, k, s)) candidates.push_back(std::move(*brick));
  if (k == 1) {
    candidates.emplace_back(x.size(), 0);
  } else {
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order = farthest_point_order(x);
    for (std::size_t r = 0; r < std::max<std::size_t>(1, options.restarts); ++r) {
      if (r > 0) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[bounded_draw(rng, i)]);
      }
      auto colors = greedy_coloring(x, k, t, order);
      if (x.size() <= kLocalSearchUpTo) local_search(x, k, t, colors);
      candidates.push_back(std::move(colors));
    }
  }
  std::optional<std::pair<CostRank, std::size_t>> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto cost = coloring_cost(x, candidates[i], t);
    if (!best || cost.worst < best->first.worst) best.emplace(cost, i);
  }
  return make_solution(x, std::move(candidates[best->second]), k, s, SolveMethod::heuristic, 0);
}

DnSolution exact_dn(const FiniteMetricSpace& x, std::size_t n, const Rational& s, const SolveOptions& options) {
  check_scale(s);
  const std::size_t cap = std::min(options.exact_cap, kMaskBits);
  if (x.size() > cap) {
    throw CapExceeded("exact solver is capped at " + std::to_string(cap) + " points, space has " +
                      std::to_string(x.size()) + "; use the heuristic solver");
  }
  const std::size_t k = n + 1;
  const auto t = x.rank_threshold(s);
  const auto seed = heuristic_dn(x, n, s, options);
  ExactSearch search(x, k, t, options.node_budget);
  // One above the heuristic value so that phase one may return the heuristic value itself.
  const std::uint32_t value = search.optimum(farthest_point_order(x), coloring_cost(x, seed.colors, t).worst + 1);
  auto colors = search.smallest_within(value);
  return make_solution(x, std::move(colors), k, s, SolveMethod::exact, search.nodes());
}

std::vector<Rational> auto_scales(const FiniteMetricSpace& x) { return x.distinct_distances(); }

DimensionProfile profile(const FiniteMetricSpace& x, std::size_t n, const std::vector<Rational>& scales,
                         const SolveOptions& options, bool keep_covers) {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (sgn(scales[i]) <= 0) throw InvalidInput("profile scales must be positive");
    if (i > 0 && !(scales[i - 1] < scales[i])) throw InvalidInput("profile scales must be strictly increasing");
  }
  DimensionProfile out;
  out.provenance = x.provenance().to_string();
  out.color_count = n + 1;
  out.grid = "list";
  std::optional<Rational> last_exact;
  for (const auto& s : scales) {
    ProfileSample sample;
    sample.s = s;
    std::optional<DnSolution> sol;
    if (x.size() <= std::min(options.exact_cap, kMaskBits)) {
      try {
        sol = exact_dn(x, n, s, options);
      } catch (const CapExceeded&) {
        sample.status = "node_budget";
      }
    } else {
      sample.status = "size_cap";
    }
    if (!sol) sol = heuristic_dn(x, n, s, options);
    sample.bound = sol->bound;
    sample.method = sol->method;
    if (sample.method == SolveMethod::exact) {
      if (last_exact && sample.bound < *last_exact) {
        throw std::logic_error("exact profile decreased at s = " + to_string(s));
      }
      last_exact = sample.bound;
    }
    if (keep_covers) sample.cover = std::move(sol->cover);
    out.samples.push_back(std::move(sample));
  }
  return out;
}

std::string format_profile_csv(const DimensionProfile& p) {
  std::ostringstream out;
  if (!p.provenance.empty()) out << "# space: " << p.provenance << "\n";
  out << "# colors: " << p.color_count << "\n";
  out << "s,n,bound,method,status\n";
  for (const auto& sample : p.samples) {
    out << to_string(sample.s) << "," << p.color_count - 1 << "," << to_string(sample.bound) << ","
        << to_string(sample.method) << "," << sample.status << "\n";
  }
  return out.str();
}

DimensionProfile parse_profile_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  DimensionProfile p;
  bool header = false;
  std::optional<std::size_t> n;
  std::size_t line_no = 0;
  static constexpr std::string_view kSpace = "# space: ";
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind(kSpace, 0) == 0) p.provenance = line.substr(kSpace.size());
      continue;
    }
    if (!header) {
      if (line != "s,n,bound,method,status") throw InvalidInput("profile CSV must have header s,n,bound,method,status");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw InvalidInput("profile CSV line " + std::to_string(line_no) + " needs 5 columns");
    ProfileSample s;
    s.s = parse_rational(cells[0]);
    std::size_t row_n = 0;
    try {
      row_n = std::stoul(cells[1]);
    } catch (const std::exception&) {
      throw InvalidInput("profile CSV line " + std::to_string(line_no) + ": bad n");
    }
    if (n && *n != row_n) throw InvalidInput("profile CSV mixes color counts");
    n = row_n;
    s.bound = parse_rational(cells[2]);
    if (cells[3] == "exact") {
      s.method = SolveMethod::exact;
    } else if (cells[3] == "heuristic") {
      s.method = SolveMethod::heuristic;
    } else {
      throw InvalidInput("profile CSV line " + std::to_string(line_no) + ": unknown method '" + cells[3] + "'");
    }
    s.status = cells[4];
    if (!p.samples.empty() && !(p.samples.back().s < s.s)) {
      throw InvalidInput("profile CSV scales must be strictly increasing");
    }
    p.samples.push_back(std::move(s));
  }
  if (!header) throw InvalidInput("profile CSV lacks its header");
  p.color_count = n.value_or(0) + 1;
  return p;
}

namespace {

std::size_t tail_start(const DimensionProfile& p, const ClassifyOptions& options) {
  const std::size_t total = p.samples.size();
  if (total < 3) throw InvalidInput("classification needs at least 3 samples, profile has " + std::to_string(total));
  std::size_t size = options.tail_size.value_or(std::max<std::size_t>(3, (total + 1) / 2));
  if (size < 3) throw InvalidInput("classification tail must hold at least 3 samples");
  size = std::min(size, total);
  return total - size;
}

std::string rational_list(const std::vector<Rational>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + to_string(xs[i]);
  return out;
}

}  // namespace

std::string GrowthVerdict::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::linear: out << "Linear(" << scdim::to_string(constant) << ")"; break;
    case Kind::power: out << "Power(" << exponent << ", " << scdim::to_string(constant) << ")"; break;
    case Kind::dominated: out << "Dominated(" << class_description << ")"; break;
    case Kind::not_dominated:
      out << "NotDominated(" << class_description << "; witnesses s = " << rational_list(evidence) << ")";
      break;
    case Kind::unknown: out << "Unknown"; break;
  }
  return out.str();
}

GrowthVerdict classify_linear(const DimensionProfile& p, const ClassifyOptions& options) {
  GrowthVerdict v;
  v.tail_start = tail_start(p, options);
  for (Rational c = 1; c <= options.linear_cap; c *= 2) {
    bool ok = true;
    for (std::size_t i = v.tail_start; i < p.samples.size() && ok; ++i) ok = p.samples[i].bound <= c * p.samples[i].s;
    if (ok) {
      v.kind = GrowthVerdict::Kind::linear;
      v.constant = c;
      return v;
    }
  }
  v.kind = GrowthVerdict::Kind::not_dominated;
  v.constant = options.linear_cap;
  v.class_description = "linear, C-cap " + to_string(options.linear_cap);
  for (std::size_t i = v.tail_start; i < p.samples.size(); ++i) {
    if (p.samples[i].bound > options.linear_cap * p.samples[i].s) v.evidence.push_back(p.samples[i].s);
  }
  return v;
}

GrowthVerdict classify_power(const DimensionProfile& p, const ClassifyOptions& options) {
  GrowthVerdict v;
  v.tail_start = tail_start(p, options);
  std::vector<double> slopes;
  for (std::size_t i = v.tail_start; i + 1 < p.samples.size(); ++i) {
    const auto& a = p.samples[i];
    const auto& b = p.samples[i + 1];
    if (sgn(a.bound) <= 0 || sgn(b.bound) <= 0) continue;
    slopes.push_back(std::log(to_double(b.bound / a.bound)) / std::log(to_double(b.s / a.s)));
  }
  if (slopes.size() < 2) return v;
  const auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
  if (*hi - *lo > options.power_tolerance) return v;
  v.kind = GrowthVerdict::Kind::power;
  v.exponent = std::accumulate(slopes.begin(), slopes.end(), 0.0) / static_cast<double>(slopes.size());
  // Smallest coefficient over the tail for the rounded exponent when it is integral.
  const double rounded = std::round(v.exponent);
  if (std::abs(rounded - v.exponent) <= options.power_tolerance && rounded >= 0) {
    Rational coef = 0;
    for (std::size_t i = v.tail_start; i < p.samples.size(); ++i) {
      coef = std::max(coef, Rational(p.samples[i].bound / pow(p.samples[i].s, static_cast<std::uint64_t>(rounded))));
    }
    v.constant = coef;
  }
  return v;
}

GrowthVerdict classify_against(const DimensionProfile& p, const ControlFunction& g, const ClassifyOptions& options) {
  GrowthVerdict v;
  v.tail_start = tail_start(p, options);
  v.class_description = g.to_string();
  for (std::size_t i = v.tail_start; i < p.samples.size(); ++i) {
    const auto& sample = p.samples[i];
    if (sample.s < g.domain_start() || sample.bound > g.evaluate(sample.s)) v.evidence.push_back(sample.s);
  }
  v.kind = v.evidence.empty() ? GrowthVerdict::Kind::dominated : GrowthVerdict::Kind::not_dominated;
  return v;
}

bool UnionReport::holds() const {
  return std::all_of(rows.begin(), rows.end(), [](const UnionRow& r) { return r.monotone; });
}

UnionReport verify_union_max(const FiniteMetricSpace& x, const PointSet& a, const PointSet& b, std::size_t n,
                             const std::vector<Rational>& scales, const SolveOptions& options) {
  std::vector<char> covered(x.size(), 0);
  for (const PointSet* part : {&a, &b}) {
    for (auto p : *part) {
      if (p >= x.size()) throw InvalidInput("decomposition refers to point " + std::to_string(p) + " outside X");
      covered[p] = 1;
    }
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
    throw InvalidInput("A and B do not cover X");
  }
  auto sorted = [](PointSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };
  const auto pa = profile(x.subspace(sorted(a)), n, scales, options);
  const auto pb = profile(x.subspace(sorted(b)), n, scales, options);
  const auto px = profile(x, n, scales, options);
  UnionReport report;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    UnionRow row;
    row.s = scales[i];
    row.a = pa.samples[i].bound;
    row.b = pb.samples[i].bound;
    row.x = px.samples[i].bound;
    row.exact = pa.samples[i].method == SolveMethod::exact && pb.samples[i].method == SolveMethod::exact &&
                px.samples[i].method == SolveMethod::exact;
    const Rational parts = std::max(row.a, row.b);
    row.monotone = parts <= row.x;
    row.gap = row.x - parts;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace scdim
