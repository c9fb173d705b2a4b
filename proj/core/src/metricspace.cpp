#include "scdim/metricspace.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "scdim/errors.hpp"

namespace scdim {

namespace {

// Constructions that are metric by design are still checked below this size.
constexpr std::size_t kValidateUpTo = 512;

bool is_label_char_ok(char c) { return c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '#'; }

void check_labels(const std::vector<std::string>& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw InvalidInput("empty point label");
    if (!std::all_of(l.begin(), l.end(), is_label_char_ok)) throw InvalidInput("point label '" + l + "' contains whitespace or '#'");
    if (!seen.insert(l).second) throw InvalidInput("duplicate point label '" + l + "'");
  }
}

// Values multiplied by a common denominator, when every product fits in 62 bits.
std::optional<std::vector<std::int64_t>> scaled_integers(const std::vector<Rational>& values) {
  Integer lcm = 1;
  for (const auto& v : values) {
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den_mpz_t());
    if (mpz_sizeinbase(lcm.get_mpz_t(), 2) > 62) return std::nullopt;
  }
  std::vector<std::int64_t> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    Integer scaled = v.get_num() * (lcm / v.get_den());
    if (mpz_sizeinbase(scaled.get_mpz_t(), 2) > 61) return std::nullopt;
    out.push_back(static_cast<std::int64_t>(scaled.get_si()));
  }
  return out;
}

template <typename Value, typename Less, typename Add>
void triangle_violations(std::size_t n, const std::vector<std::uint32_t>& ranks, const std::vector<Value>& values,
                         Less less, Add add, std::vector<MetricViolation>& out) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Value& dij = values[ranks[i * n + j]];
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (less(add(values[ranks[i * n + k]], values[ranks[k * n + j]]), dij)) {
          out.push_back({MetricViolation::Kind::triangle, i, k, j});
        }
      }
    }
  }
}

std::vector<MetricViolation> validate_ranks(std::size_t n, const std::vector<std::uint32_t>& ranks,
                                            const std::vector<Rational>& values, bool check_triangles) {
  std::vector<MetricViolation> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(values[ranks[i * n + i]]) != 0) out.push_back({MetricViolation::Kind::nonzero_diagonal, i, i, 0});
    for (std::size_t j = i + 1; j < n; ++j) {
      const Rational& a = values[ranks[i * n + j]];
      if (ranks[i * n + j] != ranks[j * n + i]) out.push_back({MetricViolation::Kind::asymmetry, i, j, 0});
      if (sgn(a) < 0 || sgn(values[ranks[j * n + i]]) < 0) {
        out.push_back({MetricViolation::Kind::negative, i, j, 0});
      } else if (sgn(a) == 0) {
        out.push_back({MetricViolation::Kind::zero_distance, i, j, 0});
      }
    }
  }
  if (!check_triangles) return out;
  if (auto ints = scaled_integers(values)) {
    triangle_violations(
        n, ranks, *ints, [](std::int64_t a, std::int64_t b) { return a < b; },
        [](std::int64_t a, std::int64_t b) { return a + b; }, out);
  } else {
    triangle_violations(
        n, ranks, values, [](const Rational& a, const Rational& b) { return a < b; },
        [](const Rational& a, const Rational& b) { return Rational(a + b); }, out);
  }
  return out;
}

// Sorted distinct values of a rational matrix and the rank of every entry.
std::pair<std::vector<Rational>, std::vector<std::uint32_t>> rank_matrix(
    const std::vector<std::vector<Rational>>& matrix) {
  const std::size_t n = matrix.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) {
      throw InvalidInput("matrix row " + std::to_string(i + 1) + " has " + std::to_string(matrix[i].size()) +
                         " entries, expected " + std::to_string(n));
    }
  }
  std::vector<Rational> values;
  values.reserve(n * n);
  for (const auto& row : matrix) values.insert(values.end(), row.begin(), row.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<std::uint32_t> ranks(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ranks[i * n + j] =
          static_cast<std::uint32_t>(std::lower_bound(values.begin(), values.end(), matrix[i][j]) - values.begin());
    }
  }
  return {std::move(values), std::move(ranks)};
}

std::string strip_spaces(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }), s.end());
  return s;
}

}  // namespace

std::optional<std::string> Provenance::param(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string Provenance::to_string() const {
  std::string out = generator;
  for (const auto& [k, v] : params) out += " " + k + "=" + strip_spaces(v);
  return out;
}

Provenance Provenance::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  Provenance p;
  in >> p.generator;
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw InvalidInput("provenance parameter '" + token + "' lacks '='");
    p.params.emplace_back(token.substr(0, eq), token.substr(eq + 1));
  }
  return p;
}

std::string MetricViolation::describe(const std::vector<std::string>& labels) const {
  auto name = [&](std::size_t x) { return x < labels.size() ? labels[x] : std::to_string(x); };
  switch (kind) {
    case Kind::negative: return "negative distance between " + name(i) + " and " + name(j);
    case Kind::nonzero_diagonal: return "nonzero self-distance at " + name(i);
    case Kind::asymmetry: return "asymmetry between " + name(i) + " and " + name(j);
    case Kind::zero_distance: return "zero distance between distinct points " + name(i) + " and " + name(j);
    case Kind::triangle: return "triangle violation at (" + name(i) + "," + name(j) + "," + name(k) + ")";
  }
  return "unknown violation";
}

struct FiniteMetricSpace::Data {
  std::vector<std::string> labels;
  std::vector<Rational> values;  // strictly increasing, values[0] == 0 when nonempty
  std::vector<std::uint32_t> ranks;
  Provenance provenance;
  std::unordered_map<std::string, std::size_t> index;
};

FiniteMetricSpace::FiniteMetricSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

FiniteMetricSpace::FiniteMetricSpace() : FiniteMetricSpace(from_ranks({"0"}, {Rational(0)}, {0})) {}

FiniteMetricSpace FiniteMetricSpace::from_ranks(std::vector<std::string> labels, std::vector<Rational> values,
                                                std::vector<std::uint32_t> ranks, Provenance provenance,
                                                bool validate) {
  const std::size_t n = labels.size();
  if (ranks.size() != n * n) {
    throw InvalidInput("distance matrix has " + std::to_string(ranks.size()) + " entries for " + std::to_string(n) +
                       " labels");
  }
  check_labels(labels);
  for (std::size_t r = 1; r < values.size(); ++r) {
    if (!(values[r - 1] < values[r])) throw InvalidInput("distance values must be strictly increasing");
  }
  for (auto r : ranks) {
    if (r >= values.size()) throw InvalidInput("distance rank out of range");
  }
  const auto violations = validate_ranks(n, ranks, values, validate);
  if (!violations.empty()) {
    std::string msg = "invalid metric (" + std::to_string(violations.size()) + " violations):";
    for (const auto& v : violations) msg += "\n  " + v.describe(labels);
    throw InvalidInput(msg);
  }
  // Drop unused values so that ranks are dense.
  std::vector<char> used(values.size(), 0);
  for (auto r : ranks) used[r] = 1;
  std::vector<std::uint32_t> remap(values.size());
  std::vector<Rational> dense;
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (!used[r]) continue;
    remap[r] = static_cast<std::uint32_t>(dense.size());
    dense.push_back(values[r]);
  }
  for (auto& r : ranks) r = remap[r];
  if (n == 0) dense.assign(1, Rational(0));

  auto data = std::make_shared<Data>();
  data->labels = std::move(labels);
  data->values = std::move(dense);
  data->ranks = std::move(ranks);
  data->provenance = std::move(provenance);
  for (std::size_t i = 0; i < n; ++i) data->index.emplace(data->labels[i], i);
  return FiniteMetricSpace(std::move(data));
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::vector<std::string> labels,
                                                 const std::vector<std::vector<Rational>>& matrix,
                                                 Provenance provenance) {
  if (matrix.size() != labels.size()) {
    throw InvalidInput("matrix has " + std::to_string(matrix.size()) + " rows for " + std::to_string(labels.size()) +
                       " labels");
  }
  auto [values, ranks] = rank_matrix(matrix);
  return from_ranks(std::move(labels), std::move(values), std::move(ranks), std::move(provenance), true);
}

FiniteMetricSpace FiniteMetricSpace::from_trusted_matrix(std::vector<std::string> labels,
                                                         const std::vector<std::vector<Rational>>& matrix,
                                                         Provenance provenance) {
  if (matrix.size() != labels.size()) throw InvalidInput("matrix row count does not match label count");
  auto [values, ranks] = rank_matrix(matrix);
  const bool check = labels.size() <= kValidateUpTo;
  return from_ranks(std::move(labels), std::move(values), std::move(ranks), std::move(provenance), check);
}

FiniteMetricSpace FiniteMetricSpace::from_integer_matrix(std::vector<std::string> labels,
                                                         const std::vector<std::int64_t>& flat, Provenance provenance,
                                                         bool validate) {
  std::vector<std::int64_t> sorted = flat;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint32_t> ranks(flat.size());
  for (std::size_t e = 0; e < flat.size(); ++e) {
    ranks[e] = static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), flat[e]) - sorted.begin());
  }
  std::vector<Rational> values;
  values.reserve(sorted.size());
  for (auto v : sorted) values.emplace_back(static_cast<long>(v));
  return from_ranks(std::move(labels), std::move(values), std::move(ranks), std::move(provenance), validate);
}

std::vector<MetricViolation> FiniteMetricSpace::validate(const std::vector<std::vector<Rational>>& matrix) {
  auto [values, ranks] = rank_matrix(matrix);
  return validate_ranks(matrix.size(), ranks, values, true);
}

std::size_t FiniteMetricSpace::size() const { return data_->labels.size(); }

const Rational& FiniteMetricSpace::distance(std::size_t i, std::size_t j) const {
  return data_->values[data_->ranks[i * size() + j]];
}

const std::string& FiniteMetricSpace::label(std::size_t i) const { return data_->labels.at(i); }

const std::vector<std::string>& FiniteMetricSpace::labels() const { return data_->labels; }

std::optional<std::size_t> FiniteMetricSpace::index_of(std::string_view label) const {
  auto it = data_->index.find(std::string(label));
  if (it == data_->index.end()) return std::nullopt;
  return it->second;
}

const Provenance& FiniteMetricSpace::provenance() const { return data_->provenance; }

FiniteMetricSpace FiniteMetricSpace::with_provenance(Provenance provenance) const {
  auto data = std::make_shared<Data>(*data_);
  data->provenance = std::move(provenance);
  return FiniteMetricSpace(std::move(data));
}

std::vector<Rational> FiniteMetricSpace::distinct_distances() const {
  return {data_->values.begin() + 1, data_->values.end()};
}

Rational FiniteMetricSpace::diameter() const { return data_->values.back(); }

std::uint32_t FiniteMetricSpace::rank(std::size_t i, std::size_t j) const { return data_->ranks[i * size() + j]; }

const Rational& FiniteMetricSpace::value_of_rank(std::uint32_t r) const { return data_->values.at(r); }

std::uint32_t FiniteMetricSpace::rank_count() const { return static_cast<std::uint32_t>(data_->values.size()); }

std::uint32_t FiniteMetricSpace::rank_threshold(const Rational& s) const {
  return static_cast<std::uint32_t>(std::upper_bound(data_->values.begin(), data_->values.end(), s) -
                                    data_->values.begin());
}

FiniteMetricSpace FiniteMetricSpace::subspace(const std::vector<std::size_t>& indices) const {
  const std::size_t n = size();
  const std::size_t m = indices.size();
  std::vector<std::string> labels;
  labels.reserve(m);
  for (auto i : indices) {
    if (i >= n) throw InvalidInput("subspace index " + std::to_string(i) + " out of range");
    labels.push_back(data_->labels[i]);
  }
  std::vector<std::uint32_t> ranks(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) ranks[a * m + b] = data_->ranks[indices[a] * n + indices[b]];
  }
  // Repeated indices would yield zero distances and are rejected by validation.
  return from_ranks(std::move(labels), data_->values, std::move(ranks), {}, false);
}

std::vector<std::vector<Rational>> FiniteMetricSpace::matrix() const {
  const std::size_t n = size();
  std::vector<std::vector<Rational>> out(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i][j] = distance(i, j);
  }
  return out;
}

std::optional<std::array<std::size_t, 3>> FiniteMetricSpace::ultrametric_violation() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const auto rik = rank(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        if (rik > std::max(rank(i, j), rank(j, k))) return std::array<std::size_t, 3>{i, j, k};
      }
    }
  }
  return std::nullopt;
}

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw InvalidInput("bounded_draw needs a positive range");
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

namespace {

FiniteMetricSpace line_space(const std::vector<Rational>& points, Provenance provenance) {
  const std::size_t n = points.size();
  std::vector<std::string> labels;
  std::vector<std::vector<Rational>> matrix(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(to_string(points[i]));
    for (std::size_t j = 0; j < n; ++j) matrix[i][j] = abs(points[i] - points[j]);
  }
  return FiniteMetricSpace::from_trusted_matrix(std::move(labels), matrix, std::move(provenance));
}

}  // namespace

std::pair<FiniteMetricSpace, CounterexampleBlueprint> counterexample_space(const ControlFunction& f, std::size_t depth,
                                                                           const CounterexampleOptions& options) {
  if (f.scale() == Scale::small) throw PreconditionError("counterexample_space needs a large-scale function");
  const auto above_identity =
      eventually_dominates(f, ControlFunction::identity(f.scale()), Scale::large, Strictness::strict);
  if (!above_identity.is_yes()) {
    throw PreconditionError("f = " + f.to_string() + " is not shown to be eventually strictly above the identity");
  }

  CounterexampleBlueprint bp{f, depth, {Rational(0)}, {}, {}, {}};
  const Rational start = f.domain_start();
  Rational prev_n = 0;
  for (std::size_t i = 1; i <= depth; ++i) {
    const Rational& a_prev = bp.a.back();
    std::optional<Rational> found;
    for (Rational cand = floor(prev_n) + 1; cand <= options.search_cap; cand += 1) {
      if (cand < start) continue;
      if (a_prev + cand < f.evaluate(cand)) {
        found = cand;
        break;
      }
    }
    if (!found) {
      throw CapExceeded("no n_" + std::to_string(i) + " found below the search cap " +
                        std::to_string(options.search_cap));
    }
    const Rational a_i = f.evaluate(*found);
    std::vector<Rational> block;
    for (Rational x = a_prev; x < a_i; x += *found) block.push_back(x);
    block.push_back(a_i);
    bp.n.push_back(*found);
    bp.a.push_back(a_i);
    bp.blocks.push_back(std::move(block));
    prev_n = *found;
  }

  std::vector<Rational> points{Rational(0)};
  for (const auto& b : bp.blocks) points.insert(points.end(), b.begin(), b.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (const auto& b : bp.blocks) {
    std::vector<std::size_t> idx;
    for (const auto& x : b) idx.push_back(std::lower_bound(points.begin(), points.end(), x) - points.begin());
    bp.block_indices.push_back(std::move(idx));
  }
  Provenance prov{"counterexample", {{"f", f.to_string()}, {"depth", std::to_string(depth)}}};
  return {line_space(points, std::move(prov)), std::move(bp)};
}

FiniteMetricSpace grid_box(std::size_t dims, std::size_t side, const GridOptions& options) {
  if (dims < 1 || dims > 3) throw InvalidInput("grid dims must be 1, 2 or 3");
  std::size_t n = 1;
  for (std::size_t d = 0; d < dims; ++d) {
    n *= side + 1;
    if (n > options.max_points) {
      throw CapExceeded("grid with side " + std::to_string(side) + " in " + std::to_string(dims) +
                        " dimensions exceeds the cap of " + std::to_string(options.max_points) + " points");
    }
  }
  std::vector<std::array<std::int64_t, 3>> coords(n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    std::string label;
    for (std::size_t d = 0; d < dims; ++d) {
      coords[i][d] = static_cast<std::int64_t>(rest % (side + 1));
      rest /= side + 1;
    }
    // First coordinate varies slowest in the label order.
    for (std::size_t d = dims; d-- > 0;) {
      label += std::to_string(coords[i][d]);
      if (d) label += ",";
    }
    labels[i] = label;
  }
  // Reorder so that labels are in lexicographic coordinate order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t d = dims; d-- > 0;) {
      if (coords[a][d] != coords[b][d]) return coords[a][d] < coords[b][d];
    }
    return false;
  });
  std::vector<std::string> sorted_labels(n);
  std::vector<std::int64_t> flat(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    sorted_labels[a] = labels[order[a]];
    for (std::size_t b = 0; b < n; ++b) {
      std::int64_t d = 0;
      for (std::size_t k = 0; k < dims; ++k) {
        d = std::max(d, std::abs(coords[order[a]][k] - coords[order[b]][k]));
      }
      flat[a * n + b] = d;
    }
  }
  Provenance prov{"grid", {{"dims", std::to_string(dims)}, {"side", std::to_string(side)}}};
  return FiniteMetricSpace::from_integer_matrix(std::move(sorted_labels), flat, std::move(prov), n <= kValidateUpTo);
}

FiniteMetricSpace lomega_slice(std::int64_t window_start, const std::vector<LOmegaPoint>& points,
                               const std::string& basepoint_symbol) {
  const std::size_t n = points.size();
  const std::size_t width = n ? points[0].symbols.size() : 0;
  for (const auto& p : points) {
    if (p.symbols.size() != width) throw InvalidInput("L-omega sequences must share the index window");
  }
  std::vector<std::string> labels;
  std::vector<std::vector<Rational>> matrix(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(points[i].label);
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t m = 0;
      while (m < width && points[i].symbols[m] == points[j].symbols[m]) ++m;
      if (m == width) {
        throw InvalidInput("sequences " + points[i].label + " and " + points[j].label + " are identical");
      }
      matrix[i][j] = matrix[j][i] = pow3(-(window_start + static_cast<std::int64_t>(m)));
    }
  }
  Provenance prov{"lomega",
                  {{"window_start", std::to_string(window_start)},
                   {"width", std::to_string(width)},
                   {"basepoint", basepoint_symbol}}};
  return FiniteMetricSpace::from_trusted_matrix(std::move(labels), matrix, std::move(prov));
}

namespace {

FiniteMetricSpace perturb(const FiniteMetricSpace& x, const Rational& c, bool take_min) {
  if (sgn(c) <= 0) throw InvalidInput("perturbation constant must be positive");
  const std::size_t n = x.size();
  auto matrix = x.matrix();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      matrix[i][j] = take_min ? std::min(matrix[i][j], c) : std::max(matrix[i][j], c);
    }
  }
  Provenance prov{take_min ? "perturb_min" : "perturb_max", {{"c", to_string(c)}}};
  if (!x.provenance().empty()) prov.params.emplace_back("of", x.provenance().generator);
  return FiniteMetricSpace::from_matrix(x.labels(), matrix, std::move(prov));
}

}  // namespace

FiniteMetricSpace perturb_min(const FiniteMetricSpace& x, const Rational& c) { return perturb(x, c, true); }
FiniteMetricSpace perturb_max(const FiniteMetricSpace& x, const Rational& c) { return perturb(x, c, false); }

FiniteMetricSpace product(const FiniteMetricSpace& x, const FiniteMetricSpace& y, std::size_t max_points) {
  const std::size_t nx = x.size(), ny = y.size();
  if (nx != 0 && ny > max_points / nx) {
    throw CapExceeded("product of " + std::to_string(nx) + " and " + std::to_string(ny) +
                      " points exceeds the cap of " + std::to_string(max_points));
  }
  // Merge the value lists; every product distance is one of them.
  std::vector<Rational> values;
  for (std::uint32_t r = 0; r < x.rank_count(); ++r) values.push_back(x.value_of_rank(r));
  for (std::uint32_t r = 0; r < y.rank_count(); ++r) values.push_back(y.value_of_rank(r));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  auto lookup = [&](const Rational& v) {
    return static_cast<std::uint32_t>(std::lower_bound(values.begin(), values.end(), v) - values.begin());
  };
  std::vector<std::uint32_t> xr(x.rank_count()), yr(y.rank_count());
  for (std::uint32_t r = 0; r < x.rank_count(); ++r) xr[r] = lookup(x.value_of_rank(r));
  for (std::uint32_t r = 0; r < y.rank_count(); ++r) yr[r] = lookup(y.value_of_rank(r));

  const std::size_t n = nx * ny;
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) labels.push_back("(" + x.label(i) + "," + y.label(j) + ")");
  }
  std::vector<std::uint32_t> ranks(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t ai = a / ny, aj = a % ny;
    for (std::size_t b = 0; b < n; ++b) {
      ranks[a * n + b] = std::max(xr[x.rank(ai, b / ny)], yr[y.rank(aj, b % ny)]);
    }
  }
  Provenance prov{"product", {}};
  if (!x.provenance().empty()) prov.params.emplace_back("left", x.provenance().generator);
  if (!y.provenance().empty()) prov.params.emplace_back("right", y.provenance().generator);
  return FiniteMetricSpace::from_ranks(std::move(labels), std::move(values), std::move(ranks), std::move(prov),
                                       n <= kValidateUpTo);
}

FiniteMetricSpace random_ultrametric(std::uint64_t seed, std::size_t size, std::size_t level_count,
                                     const UltrametricOptions& options) {
  if (size < 1) throw InvalidInput("random_ultrametric needs at least one point");
  if (level_count < 1) throw InvalidInput("random_ultrametric needs at least one level");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Rational>> matrix(size, std::vector<Rational>(size));
  constexpr std::uint64_t kJitterDen = 64;

  struct Task {
    std::vector<std::size_t> points;
    std::size_t level;
  };
  std::vector<Task> stack;
  std::vector<std::size_t> all(size);
  std::iota(all.begin(), all.end(), 0);
  stack.push_back({std::move(all), 0});
  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    auto& pts = task.points;
    const std::size_t m = pts.size();
    if (m < 2) continue;
    for (std::size_t i = m - 1; i > 0; --i) std::swap(pts[i], pts[bounded_draw(rng, i + 1)]);
    const bool last = task.level + 1 >= level_count;
    const std::size_t parts = last ? m : 1 + bounded_draw(rng, std::min<std::size_t>(m, 3));
    if (parts == 1) {
      stack.push_back({std::move(pts), task.level + 1});
      continue;
    }
    std::vector<std::size_t> positions(m - 1);
    std::iota(positions.begin(), positions.end(), 1);
    for (std::size_t i = 0; i + 1 < parts; ++i) {
      std::swap(positions[i], positions[i + bounded_draw(rng, positions.size() - i)]);
    }
    std::vector<std::size_t> cuts(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(parts - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.insert(cuts.begin(), 0);
    cuts.push_back(m);

    Rational value = pow3(static_cast<std::int64_t>(level_count - 1 - task.level));
    if (options.jitter) {
      value *= make_rational(static_cast<long>(kJitterDen + bounded_draw(rng, 2 * kJitterDen)),
                             static_cast<long>(kJitterDen));
    }
    for (std::size_t p = 0; p < parts; ++p) {
      for (std::size_t q = p + 1; q < parts; ++q) {
        for (std::size_t a = cuts[p]; a < cuts[p + 1]; ++a) {
          for (std::size_t b = cuts[q]; b < cuts[q + 1]; ++b) matrix[pts[a]][pts[b]] = matrix[pts[b]][pts[a]] = value;
        }
      }
    }
    for (std::size_t p = 0; p < parts; ++p) {
      stack.push_back({std::vector<std::size_t>(pts.begin() + static_cast<std::ptrdiff_t>(cuts[p]),
                                                pts.begin() + static_cast<std::ptrdiff_t>(cuts[p + 1])),
                       task.level + 1});
    }
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < size; ++i) labels.push_back("u" + std::to_string(i));
  Provenance prov{"ultrametric",
                  {{"seed", std::to_string(seed)},
                   {"size", std::to_string(size)},
                   {"levels", std::to_string(level_count)},
                   {"jitter", options.jitter ? "1" : "0"}}};
  return FiniteMetricSpace::from_trusted_matrix(std::move(labels), matrix, std::move(prov));
}

FiniteMetricSpace random_metric(std::uint64_t seed, std::size_t size, std::uint64_t max_weight) {
  if (size < 1) throw InvalidInput("random_metric needs at least one point");
  if (max_weight < 1) throw InvalidInput("random_metric needs a positive maximum weight");
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> d(size * size, 0);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = i + 1; j < size; ++j) {
      d[i * size + j] = d[j * size + i] = static_cast<std::int64_t>(1 + bounded_draw(rng, max_weight));
    }
  }
  for (std::size_t k = 0; k < size; ++k) {
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        d[i * size + j] = std::min(d[i * size + j], d[i * size + k] + d[k * size + j]);
      }
    }
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < size; ++i) labels.push_back("p" + std::to_string(i));
  Provenance prov{"random_metric",
                  {{"seed", std::to_string(seed)}, {"size", std::to_string(size)}, {"max_weight", std::to_string(max_weight)}}};
  return FiniteMetricSpace::from_integer_matrix(std::move(labels), d, std::move(prov), size <= kValidateUpTo);
}

FiniteMetricSpace parse_space(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  Provenance prov;
  std::vector<std::vector<std::string>> rows;
  static constexpr std::string_view kProvenance = "# provenance:";
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      if (line.compare(first, kProvenance.size(), kProvenance) == 0) {
        prov = Provenance::parse(std::string_view(line).substr(first + kProvenance.size()));
      }
      continue;
    }
    std::istringstream tokens(line);
    std::vector<std::string> row;
    std::string t;
    while (tokens >> t) row.push_back(t);
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "metricspace") {
    throw InvalidInput("space file must start with 'metricspace <N>'");
  }
  std::size_t n = 0;
  try {
    std::size_t used = 0;
    n = std::stoul(rows[0][1], &used);
    if (used != rows[0][1].size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InvalidInput("bad point count '" + rows[0][1] + "'");
  }
  if (rows.size() != n + 2) {
    throw InvalidInput("expected a label line and " + std::to_string(n) + " matrix rows, found " +
                       std::to_string(rows.size() - 1) + " lines");
  }
  if (rows[1].size() != n) throw InvalidInput("expected " + std::to_string(n) + " labels");
  std::vector<std::vector<Rational>> matrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 2];
    if (row.size() != n) {
      throw InvalidInput("matrix row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) + " entries");
    }
    for (const auto& t : row) matrix[i].push_back(parse_rational(t));
  }
  return FiniteMetricSpace::from_matrix(rows[1], matrix, std::move(prov));
}

std::string format_space(const FiniteMetricSpace& x) {
  std::string out;
  if (!x.provenance().empty()) out += "# provenance: " + x.provenance().to_string() + "\n";
  out += "metricspace " + std::to_string(x.size()) + "\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ' ';
    out += x.label(i);
  }
  out += '\n';
  std::vector<std::string> rendered(x.rank_count());
  for (std::uint32_t r = 0; r < x.rank_count(); ++r) rendered[r] = to_string(x.value_of_rank(r));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j) out += ' ';
      out += rendered[x.rank(i, j)];
    }
    out += '\n';
  }
  return out;
}

}  // namespace scdim
