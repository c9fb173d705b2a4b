#include <gtest/gtest.h>

#include <random>
#include <set>

#include "brute_force.hpp"
#include "scdim/coarsemaps.hpp"
#include "scdim/errors.hpp"

using namespace scdim;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

FiniteMetricSpace line(const std::vector<long>& xs) {
  std::vector<std::string> labels;
  std::vector<std::vector<Rational>> m(xs.size(), std::vector<Rational>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    labels.push_back(std::to_string(xs[i]));
    for (std::size_t j = 0; j < xs.size(); ++j) m[i][j] = q(std::labs(xs[i] - xs[j]));
  }
  return FiniteMetricSpace::from_matrix(labels, m);
}

PointMap doubling(std::size_t n) {
  std::vector<long> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(static_cast<long>(i));
    ys.push_back(2 * static_cast<long>(i));
  }
  std::vector<std::size_t> image(n);
  for (std::size_t i = 0; i < n; ++i) image[i] = i;
  return PointMap(line(xs), line(ys), image);
}

PointMap projection(std::size_t side) {
  auto box = grid_box(2, side);
  auto col = grid_box(1, side);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& l : box.labels()) pairs.emplace_back(l, l.substr(0, l.find(',')));
  return PointMap::from_labels(box, col, pairs);
}

PointMap constant_map(const FiniteMetricSpace& x) {
  return PointMap(x, FiniteMetricSpace(), std::vector<std::size_t>(x.size(), 0));
}

// Bottleneck distances: min over paths of the longest step.
std::vector<std::vector<Rational>> minimax(const FiniteMetricSpace& x) {
  auto d = x.matrix();
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], std::max(d[i][k], d[k][j]));
    }
  }
  return d;
}

bool is_power_of_three(Rational v) {
  if (sgn(v) <= 0) return false;
  while (v >= 3) v /= 3;
  while (v < 1) v *= 3;
  return v == 1;
}

// Maximal cliques by subset enumeration.
std::vector<PointSet> brute_cliques(const std::vector<std::vector<char>>& adj) {
  const std::size_t n = adj.size();
  std::vector<std::uint32_t> cliques;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = i + 1; j < n && ok; ++j) {
        if ((mask >> i & 1) && (mask >> j & 1) && !adj[i][j]) ok = false;
      }
    }
    if (ok) cliques.push_back(mask);
  }
  std::vector<PointSet> out;
  for (auto c : cliques) {
    bool maximal = std::none_of(cliques.begin(), cliques.end(), [&](std::uint32_t d) { return d != c && (d & c) == c; });
    if (!maximal) continue;
    PointSet s;
    for (std::size_t i = 0; i < n; ++i) {
      if (c >> i & 1) s.push_back(i);
    }
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(PointMap, FromLabelsRejectsPartialAndDuplicate) {
  auto x = line({0, 1});
  EXPECT_THROW(PointMap::from_labels(x, x, {{"0", "0"}}), InvalidInput);
  EXPECT_THROW(PointMap::from_labels(x, x, {{"0", "0"}, {"0", "1"}, {"1", "1"}}), InvalidInput);
  EXPECT_THROW(PointMap::from_labels(x, x, {{"0", "0"}, {"1", "7"}}), InvalidInput);
  auto f = PointMap::from_labels(x, x, {{"0", "1"}, {"1", "1"}});
  EXPECT_EQ(f(0), 1u);
}

TEST(PointMap, FileRoundTrip) {
  auto f = doubling(3);
  auto text = format_map(f, "a.txt", "b.txt");
  auto file = parse_map_file("# comment\n" + text);
  EXPECT_EQ(file.source_path, "a.txt");
  EXPECT_EQ(file.target_path, "b.txt");
  auto g = PointMap::from_labels(f.source(), f.target(), file.pairs);
  EXPECT_EQ(g.image(), f.image());
  EXPECT_THROW(parse_map_file("mapping a b\n"), InvalidInput);
  EXPECT_THROW(parse_map_file("map a b\n0 1\n"), InvalidInput);
}

TEST(Embedding, IdentityIsIsometric) {
  auto x = random_metric(3, 8);
  auto w = verify_embedding(PointMap::identity(x), ControlFunction::identity(), ControlFunction::identity());
  EXPECT_TRUE(w.verified);
  EXPECT_FALSE(w.failure);
}

TEST(Embedding, DoublingNeedsUpperTwoX) {
  auto f = doubling(5);
  EXPECT_TRUE(verify_embedding(f, ControlFunction::identity(), ControlFunction::linear(2)).verified);
  auto w = verify_embedding(f, ControlFunction::identity(), ControlFunction::identity());
  ASSERT_TRUE(w.failure);
  EXPECT_EQ(w.failure->side, EmbeddingFailure::Side::upper);
  EXPECT_EQ(w.failure->x, 0u);
  EXPECT_EQ(w.failure->y, 1u);
}

TEST(Embedding, ConstantMapFailsLower) {
  auto x = line({0, 3});
  auto w = verify_embedding(constant_map(x), ControlFunction::identity(), ControlFunction::identity());
  ASSERT_TRUE(w.failure);
  EXPECT_EQ(w.failure->side, EmbeddingFailure::Side::lower);
  EXPECT_EQ(w.failure->bound, q(3));
  EXPECT_EQ(w.failure->image_distance, q(0));
  EXPECT_NE(w.failure->describe(constant_map(x)).find("lower"), std::string::npos);
}

TEST(Embedding, VerifiedMeansNoPairViolates) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto x = random_metric(trial, 7);
    auto y = random_metric(trial + 100, 5);
    std::vector<std::size_t> image(x.size());
    for (auto& v : image) v = bounded_draw(rng, y.size());
    PointMap f(x, y, image);
    auto lo = ControlFunction::linear(make_rational(1, 1 + static_cast<long>(trial % 5)));
    auto hi = ControlFunction::linear(1 + trial % 4);
    auto w = verify_embedding(f, lo, hi);
    bool any = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (i == j) continue;
        const auto& d = x.distance(i, j);
        const auto& e = y.distance(image[i], image[j]);
        any = any || lo.evaluate(d) > e || e > hi.evaluate(d);
      }
    }
    EXPECT_EQ(w.verified, !any) << trial;
  }
}

TEST(Pullback, IdentityReproducesCover) {
  auto x = line({0, 1, 2, 5, 6});
  ColoredCover u(x, 2, {{{0, 1, 2}, 0}, {{2, 3}, 1}, {{3, 4}, 0}});
  auto w = verify_embedding(PointMap::identity(x), ControlFunction::identity(), ControlFunction::identity());
  auto pb = pullback_cover(PointMap::identity(x), u, {w, q(1)});
  ASSERT_EQ(pb.cover.pieces().size(), u.pieces().size());
  for (std::size_t k = 0; k < u.pieces().size(); ++k) {
    EXPECT_EQ(pb.cover.pieces()[k].points, u.pieces()[k].points);
    EXPECT_EQ(pb.cover.pieces()[k].color, u.pieces()[k].color);
  }
  EXPECT_EQ(pb.report.source_multiplicity, pb.report.target_multiplicity);
  EXPECT_EQ(pb.report.source_lebesgue, pb.report.target_lebesgue);
  EXPECT_EQ(pb.report.source_bound, pb.report.target_bound);
  EXPECT_TRUE(pb.report.ok());
}

TEST(Pullback, DoublingHalvesTheBound) {
  auto f = doubling(6);  // 0..5 onto 0, 2, .., 10
  ColoredCover u(f.target(), 2, {{{0, 1, 2}, 0}, {{2, 3, 4}, 1}, {{4, 5}, 0}});
  ASSERT_EQ(u.bound(), q(4));
  auto w = verify_embedding(f, ControlFunction::linear(2), ControlFunction::linear(2));
  ASSERT_TRUE(w.verified);
  auto pb = pullback_cover(f, u, {w, std::nullopt});
  EXPECT_TRUE(pb.report.bound_checked);
  ASSERT_TRUE(pb.report.inverse_bound);
  EXPECT_EQ(*pb.report.inverse_bound, ExtendedRational(q(2)));
  Rational worst = 0;
  for (const auto& piece : pb.cover.pieces()) worst = std::max(worst, oracle::diameter(f.source(), piece.points));
  EXPECT_EQ(worst, q(2));
  EXPECT_EQ(pb.report.source_bound, worst);
  EXPECT_TRUE(pb.report.bound_ok);
}

TEST(Pullback, UnhitPiecesAreDropped) {
  auto x = line({0, 1});
  auto y = line({0, 10, 20});
  PointMap f(x, y, {0, 0});
  ColoredCover u(y, 1, {{{0}, 0}, {{1}, 0}, {{2}, 0}});
  auto pb = pullback_cover(f, u);
  ASSERT_EQ(pb.cover.pieces().size(), 1u);
  EXPECT_EQ(pb.cover.pieces()[0].points, (PointSet{0, 1}));
  EXPECT_FALSE(pb.report.bound_checked);
  EXPECT_TRUE(pb.report.ok());
}

TEST(Pullback, LebesgueTransfer) {
  auto f = doubling(7);
  ColoredCover u(f.target(), 2, {{{0, 1, 2, 3}, 0}, {{2, 3, 4, 5, 6}, 1}});
  auto w = verify_embedding(f, ControlFunction::linear(2), ControlFunction::linear(2));
  auto pb = pullback_cover(f, u, {w, q(1)});
  EXPECT_TRUE(pb.report.lebesgue_checked);
  EXPECT_EQ(pb.report.required_target_lebesgue, q(2));
  EXPECT_TRUE(pb.report.lebesgue_premise);
  EXPECT_GE(pb.report.source_lebesgue, ExtendedRational(q(1)));
  EXPECT_TRUE(pb.report.ok());
}

TEST(Ultrametrize, UltrametricInputIsFixed) {
  auto x = random_ultrametric(4, 20, 4, {true});
  auto [du, rep] = ultrametrize(x);
  EXPECT_TRUE(rep.ok());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) EXPECT_EQ(du.distance(i, j), x.distance(i, j));
  }
}

TEST(Ultrametrize, LineCollapsesToOne) {
  auto x = line({0, 1, 2});
  auto [du, rep] = ultrametrize(x);
  EXPECT_EQ(du.distance(0, 2), q(1));
  EXPECT_EQ(d0_bound(x, q(1)), q(2));
  EXPECT_TRUE(rep.ok());
}

TEST(Ultrametrize, CounterexampleBlocks) {
  const auto [x, b] = counterexample_space(ControlFunction::parse("piece(1,inf; 1,2,0)"), 2);
  auto [du, rep] = ultrametrize(x);
  auto i0 = *x.index_of("0"), i4 = *x.index_of("4");
  EXPECT_EQ(du.distance(i0, i4), q(2));
  EXPECT_EQ(x.distance(i0, i4), q(4));
  EXPECT_EQ(d0_bound(x, q(2)), q(4));
  EXPECT_TRUE(rep.ok());
}

TEST(Ultrametrize, MatchesBottleneckOracle) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto x = random_metric(seed, 3 + seed % 12, 20);
    auto [du, rep] = ultrametrize(x);
    auto oracle_du = minimax(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) ASSERT_EQ(du.distance(i, j), oracle_du[i][j]) << seed;
    }
    EXPECT_TRUE(rep.ok()) << seed;
    EXPECT_TRUE(du.is_ultrametric());
    EXPECT_EQ(du.distinct_distances().size(), [&] {
      std::set<Rational> s;
      for (const auto& row : oracle_du) {
        for (const auto& v : row) {
          if (sgn(v) > 0) s.insert(v);
        }
      }
      return s.size();
    }());
  }
}

TEST(LOmega, PowersOfThreeEmbedIsometrically) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto x = random_ultrametric(seed, 16, 4);
    auto e = embed_lomega(x);
    EXPECT_TRUE(e.certified);
    EXPECT_EQ(e.c1, q(1));
    EXPECT_EQ(e.c2, q(1));
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) EXPECT_EQ(e.map.image_distance(i, j), x.distance(i, j));
    }
  }
}

TEST(LOmega, SinglePoint) {
  auto e = embed_lomega(FiniteMetricSpace());
  EXPECT_TRUE(e.certified);
  EXPECT_EQ(e.map.target().size(), 1u);
}

TEST(LOmega, JitteredDistortionBelowThree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto x = random_ultrametric(seed, 16, 5, {true});
    auto e = embed_lomega(x);
    EXPECT_TRUE(e.certified) << seed;
    EXPECT_LE(e.c2, 3 * e.c1);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        const auto& dl = e.map.image_distance(i, j);
        EXPECT_TRUE(is_power_of_three(dl));
        EXPECT_GE(dl, x.distance(i, j));
        EXPECT_LT(dl, 3 * x.distance(i, j));
      }
    }
  }
}

TEST(LOmega, FractionalDistances) {
  auto x = perturb_min(random_ultrametric(2, 10, 4), q(1, 10));
  ASSERT_TRUE(x.is_ultrametric());
  auto e = embed_lomega(x);
  EXPECT_TRUE(e.certified);
}

TEST(LOmega, RejectsNonUltrametric) { EXPECT_THROW(embed_lomega(line({0, 1, 2})), InvalidInput); }

TEST(Cliques, MatchBruteForce) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + bounded_draw(rng, 11);
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) adj[i][j] = adj[j][i] = bounded_draw(rng, 3) != 0;
    }
    EXPECT_EQ(maximal_cliques(adj, 100000), brute_cliques(adj)) << trial;
  }
}

TEST(Cliques, CapIsEnforced) {
  // Complement of a perfect matching on 12 vertices has 2^6 maximal cliques.
  std::vector<std::vector<char>> adj(12, std::vector<char>(12, 1));
  for (std::size_t i = 0; i < 12; ++i) {
    adj[i][i] = 0;
    adj[i][i ^ 1] = 0;
  }
  EXPECT_EQ(maximal_cliques(adj, 64).size(), 64u);
  EXPECT_THROW(maximal_cliques(adj, 63), CapExceeded);
}

TEST(MapControl, IdentityIsBoundedByR) {
  auto x = random_metric(7, 10, 6);
  for (long big_r : {1, 3, 6, 12}) {
    auto sample = map_dim_control(PointMap::identity(x), 0, q(2), q(big_r));
    EXPECT_LE(sample.value, q(big_r));
    for (const auto& sub : sample.subsets) EXPECT_LE(set_diameter(x, sub.points), q(big_r));
  }
}

TEST(MapControl, ConstantMapReducesToSolver) {
  auto x = random_metric(9, 9, 8);
  for (std::size_t m : {0, 1, 2}) {
    auto sample = map_dim_control(constant_map(x), m, q(3), q(0));
    ASSERT_EQ(sample.subsets.size(), 1u);
    EXPECT_EQ(sample.value, oracle::min_cost_coloring(x, m, q(3)).value);
  }
}

TEST(MapControl, GridProjectionStrips) {
  auto f = projection(6);
  auto sample = map_dim_control(f, 1, q(1), q(2));
  ASSERT_EQ(sample.subsets.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(sample.subsets[k].points.size(), 21u);
    PointSet columns;
    for (auto p : sample.subsets[k].points) columns.push_back(f(p));
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
    EXPECT_EQ(columns, (PointSet{k, k + 1, k + 2}));
  }
  EXPECT_EQ(sample.value, q(2));
}

TEST(MapControl, MonotoneInRAndM) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto x = random_metric(seed, 8, 6);
    auto y = random_metric(seed + 50, 5, 6);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> image(x.size());
    for (auto& v : image) v = bounded_draw(rng, y.size());
    PointMap f(x, y, image);
    Rational prev_r = -1;
    for (long big_r : {0, 2, 4, 8}) {
      auto v = map_dim_control(f, 1, q(2), q(big_r)).value;
      EXPECT_GE(v, prev_r);
      prev_r = v;
    }
    Rational prev_m = map_dim_control(f, 0, q(2), q(4)).value;
    for (std::size_t m : {1, 2}) {
      auto v = map_dim_control(f, m, q(2), q(4)).value;
      EXPECT_LE(v, prev_m);
      prev_m = v;
    }
  }
}

TEST(ExactSequence, SymbolicForms) {
  EXPECT_EQ(exact_sequence_control(ControlFunction::identity()).to_string(), "r + 4*R");
  EXPECT_EQ(exact_sequence_control(ControlFunction::linear(2)).to_string(), "2*r + 6*R");
  auto sq = exact_sequence_control(ControlFunction::monomial(1, 2));
  EXPECT_EQ(sq.to_string(), "r^2 + 4*r*R + 4*R^2 + 2*R");
  EXPECT_EQ(sq.evaluate(q(1), q(1)), q(11));
}

TEST(ExactSequence, EvaluationMatchesExpansion) {
  auto f = exact_sequence_control(ControlFunction::parse("piece(0,inf; 3,2,1)"));
  for (long r = 0; r < 5; ++r) {
    for (long big_r = 0; big_r < 5; ++big_r) {
      EXPECT_EQ(f.evaluate(q(r), q(big_r)), 3 * (r + 2 * big_r) * (r + 2 * big_r) + 1 + 2 * big_r);
    }
  }
}

TEST(ExactSequence, SlicesAreControlFunctions) {
  for (const char* text : {"id", "linear(2)", "piece(0,inf; 1,2,0)", "piece(1,inf; 1,3,0)",
                           "paste(piece(0,2; 1,1,0), 2, piece(2,inf; 3,1,-4))"}) {
    auto f = exact_sequence_control(ControlFunction::parse(text));
    for (long big_r : {0, 1, 3}) {
      auto slice = f.slice(q(big_r));
      EXPECT_TRUE(is_dim_control(slice, Scale::large).holds) << text << " R=" << big_r;
      for (long r : {2, 5, 9}) EXPECT_EQ(slice.evaluate(q(r)), f.evaluate(q(r), q(big_r))) << text;
    }
  }
  EXPECT_THROW(exact_sequence_control(ControlFunction::identity(Scale::small)), ScaleMismatch);
}

TEST(Hurewicz, IdentityMatchesTargetCover) {
  auto x = random_metric(12, 9, 6);
  auto rep = hurewicz_check(PointMap::identity(x), 0, 1, {q(1), q(3), q(5)});
  ASSERT_EQ(rep.rows.size(), 3u);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.assembled_bound, row.target_bound);
    EXPECT_TRUE(row.assembled_valid);
    EXPECT_EQ(*row.exact_bound, oracle::min_cost_coloring(x, 1, row.s).value);
  }
  EXPECT_TRUE(rep.ok());
}

TEST(Hurewicz, ConstantMapIsTheDecomposition) {
  auto x = random_metric(13, 8, 6);
  auto rep = hurewicz_check(constant_map(x), 1, 0, {q(2), q(4)});
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.dilatation, q(0));
    EXPECT_EQ(row.assembled_bound, oracle::min_cost_coloring(x, 1, row.s).value);
    EXPECT_EQ(row.assembled_bound, *row.exact_bound);
  }
  EXPECT_TRUE(rep.ok());
}

TEST(Hurewicz, GridProjectionAssembly) {
  auto f = projection(4);
  SolveOptions opt;
  opt.exact_cap = 64;
  auto rep = hurewicz_check(f, 1, 0, {q(1), q(2)}, opt);
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.assembled_valid);
    EXPECT_LE(*row.exact_bound, row.assembled_bound);
  }
  EXPECT_TRUE(rep.ok());
  auto cover = hurewicz_assembly(f, 1, 0, q(1), opt);
  EXPECT_EQ(cover.color_count(), 2u);
  EXPECT_EQ(cover.bound(), rep.rows[0].assembled_bound);
}
