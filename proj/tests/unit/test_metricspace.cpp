#include <gtest/gtest.h>

#include "scdim/errors.hpp"
#include "scdim/metricspace.hpp"

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

void expect_valid(const FiniteMetricSpace& x) {
  EXPECT_TRUE(FiniteMetricSpace::validate(x.matrix()).empty()) << x.provenance().to_string();
}

ControlFunction square() { return ControlFunction::parse("piece(1,inf; 1,2,0)"); }

}  // namespace

TEST(FromMatrix, SinglePointAndLine) {
  const auto one = FiniteMetricSpace::from_matrix({"a"}, {{q(0)}});
  EXPECT_EQ(one.size(), 1u);
  EXPECT_EQ(one.diameter(), q(0));
  const auto l = line({0, 1, 2});
  EXPECT_EQ(l.distance(0, 2), q(2));
  EXPECT_EQ(l.distinct_distances(), (std::vector<Rational>{q(1), q(2)}));
}

TEST(FromMatrix, ReportsTriangleViolation) {
  try {
    FiniteMetricSpace::from_matrix({"a", "b", "c"}, {{q(0), q(1), q(5)}, {q(1), q(0), q(1)}, {q(5), q(1), q(0)}});
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("triangle violation at (a,b,c)"), std::string::npos) << e.what();
  }
}

TEST(FromMatrix, ListsEveryViolation) {
  const auto v = FiniteMetricSpace::validate({{q(0), q(1), q(0)}, {q(2), q(0), q(1)}, {q(0), q(1), q(1)}});
  std::set<MetricViolation::Kind> kinds;
  for (const auto& x : v) kinds.insert(x.kind);
  EXPECT_TRUE(kinds.count(MetricViolation::Kind::asymmetry));
  EXPECT_TRUE(kinds.count(MetricViolation::Kind::zero_distance));
  EXPECT_TRUE(kinds.count(MetricViolation::Kind::nonzero_diagonal));
}

TEST(FromMatrix, RejectsBadShapeAndLabels) {
  EXPECT_THROW(FiniteMetricSpace::from_matrix({"a", "b"}, {{q(0), q(1)}}), InvalidInput);
  EXPECT_THROW(FiniteMetricSpace::from_matrix({"a", "a"}, {{q(0), q(1)}, {q(1), q(0)}}), InvalidInput);
  EXPECT_THROW(FiniteMetricSpace::from_matrix({"a b"}, {{q(0)}}), InvalidInput);
}

TEST(Ranks, ThresholdMatchesRationalComparison) {
  const auto x = random_metric(5, 12, 20);
  for (const Rational& s : {q(0), q(1, 2), q(3), q(7), q(100)}) {
    const auto t = x.rank_threshold(s);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = 0; j < x.size(); ++j) EXPECT_EQ(x.rank(i, j) < t, x.distance(i, j) <= s);
    }
  }
}

TEST(Counterexample, SquareBlocks) {
  const auto [x1, b1] = counterexample_space(square(), 1);
  EXPECT_EQ(b1.n, (std::vector<Rational>{q(2)}));
  EXPECT_EQ(b1.a, (std::vector<Rational>{q(0), q(4)}));
  EXPECT_EQ(b1.blocks[0], (std::vector<Rational>{q(0), q(2), q(4)}));
  EXPECT_EQ(x1.size(), 3u);

  const auto [x2, b2] = counterexample_space(square(), 2);
  EXPECT_EQ(b2.n[1], q(3));
  EXPECT_EQ(b2.a[2], q(9));
  EXPECT_EQ(b2.blocks[1], (std::vector<Rational>{q(4), q(7), q(9)}));
  EXPECT_EQ(x2.size(), 5u);
  EXPECT_EQ(x2.label(b2.block_indices[1][1]), "7");

  const auto [x5, b5] = counterexample_space(square(), 5);
  EXPECT_EQ(b5.blocks[4], (std::vector<Rational>{q(25), q(31), q(36)}));
}

TEST(Counterexample, DepthZeroIsOnePoint) {
  const auto [x, b] = counterexample_space(square(), 0);
  EXPECT_EQ(x.size(), 1u);
  EXPECT_EQ(b.a, (std::vector<Rational>{q(0)}));
}

TEST(Counterexample, BlueprintInvariants) {
  for (const char* f : {"piece(1,inf; 1,2,0)", "piece(0,inf; 3,1,1)", "piece(1,inf; 1,3,0)"}) {
    const auto fn = ControlFunction::parse(f);
    const auto [x, b] = counterexample_space(fn, 6);
    expect_valid(x);
    for (std::size_t i = 1; i <= 6; ++i) {
      EXPECT_EQ(b.a[i], fn.evaluate(b.n[i - 1])) << f;
      EXPECT_LT(b.a[i - 1] + b.n[i - 1], b.a[i]) << f;
      EXPECT_EQ(b.blocks[i - 1].front(), b.a[i - 1]);
      EXPECT_EQ(b.blocks[i - 1].back(), b.a[i]);
    }
    EXPECT_EQ(x.diameter(), b.a.back());
  }
}

TEST(Counterexample, RejectsFunctionsBelowIdentity) {
  EXPECT_THROW(counterexample_space(ControlFunction::linear(q(1, 2)), 2), PreconditionError);
}

TEST(Counterexample, CapIsReported) {
  // 2x + 0 beats a + n only once n > a, which the tiny cap forbids.
  CounterexampleOptions opts;
  opts.search_cap = 5;
  try {
    counterexample_space(ControlFunction::parse("piece(0,inf; 2,1,0)"), 6, opts);
    FAIL() << "expected CapExceeded";
  } catch (const CapExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("5"), std::string::npos);
  }
}

TEST(Grid, Examples) {
  const auto g1 = grid_box(1, 3);
  EXPECT_EQ(g1.size(), 4u);
  EXPECT_EQ(g1.distance(0, 3), q(3));
  const auto g2 = grid_box(2, 1);
  EXPECT_EQ(g2.size(), 4u);
  EXPECT_EQ(g2.distinct_distances(), (std::vector<Rational>{q(1)}));
  const auto g3 = grid_box(2, 2);
  EXPECT_EQ(g3.size(), 9u);
  EXPECT_EQ(g3.diameter(), q(2));
  expect_valid(grid_box(3, 3));
  EXPECT_THROW(grid_box(4, 1), InvalidInput);
  EXPECT_THROW(grid_box(3, 100), CapExceeded);
}

TEST(LOmega, Distances) {
  const auto x = lomega_slice(0, {{"a", {"0", "1"}}, {"b", {"1", "1"}}});
  EXPECT_EQ(x.distance(0, 1), q(1));
  const auto y = lomega_slice(-2, {{"a", {"0", "0", "0"}}, {"b", {"1", "0", "0"}}});
  EXPECT_EQ(y.distance(0, 1), q(9));
  const auto z = lomega_slice(0, {{"a", {"0", "0"}}, {"b", {"1", "0"}}, {"c", {"1", "1"}}});
  EXPECT_EQ(z.distance(0, 1), q(1));
  EXPECT_EQ(z.distance(0, 2), q(1));
  EXPECT_EQ(z.distance(1, 2), q(1, 3));
  EXPECT_TRUE(z.is_ultrametric());
  EXPECT_THROW(lomega_slice(0, {{"a", {"0"}}, {"b", {"0"}}}), InvalidInput);
}

TEST(Perturb, MinAndMax) {
  const auto l = line({0, 1, 5});
  const auto mn = perturb_min(l, q(2));
  EXPECT_EQ(mn.distance(0, 1), q(1));
  EXPECT_EQ(mn.distance(0, 2), q(2));
  EXPECT_EQ(mn.distance(1, 2), q(2));
  const auto mx = perturb_max(l, q(2));
  EXPECT_EQ(mx.distance(0, 1), q(2));
  EXPECT_EQ(mx.distance(0, 2), q(5));
  EXPECT_EQ(mx.distance(1, 2), q(4));
  EXPECT_EQ(perturb_min(l, q(5)).matrix(), l.matrix());
  EXPECT_THROW(perturb_min(l, q(0)), InvalidInput);
}

TEST(Perturb, Idempotent) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = random_metric(seed, 10, 30);
    for (const Rational& c : {q(1), q(5, 2), q(10)}) {
      EXPECT_EQ(perturb_min(perturb_min(x, c), c).matrix(), perturb_min(x, c).matrix());
      EXPECT_EQ(perturb_max(perturb_max(x, c), c).matrix(), perturb_max(x, c).matrix());
    }
  }
}

TEST(Product, Examples) {
  const auto y = line({0, 3, 4});
  const auto p1 = product(FiniteMetricSpace(), y);
  EXPECT_EQ(p1.matrix(), y.matrix());
  const auto p2 = product(line({0, 1}), line({0, 3}));
  EXPECT_EQ(p2.size(), 4u);
  EXPECT_EQ(p2.distinct_distances(), (std::vector<Rational>{q(1), q(3)}));
  EXPECT_EQ(product(grid_box(1, 4), grid_box(1, 4)).matrix(), grid_box(2, 4).matrix());
  EXPECT_THROW(product(grid_box(1, 99), grid_box(1, 99)), CapExceeded);
}

TEST(RandomUltrametric, StrongTriangle) {
  EXPECT_EQ(random_ultrametric(1, 1, 3).size(), 1u);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (bool jitter : {false, true}) {
      const auto x = random_ultrametric(seed, 15, 4, {jitter});
      expect_valid(x);
      EXPECT_TRUE(x.is_ultrametric()) << seed;
    }
  }
}

TEST(RandomUltrametric, Deterministic) {
  EXPECT_EQ(format_space(random_ultrametric(42, 20, 4, {true})), format_space(random_ultrametric(42, 20, 4, {true})));
  EXPECT_NE(format_space(random_ultrametric(42, 20, 4)), format_space(random_ultrametric(43, 20, 4)));
}

TEST(Generators, OutputsValidate) {
  expect_valid(grid_box(2, 6));
  expect_valid(product(line({0, 2, 7}), random_metric(3, 5)));
  expect_valid(random_metric(9, 30, 100));
  expect_valid(counterexample_space(square(), 8).first);
}

TEST(Subspace, KeepsDistances) {
  const auto x = random_metric(2, 10, 50);
  const auto s = x.subspace({7, 2, 4});
  EXPECT_EQ(s.label(0), x.label(7));
  EXPECT_EQ(s.distance(0, 2), x.distance(7, 4));
  for (const auto& d : s.distinct_distances()) EXPECT_GT(d, q(0));
}

TEST(SpaceText, RoundTripWithProvenance) {
  const auto g = grid_box(2, 3);
  const auto text = format_space(g);
  const auto again = parse_space(text);
  EXPECT_EQ(again.provenance().generator, "grid");
  EXPECT_EQ(again.provenance().param("side"), "3");
  EXPECT_EQ(format_space(again), text);
  const auto c = counterexample_space(square(), 3).first;
  EXPECT_EQ(format_space(parse_space(format_space(c))), format_space(c));
}

TEST(SpaceText, DecimalsAreExact) {
  const auto x = parse_space("metricspace 2\na b\n0 0.1\n1/10 0\n");
  EXPECT_EQ(x.distance(0, 1), q(1, 10));
  EXPECT_THROW(parse_space("metricspace 2\na b\n0 1\n"), InvalidInput);
  EXPECT_THROW(parse_space("space 1\na\n0\n"), InvalidInput);
}
