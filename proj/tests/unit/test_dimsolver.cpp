#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "scdim/dimsolver.hpp"
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

ControlFunction square() { return ControlFunction::parse("piece(1,inf; 1,2,0)"); }

PointSet all_points(const FiniteMetricSpace& x) {
  PointSet a(x.size());
  std::iota(a.begin(), a.end(), 0);
  return a;
}

}  // namespace

TEST(D0Bound, CounterexampleBlocks) {
  const auto [x, bp] = counterexample_space(square(), 2);
  EXPECT_EQ(d0_bound(x, q(2)), q(4));
  Rational oracle_max = 0;
  for (const auto& comp : oracle::components(x, all_points(x), q(2))) {
    oracle_max = std::max(oracle_max, oracle::diameter(x, comp));
  }
  EXPECT_EQ(oracle_max, q(4));
}

TEST(D0Bound, UltrametricComponentsAreSmall) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = random_ultrametric(seed, 20, 4, {seed % 2 == 1});
    for (const auto& s : x.distinct_distances()) EXPECT_LE(d0_bound(x, s), s);
  }
}

TEST(D0Bound, LargeScaleGivesDiameter) {
  const auto x = random_metric(4, 12, 9);
  EXPECT_EQ(d0_bound(x, x.diameter()), x.diameter());
  EXPECT_EQ(d0_bound(x, x.diameter() * 5), x.diameter());
}

TEST(ExactDn, LineExamples) {
  const auto x = line({0, 1, 2, 3});
  const auto two = exact_dn(x, 1, q(1));
  EXPECT_EQ(two.bound, q(0));
  EXPECT_EQ(two.colors, (std::vector<std::size_t>{0, 1, 0, 1}));
  EXPECT_EQ(two.method, SolveMethod::exact);
  EXPECT_EQ(exact_dn(x, 0, q(1)).bound, q(3));
  EXPECT_EQ(exact_dn(x, 3, q(3)).bound, q(0));
}

TEST(ExactDn, SizeCap) {
  SolveOptions opts;
  opts.exact_cap = 5;
  EXPECT_THROW(exact_dn(line({0, 1, 2, 3, 4, 5}), 1, q(1), opts), CapExceeded);
}

TEST(ExactDn, NodeBudget) {
  SolveOptions opts;
  opts.node_budget = 3;
  EXPECT_THROW(exact_dn(random_metric(1, 10, 5), 2, q(2), opts), CapExceeded);
}

TEST(ExactDn, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t size = 3 + bounded_draw(rng, 6);
    const auto x = random_metric(rng(), size, 1 + bounded_draw(rng, 8));
    const auto scales = x.distinct_distances();
    for (std::size_t n : {1u, 2u}) {
      const auto& s = scales[bounded_draw(rng, scales.size())];
      const auto got = exact_dn(x, n, s);
      const auto want = oracle::min_cost_coloring(x, n, s);
      EXPECT_EQ(got.bound, want.value) << trial;
      EXPECT_EQ(got.colors, want.colors) << trial;
      EXPECT_EQ(oracle::coloring_cost(x, got.colors, n + 1, s), got.bound);
    }
  }
}

TEST(ExactDn, OneColorEqualsD0) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = random_metric(seed, 12, 10);
    for (const auto& s : x.distinct_distances()) EXPECT_EQ(exact_dn(x, 0, s).bound, d0_bound(x, s));
  }
}

TEST(ExactDn, MonotoneInScaleAndColors) {
  const auto x = random_metric(17, 11, 12);
  const auto scales = x.distinct_distances();
  for (std::size_t n = 0; n < 3; ++n) {
    Rational prev = 0;
    for (const auto& s : scales) {
      const auto b = exact_dn(x, n, s).bound;
      EXPECT_GE(b, prev);
      prev = b;
      if (n > 0) EXPECT_LE(b, exact_dn(x, n - 1, s).bound);
    }
  }
}

TEST(ExactDn, RestrictionMonotone) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_metric(rng(), 12, 9);
    PointSet a;
    for (std::size_t p = 0; p < x.size(); ++p) {
      if (bounded_draw(rng, 2)) a.push_back(p);
    }
    if (a.empty()) continue;
    const auto sub = x.subspace(a);
    for (const auto& s : {q(2), q(4), q(6)}) {
      const auto whole = exact_dn(x, 1, s);
      EXPECT_LE(exact_dn(sub, 1, s).bound, whole.bound);
      // The restriction of the optimal cover is a cover of A with no larger bound.
      std::vector<std::size_t> restricted;
      for (auto p : a) restricted.push_back(whole.colors[p]);
      EXPECT_LE(coloring_bound(sub, restricted, 2, s), whole.bound);
    }
  }
}

TEST(ExactDn, GridAtFullScale) {
  SolveOptions opts;
  opts.exact_cap = 64;
  const auto x = grid_box(2, 6);
  const auto r = exact_dn(x, 1, q(6), opts);
  EXPECT_EQ(r.bound, q(6));
}

TEST(HeuristicDn, NeverBeatsExact) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto x = random_metric(seed, 10, 7);
    for (const auto& s : {q(1), q(3), q(5)}) {
      for (std::size_t n : {0u, 1u, 2u}) {
        const auto h = heuristic_dn(x, n, s, {24, 1000000, seed});
        EXPECT_GE(h.bound, exact_dn(x, n, s).bound);
        EXPECT_TRUE(report(h.cover, s).all_disjoint());
      }
    }
  }
}

TEST(HeuristicDn, OneColorLineIsExact) {
  const auto x = grid_box(1, 30);
  for (const auto& s : {q(1), q(2), q(7)}) EXPECT_EQ(heuristic_dn(x, 0, s).bound, d0_bound(x, s));
}

TEST(HeuristicDn, BrickBoundOnGrid) {
  // Bricks of 2 x 6 points: diameter 3S - 1 = 5 for S = 2.
  const auto x = grid_box(2, 16);
  const auto r = heuristic_dn(x, 2, q(2));
  EXPECT_EQ(r.bound, q(5));
  EXPECT_TRUE(report(r.cover, q(2)).all_disjoint());
  const auto slab = heuristic_dn(grid_box(1, 40), 1, q(3));
  EXPECT_EQ(slab.bound, q(2));
}

TEST(HeuristicDn, Deterministic) {
  const auto x = random_metric(3, 40, 20);
  EXPECT_EQ(heuristic_dn(x, 2, q(4), {24, 1, 9}).colors, heuristic_dn(x, 2, q(4), {24, 1, 9}).colors);
}

TEST(Profile, UltrametricIsLinearOne) {
  const auto x = random_ultrametric(8, 30, 5, {true});
  const auto p = profile(x, 0, auto_scales(x));
  for (const auto& s : p.samples) EXPECT_LE(s.bound, s.s);
  EXPECT_EQ(classify_linear(p).to_string(), "Linear(1)");
}

TEST(Profile, CounterexampleSamplesAreBlockEnds) {
  const auto [x, bp] = counterexample_space(square(), 4);
  const auto p = profile(x, 0, bp.n);
  ASSERT_EQ(p.samples.size(), 4u);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(p.samples[j].bound, bp.a[j + 1]);
  EXPECT_EQ(p.samples[0].bound, q(4));
  EXPECT_EQ(p.samples[1].bound, q(9));
}

TEST(Profile, SinglePointIsZero) {
  const auto p = profile(FiniteMetricSpace(), 1, {q(1), q(2), q(3)});
  for (const auto& s : p.samples) EXPECT_EQ(s.bound, q(0));
}

TEST(Profile, FallsBackAboveCap) {
  SolveOptions opts;
  opts.exact_cap = 4;
  const auto p = profile(grid_box(1, 6), 1, {q(1), q(2)}, opts);
  EXPECT_EQ(p.samples[0].method, SolveMethod::heuristic);
  EXPECT_EQ(p.samples[0].status, "size_cap");
  EXPECT_THROW(profile(grid_box(1, 3), 0, {q(2), q(1)}), InvalidInput);
}

TEST(Profile, CsvRoundTrip) {
  const auto x = grid_box(1, 3);
  const auto p = profile(x, 0, auto_scales(x));
  const auto csv = format_profile_csv(p);
  EXPECT_NE(csv.find("s,n,bound,method,status\n1,0,3,exact,ok\n2,0,3,exact,ok\n3,0,3,exact,ok\n"), std::string::npos);
  EXPECT_EQ(format_profile_csv(parse_profile_csv(csv)), csv);
  EXPECT_THROW(parse_profile_csv("a,b\n"), InvalidInput);
}

TEST(Classify, ZeroProfileAndTooFewSamples) {
  DimensionProfile p;
  for (int s = 1; s <= 4; ++s) p.samples.push_back({q(s), q(0)});
  EXPECT_EQ(classify_linear(p).to_string(), "Linear(1)");
  p.samples.resize(2);
  EXPECT_THROW(classify_linear(p), InvalidInput);
}

TEST(Classify, NotDominatedNeedsViolationAtTheCap) {
  DimensionProfile p;
  for (long s : {10, 20, 40, 80}) p.samples.push_back({q(s), q(s * s)});
  const auto v = classify_linear(p);
  EXPECT_EQ(v.kind, GrowthVerdict::Kind::not_dominated);
  EXPECT_EQ(v.evidence, (std::vector<Rational>{q(80)}));
  ClassifyOptions wide;
  wide.linear_cap = 128;
  EXPECT_EQ(classify_linear(p, wide).to_string(), "Linear(128)");
  wide.tail_size = 4;
  wide.linear_cap = 1024;
  EXPECT_EQ(classify_linear(p, wide).to_string(), "Linear(128)");
}

TEST(Classify, PowerAndFunction) {
  DimensionProfile p;
  for (long s : {2, 4, 8, 16}) p.samples.push_back({q(s), q(3 * s * s)});
  const auto v = classify_power(p);
  ASSERT_EQ(v.kind, GrowthVerdict::Kind::power);
  EXPECT_NEAR(v.exponent, 2.0, 1e-9);
  EXPECT_EQ(v.constant, q(3));
  EXPECT_EQ(classify_against(p, ControlFunction::parse("piece(1,inf; 3,2,0)")).kind, GrowthVerdict::Kind::dominated);
  EXPECT_EQ(classify_against(p, square()).kind, GrowthVerdict::Kind::not_dominated);
}

TEST(UnionMax, Properties) {
  const auto x = random_metric(12, 10, 9);
  const auto all = all_points(x);
  const auto same = verify_union_max(x, all, {}, 1, {q(2), q(4)});
  EXPECT_TRUE(same.holds());
  for (const auto& r : same.rows) EXPECT_EQ(r.a, r.x);

  // Two far-apart blocks: D_n of the union is the max of the parts at small s.
  const auto blocks = line({0, 1, 2, 3, 100, 102, 104});
  const auto rep = verify_union_max(blocks, {0, 1, 2, 3}, {4, 5, 6}, 0, {q(1), q(2)});
  EXPECT_TRUE(rep.holds());
  for (const auto& r : rep.rows) EXPECT_EQ(r.gap, q(0));
  EXPECT_THROW(verify_union_max(blocks, {0, 1}, {2}, 0, {q(1)}), InvalidInput);
}
