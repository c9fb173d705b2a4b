#include <gtest/gtest.h>

#include "scdim/polynomial.hpp"

using namespace scdim;

namespace {

SparsePolynomial poly(std::initializer_list<std::pair<std::uint64_t, long>> terms) {
  SparsePolynomial p;
  for (const auto& [e, c] : terms) p = p + SparsePolynomial::monomial(make_rational(c), e);
  return p;
}

}  // namespace

TEST(Polynomial, ArithmeticDropsZeroTerms) {
  const auto p = poly({{2, 1}, {1, -3}});
  const auto q = poly({{1, 3}, {0, 5}});
  EXPECT_EQ(p + q, poly({{2, 1}, {0, 5}}));
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ(p.evaluate(make_rational(4)), make_rational(4));
}

TEST(Polynomial, ComposeAndPower) {
  const auto sq = poly({{2, 1}});
  const auto shifted = poly({{1, 1}, {0, 1}});
  auto c = sq.compose(shifted, {});
  ASSERT_TRUE(c);
  EXPECT_EQ(*c, poly({{2, 1}, {1, 2}, {0, 1}}));
  auto big = sq.power(std::uint64_t{1} << 40, {});
  ASSERT_TRUE(big);
  EXPECT_EQ(big->degree(), std::uint64_t{1} << 41);
  EXPECT_FALSE(shifted.power(100000, {}).has_value());
}

TEST(Polynomial, ThresholdsAreCertified) {
  // x^2 - 100x >= 0 exactly from 100 on.
  EXPECT_EQ(threshold_nonnegative(poly({{2, 1}, {1, -100}})), make_rational(100));
  EXPECT_EQ(threshold_nonnegative(poly({{2, 1}, {0, 5}})), make_rational(0));
  for (long k = 1; k < 30; ++k) {
    const auto p = poly({{3, 2}, {2, -k}, {0, -3 * k}});
    const Rational t = threshold_nonnegative(p);
    for (long step = 0; step < 20; ++step) EXPECT_GE(p.evaluate(t + make_rational(step, 3)), 0);
    const Rational s = threshold_positive(p);
    for (long step = 0; step < 20; ++step) EXPECT_GT(p.evaluate(s + make_rational(step, 3)), 0);
  }
}

TEST(Polynomial, RadiiAreCertified) {
  for (long k = 1; k < 30; ++k) {
    const auto p = poly({{1, 1}, {2, -k}, {5, -1}});
    const Rational r = radius_nonnegative(p);
    EXPECT_GT(r, 0);
    for (long step = 0; step <= 32; ++step) EXPECT_GE(p.evaluate(r * make_rational(step, 32)), 0);
    const Rational s = radius_positive(p);
    for (long step = 1; step <= 32; ++step) EXPECT_GT(p.evaluate(s * make_rational(step, 32)), 0);
  }
}

TEST(Polynomial, PieceFormDetection) {
  auto form = poly({{3, 2}, {0, -1}}).as_piece_form();
  ASSERT_TRUE(form);
  EXPECT_EQ(form->a, make_rational(2));
  EXPECT_EQ(form->p, 3u);
  EXPECT_EQ(form->b, make_rational(-1));
  EXPECT_FALSE(poly({{3, 1}, {1, 1}}).as_piece_form());
}
