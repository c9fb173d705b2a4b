#include <gtest/gtest.h>

#include "scdim/errors.hpp"
#include "scdim/rational.hpp"

using namespace scdim;

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
  EXPECT_EQ(parse_rational("3/6"), make_rational(1, 2));
  EXPECT_EQ(parse_rational("-7"), make_rational(-7));
  EXPECT_EQ(parse_rational("1.25"), make_rational(5, 4));
  EXPECT_EQ(parse_rational("-.5"), make_rational(-1, 2));
  EXPECT_EQ(parse_rational(" 2/ 4 "), make_rational(1, 2));
}

TEST(Rational, RejectsMalformedText) {
  EXPECT_THROW(parse_rational(""), InvalidInput);
  EXPECT_THROW(parse_rational("1/0"), InvalidInput);
  EXPECT_THROW(parse_rational("abc"), InvalidInput);
  EXPECT_THROW(parse_rational("1.2.3"), InvalidInput);
}

TEST(Rational, RendersCanonically) {
  EXPECT_EQ(to_string(make_rational(6, 4)), "3/2");
  EXPECT_EQ(to_string(make_rational(-4, 2)), "-2");
  EXPECT_EQ(to_string(ExtendedRational::infinity()), "inf");
}

TEST(Rational, PowersOfThree) {
  EXPECT_EQ(pow3(2), make_rational(9));
  EXPECT_EQ(pow3(-2), make_rational(1, 9));
  EXPECT_EQ(ceil_log3(make_rational(9)), 2);
  EXPECT_EQ(ceil_log3(make_rational(10)), 3);
  EXPECT_EQ(ceil_log3(make_rational(1, 3)), -1);
  EXPECT_EQ(ceil_log3(make_rational(1, 4)), -1);
  EXPECT_EQ(ceil_log3(make_rational(1, 10)), -2);
}

TEST(Rational, RootBoundsBracketTheRealRoot) {
  EXPECT_EQ(root_upper_bound(make_rational(9, 4), 2), make_rational(3, 2));
  EXPECT_EQ(root_upper_bound(make_rational(10), 2), make_rational(4));
  EXPECT_EQ(root_lower_bound(make_rational(10), 2), make_rational(3));
  EXPECT_EQ(root_upper_bound(make_rational(1, 2), 3), make_rational(1));
  EXPECT_EQ(root_lower_bound(make_rational(1, 2), 3), make_rational(0));
  for (long v = 1; v < 200; ++v) {
    for (std::uint64_t n = 1; n < 5; ++n) {
      const Rational value = make_rational(v, 7);
      EXPECT_GE(pow(root_upper_bound(value, n), n), value);
      EXPECT_LE(pow(root_lower_bound(value, n), n), value);
    }
  }
}

TEST(Rational, ExtendedOrdering) {
  const ExtendedRational inf = ExtendedRational::infinity();
  EXPECT_LT(ExtendedRational(make_rational(5)), inf);
  EXPECT_EQ(inf, ExtendedRational::infinity());
  EXPECT_GT(ExtendedRational(make_rational(5)), ExtendedRational(make_rational(4)));
}

TEST(Rational, BoundedPowerRefusesHugeResults) {
  EXPECT_EQ(pow_bounded(make_rational(2), 10), make_rational(1024));
  EXPECT_EQ(pow_bounded(make_rational(1), UINT64_MAX), make_rational(1));
  EXPECT_THROW(pow_bounded(make_rational(3), std::uint64_t{1} << 40), CapExceeded);
}
