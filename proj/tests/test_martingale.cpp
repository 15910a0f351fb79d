// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "randwork/martingale.hpp"

using namespace randwork;

namespace {

std::vector<BitString> all_strings(std::size_t max_len) {
  std::vector<BitString> out{BitString()};
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].size() < max_len) {
      out.push_back(out[i].child(false));
      out.push_back(out[i].child(true));
    }
  return out;
}

} // namespace

TEST(SlopeMartingale, IdentityIsConstantOne) {
  for (const auto &s : all_strings(6)) {
    EXPECT_EQ(slope_martingale(identity_function(), 0, s, 8), 1);
    EXPECT_EQ(slope_martingale(identity_function(), rational(1, 3), s, 8), 1);
  }
}

TEST(SlopeMartingale, SquareAtTheRoot) {
  const auto f = square_function();
  EXPECT_EQ(slope_martingale(f, 0, BitString(), 8), 1);
  EXPECT_EQ(slope_martingale(f, 0, BitString("1"), 8), rational(3, 2));
  EXPECT_EQ(slope_martingale(f, 0, BitString("0"), 8), rational(1, 2));
}

TEST(SlopeMartingale, TablesAreFairAndNonnegative) {
  const std::vector<FunctionOracle> fixtures{
      identity_function(), square_function(),
      piecewise_linear({{Rational(0), Rational(0)}, {rational(1, 3), rational(1, 5)}, {Rational(2), Rational(1)}})};
  for (const auto &f : fixtures)
    for (const Rational &shift : {Rational(0), rational(1, 3)}) {
      const Martingale m = slope_martingale_table(f, shift, 12, 8);
      EXPECT_EQ(m.values().size(), (std::size_t{1} << 13) - 1);
      EXPECT_TRUE(m.fairness_violations().empty()) << f.name;
      EXPECT_TRUE(m.negative_nodes().empty()) << f.name;
    }
}

TEST(SlopeMartingale, MidpointIdentity) {
  const auto f = square_function();
  for (const auto &s : all_strings(5))
    EXPECT_EQ(2 * slope_martingale(f, 0, s, 8),
              slope_martingale(f, 0, s.child(false), 8) + slope_martingale(f, 0, s.child(true), 8));
}

TEST(SlopeMartingale, DecreasingFunctionGoesNegative) {
  const Martingale m = slope_martingale_table(scaled_identity(-1), 0, 3, 8);
  EXPECT_FALSE(m.negative_nodes().empty());
}

TEST(DebtFree, ScaledIdentityStaysConstant) {
  const DebtFreeResult r = debt_free_convert(scaled_identity(5), BitString(), 8);
  for (const auto &[node, v] : r.martingale.values())
    EXPECT_EQ(v, 5) << node.str();
  EXPECT_EQ(r.case1_count, 0u);
  EXPECT_TRUE(r.threshold_flags.empty());
}

TEST(DebtFree, CaseOneDoublesAndZeroes) {
  // Slope 3 on the left half, 0 on the right.
  const auto g = piecewise_linear({{Rational(0), Rational(0)}, {rational(1, 2), rational(3, 2)}, {Rational(1), rational(3, 2)}});
  const DebtFreeResult r = debt_free_convert(g, BitString(), 6);
  const Martingale &m = r.martingale;
  EXPECT_EQ(m.at(BitString()), rational(3, 2));
  EXPECT_EQ(m.at(BitString("0")), 2 * m.at(BitString()));
  for (const auto &[node, v] : m.values())
    if (BitString("1").is_prefix_of(node)) {
      EXPECT_EQ(v, 0) << node.str();
    }
  EXPECT_TRUE(m.fairness_violations().empty());
  EXPECT_TRUE(m.negative_nodes().empty());
  const CapitalTrace t = capital_trace(m, BitString("0"));
  ASSERT_EQ(t.values.size(), 2u);
  EXPECT_EQ(t.values[1].second, 2 * t.values[0].second);
  EXPECT_EQ(t.doublings, 1u);
}

TEST(DebtFree, CaseTwoUsesSlopeRatios) {
  // Slopes 4 at the root, 6 on the left half, 2 on the right half.
  const auto g = piecewise_linear({{Rational(0), Rational(0)}, {rational(1, 2), Rational(3)}, {Rational(1), Rational(4)}});
  const DebtFreeResult r = debt_free_convert(g, BitString(), 1);
  EXPECT_EQ(r.martingale.at(BitString()), 4);
  EXPECT_EQ(r.martingale.at(BitString("0")), 6);
  EXPECT_EQ(r.martingale.at(BitString("1")), 2);
  EXPECT_EQ(r.case2_count, 1u);
}

TEST(DebtFree, FlagsLowStartingSlopes) {
  const DebtFreeResult r = debt_free_convert(identity_function(), BitString(), 2);
  EXPECT_FALSE(r.threshold_flags.empty());
}

TEST(CapitalTrace, ConstantMartingaleIsFlat) {
  const Martingale m = slope_martingale_table(identity_function(), 0, 4, 8);
  const CapitalTrace t = capital_trace(m, BitString("0110"));
  EXPECT_EQ(t.values.size(), 5u);
  EXPECT_EQ(t.doublings, 0u);
  EXPECT_EQ(t.oscillation, 0);
  EXPECT_EQ(t.maximum, 1);
  EXPECT_EQ(t.csv().substr(0, 11), "node,value\n");
}

TEST(CapitalTrace, ZeroedBranchTrailsZeros) {
  const auto g = piecewise_linear({{Rational(0), Rational(0)}, {rational(1, 2), rational(3, 2)}, {Rational(1), rational(3, 2)}});
  const CapitalTrace t = capital_trace(debt_free_convert(g, BitString(), 4).martingale, BitString("1011"));
  for (std::size_t k = 1; k < t.values.size(); ++k)
    EXPECT_EQ(t.values[k].second, 0);
}

TEST(CapitalTrace, PathMustExtendBase) {
  Martingale m(BitString("1"));
  m.set(BitString("1"), 1);
  EXPECT_THROW(capital_trace(m, BitString("0")), IndexError);
}

TEST(SteepStrings, StepFunctionMeasure) {
  // A steep ramp of rise 1 over [1/2, 1/2 + 2^-10].
  const auto f = piecewise_linear({{Rational(0), Rational(0)}, {rational(1, 2), Rational(0)},
                                   {rational(1, 2) + pow2(-10), Rational(1)}, {Rational(1), Rational(1)}});
  for (long r = 0; r <= 8; ++r)
    for (std::size_t n = 1; n <= 12; ++n)
      EXPECT_LE(antichain_measure(steep_strings(f, r, n)), pow2(-r)) << r << " " << n;
}
