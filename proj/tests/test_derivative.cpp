// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "randwork/derivative.hpp"

using namespace randwork;

namespace {

std::vector<Rational> dyadic_scales(unsigned from, unsigned to) {
  std::vector<Rational> out;
  for (unsigned k = from; k <= to; ++k)
    out.push_back(pow2(-static_cast<long>(k)));
  return out;
}

} // namespace

TEST(SlopeWindow, Identity) {
  const SlopeBounds b = slope_window_bounds(identity_function(), {rational(1, 3), rational(1, 4), 6});
  EXPECT_EQ(b.lo, 1);
  EXPECT_EQ(b.hi, 1);
}

TEST(SlopeWindow, SquareOnCoarseGrid) {
  const SlopeBounds b = slope_window_bounds(square_function(), {rational(1, 2), rational(1, 2), 2});
  EXPECT_EQ(b.lo, rational(3, 4));
  EXPECT_EQ(b.hi, rational(5, 4));
  EXPECT_EQ(b.pairs, 3u);
}

TEST(SlopeWindow, KinkSeesBothSides) {
  const SlopeBounds b = slope_window_bounds(kink_function(rational(1, 2)), {rational(1, 2), rational(1, 4), 6});
  EXPECT_LE(b.lo, -1);
  EXPECT_GE(b.hi, 1);
}

TEST(SlopeWindow, RefinementWidens) {
  const auto f = square_function();
  SlopeBounds prev = slope_window_bounds(f, {rational(1, 3), rational(1, 4), 3});
  for (unsigned long g = 4; g <= 8; ++g) {
    const SlopeBounds b = slope_window_bounds(f, {rational(1, 3), rational(1, 4), g});
    EXPECT_LE(b.lo, prev.lo);
    EXPECT_GE(b.hi, prev.hi);
    EXPECT_LE(b.lo, b.hi);
    prev = b;
  }
}

TEST(SlopeWindow, EmptyGrid) {
  EXPECT_THROW(slope_window_bounds(identity_function(), {rational(1, 2), rational(1, 8), 1}), Error);
}

TEST(Denjoy, SquareConvergesToDerivative) {
  const DenjoyReport r = denjoy_probe(square_function(), rational(1, 3), dyadic_scales(1, 8));
  EXPECT_EQ(r.trend, DenjoyTrend::converging);
  EXPECT_LE(abs_of(r.estimate - rational(2, 3)), pow2(-7));
}

TEST(Denjoy, IdentityConverges) {
  const DenjoyReport r = denjoy_probe(identity_function(), rational(1, 5), dyadic_scales(1, 6));
  EXPECT_EQ(r.trend, DenjoyTrend::converging);
  EXPECT_EQ(r.estimate, 1);
  for (const auto &b : r.bounds) {
    EXPECT_EQ(b.lo, 1);
    EXPECT_EQ(b.hi, 1);
  }
}

TEST(Denjoy, OscillatorDivergesBothWays) {
  const unsigned scales = 8;
  const FunctionOracle f = oscillator_function(rational(1, 2), scales + DenjoyConfig{}.extra_resolution + 2);
  const DenjoyReport r = denjoy_probe(f, rational(1, 2), dyadic_scales(1, scales));
  EXPECT_EQ(r.trend, DenjoyTrend::two_sided_diverging) << to_string(r.trend);
}

TEST(Denjoy, ScalesMustDecrease) {
  EXPECT_THROW(denjoy_probe(identity_function(), rational(1, 2), {rational(1, 4), rational(1, 2)}), Error);
}

TEST(SlopeGap, IdentityHasNoGap) {
  const SlopeGap g = two_sided_slope_gap(identity_function(), rational(1, 2), pow2(-4), rational(1, 8), 6);
  EXPECT_EQ(g.gap, 0);
  EXPECT_TRUE(g.one_sided_within);
}

TEST(SlopeGap, SquareWithinDelta) {
  const SlopeGap g = two_sided_slope_gap(square_function(), rational(1, 2), rational(1, 4), rational(1, 8), 7);
  EXPECT_LE(g.gap, rational(1, 8));
  EXPECT_TRUE(g.one_sided_within);
  EXPECT_LE(g.gap, g.one_sided_gap);
}

TEST(SlopeGap, KinkStaysNearTwo) {
  for (unsigned d = 3; d <= 8; ++d) {
    const SlopeGap g = two_sided_slope_gap(kink_function(rational(1, 2)), rational(1, 2), rational(1, 4),
                                           pow2(-static_cast<long>(d)), d + 4);
    EXPECT_GE(g.gap, rational(3, 2));
    EXPECT_LE(g.gap, 2);
    EXPECT_FALSE(g.one_sided_within);
  }
}

TEST(PiClassSup, WholeIntervalIdentity) {
  PiClass whole("whole");
  std::optional<Dyadic> prev;
  for (unsigned long n = 0; n <= 10; ++n) {
    auto v = pi_class_sup(identity_function(), whole, n, 0);
    ASSERT_TRUE(v);
    EXPECT_GE(v->value(), 1);
    if (prev) {
      EXPECT_LE(v->value(), prev->value());
    }
    prev = v;
  }
  EXPECT_LE(prev->value(), 1 + pow2(-8));
}

TEST(PiClassSup, RemovedRightHalf) {
  PiClass e("left-half");
  e.remove_interval(rational(1, 2), Rational(2), 3);
  EXPECT_GE(pi_class_sup(identity_function(), e, 10, 2)->value(), 1);
  const auto after = pi_class_sup(identity_function(), e, 10, 3);
  ASSERT_TRUE(after);
  EXPECT_GE(after->value(), rational(1, 2));
  EXPECT_LE(after->value(), rational(1, 2) + pow2(-8));
}

TEST(PiClassSup, MonotoneInPrecisionAndStage) {
  const PiClass e = middle_thirds_class(5);
  const auto f = square_function();
  for (unsigned long n = 0; n < 8; ++n)
    for (std::size_t s = 0; s < 5; ++s) {
      const auto here = pi_class_sup(f, e, n, s), next = pi_class_sup(f, e, n + 1, s + 1);
      ASSERT_TRUE(here && next);
      EXPECT_LE(next->value(), here->value());
      const auto lo = pi_class_inf(f, e, n, s), lo_next = pi_class_inf(f, e, n + 1, s + 1);
      ASSERT_TRUE(lo && lo_next);
      EXPECT_GE(lo_next->value(), lo->value());
      EXPECT_LE(lo->value(), here->value());
    }
}

TEST(PiClassSup, EmptyClassReported) {
  PiClass e("empty");
  e.remove_interval(Rational(-1), Rational(2), 0);
  EXPECT_FALSE(pi_class_sup(identity_function(), e, 4, 0));
}

TEST(MonotoneExtension, IdentityOnWholeInterval) {
  PiClass whole("whole");
  for (unsigned long n = 1; n <= 8; ++n)
    for (int k = 0; k <= 8; ++k) {
      const Rational x = rational(k, 8);
      EXPECT_LT(abs_of(monotone_extension(identity_function(), whole, x, n, 0).value() - x), pow2(-static_cast<long>(n)));
    }
}

TEST(MonotoneExtension, BridgesTheEndpoints) {
  PiClass ends("ends");
  ends.remove_interval(Rational(0), Rational(1), 0);
  MonotoneExtension ext(identity_function(), ends, 0);
  for (unsigned long n = 1; n <= 8; ++n)
    for (int k = 0; k <= 16; ++k) {
      const Rational x = rational(k, 16);
      EXPECT_LT(abs_of(ext.value(x, n).value() - x), pow2(-static_cast<long>(n)));
    }
}

TEST(MonotoneExtension, TwoPlateaus) {
  PiClass e("quarters");
  e.remove_interval(rational(1, 4), rational(3, 4), 0);
  MonotoneExtension ext(identity_function(), e, 0);
  for (unsigned long n = 1; n <= 8; ++n) {
    const Rational eps = pow2(-static_cast<long>(n));
    const Rational mid = ext.value(rational(1, 2), n).value();
    EXPECT_GE(mid, rational(1, 4) - eps);
    EXPECT_LE(mid, rational(3, 4) + eps);
    Rational prev = -1;
    for (int k = 0; k <= 32; ++k) {
      const Rational v = ext.value(rational(k, 32), n).value();
      EXPECT_GE(v, prev);
      prev = v;
    }
    // Consecutive precision levels agree to within 2^-n+1.
    for (int k = 0; k <= 32; ++k)
      EXPECT_LT(abs_of(ext.value(rational(k, 32), n + 1).value() - ext.value(rational(k, 32), n).value()), 2 * eps);
  }
}

TEST(Porosity, WholeIntervalHasNoHoles) {
  PiClass whole("whole");
  for (const auto &[alpha, w] : porosity_probe(whole, rational(1, 2), rational(1, 4), dyadic_scales(1, 6), 0))
    EXPECT_FALSE(w);
}

TEST(Porosity, HoleNextToIsolatedZero) {
  PiClass e("zero-and-right-half");
  e.remove_interval(Rational(0), rational(1, 2), 0);
  const auto out = porosity_probe(e, Rational(0), rational(1, 4), {rational(1, 2)}, 0);
  ASSERT_EQ(out.size(), 1u);
  ASSERT_TRUE(out[0].second);
  const PorosityWitness &w = *out[0].second;
  EXPECT_EQ(w.beta, rational(1, 2));
  EXPECT_EQ(w.hole_right - w.hole_left, rational(1, 8));
  EXPECT_GE(w.hole_left, -w.beta);
  EXPECT_LE(w.hole_right, w.beta);
  EXPECT_EQ(e.measure_within(w.hole_left, w.hole_right, 0), 0);
  EXPECT_FALSE(e.contains((w.hole_left + w.hole_right) / 2, 0));
}

TEST(Porosity, MiddleThirdsEverywhere) {
  const PiClass e = middle_thirds_class(6);
  std::vector<Rational> alphas;
  Rational a = 1;
  for (int k = 1; k <= 5; ++k)
    alphas.push_back(a /= 3);
  for (const Rational &z : {Rational(0), rational(2, 3), rational(2, 9), Rational(1)})
    for (const auto &[alpha, w] : porosity_probe(e, z, rational(1, 4), alphas, 6)) {
      ASSERT_TRUE(w) << to_string(z) << " " << to_string(alpha);
      EXPECT_LE(w->beta, alpha);
      EXPECT_EQ(e.measure_within(w->hole_left, w->hole_right, 6), 0);
    }
}

TEST(Porosity, ConstantOutOfRange) {
  EXPECT_THROW(porosity_probe(PiClass(), 0, 0, {rational(1, 2)}, 0), Error);
}
