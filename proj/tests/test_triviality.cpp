// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "randwork/desk.hpp"
#include "randwork/triviality.hpp"

using namespace randwork;

namespace {

CauchyName constant_name(const Rational &x, std::size_t length = 20) {
  CauchyName name{unit_interval(), {}};
  for (std::size_t m = 0; m < length; ++m)
    name.entries.push_back(unit_index(x));
  return name;
}

// Desk machines plus an image machine sending n to the tuple of n zeros.
struct ZerosFixture {
  UniversalMachine u;
  std::size_t zeros = 0;

  explicit ZerosFixture(Stage stages) {
    install_desk_machines(u);
    zeros = install_image_machine(u, "zeros", [](const Natural &n) -> std::optional<Natural> {
      if (n > 64)
        return std::nullopt;
      return encode_tuple(std::vector<Natural>(n.get_ui(), Natural(0)));
    });
    u.run_until(stages);
  }
};

ZerosFixture &zeros_fixture() {
  static ZerosFixture f(400);
  return f;
}

} // namespace

TEST(StageIndex, StageZeroIsEmpty) {
  UniversalMachine u;
  install_desk_machines(u);
  const auto idx = stage_index(u, 0);
  EXPECT_TRUE(idx.words.empty());
  EXPECT_FALSE(idx.K(Natural(3)));
}

TEST(KTrivialCheck, ZeroFunctionPassesWithImageConstant) {
  auto &f = zeros_fixture();
  const std::vector<Natural> alpha(12, Natural(0));
  const auto rep = ktrivial_check(f.u, alpha, f.zeros + 1, 400, 399, "zero");
  EXPECT_TRUE(rep.pass) << rep.to_json().dump();
  ASSERT_EQ(rep.rows.size(), 13u);
  for (const auto &row : rep.rows)
    if (row.K_length) {
      ASSERT_TRUE(row.margin);
      EXPECT_LE(*row.margin, 0);
    }
}

TEST(KTrivialCheck, UndescribedFunctionFailsAgainstFiniteLength) {
  auto &f = zeros_fixture();
  std::vector<Natural> alpha;
  for (unsigned long k = 0; k < 8; ++k)
    alpha.push_back(Natural(1000003ul + 7919ul * k));
  const auto rep = ktrivial_check(f.u, alpha, 0, 400);
  EXPECT_FALSE(rep.pass);
}

TEST(KTrivialCheck, StageZeroIsVacuous) {
  UniversalMachine u;
  const auto rep = ktrivial_check(u, std::vector<Natural>(5, Natural(1)), 0, 0);
  EXPECT_TRUE(rep.pass);
  for (const auto &row : rep.rows)
    EXPECT_FALSE(row.margin);
}

TEST(LocalWitness, StageZeroHasNoWitness) {
  UniversalMachine u;
  install_desk_machines(u);
  const auto w = locally_ktrivial_witness(u, constant_name(Rational(1, 3)), 2, 3, 0);
  EXPECT_FALSE(w.K_scale);
  EXPECT_FALSE(w.strict);
  EXPECT_FALSE(w.weak);
  EXPECT_EQ(w.candidates, 0u);
}

TEST(LocalWitness, FarLabelledPointIsNoStrictWitness) {
  UniversalMachine u;
  const auto id = u.reserve_machine("script");
  u.add_entry(id, BitString("00"), Natural(2), 1);
  u.add_entry(id, BitString("01"), unit_index(Rational(1, 3)), 1);
  u.add_entry(id, BitString("10"), pair(unit_index(Rational(1)), Natural(2)), 1);
  u.run_until(10);
  const auto w = locally_ktrivial_witness(u, constant_name(Rational(1, 3)), 2, 1, 10);
  EXPECT_TRUE(w.K_scale);
  EXPECT_EQ(w.candidates, 1u);
  EXPECT_FALSE(w.strict);
  EXPECT_TRUE(w.weak);
}

TEST(LocalWitness, DeskFindsWitnessNearOneThird) {
  auto &f = zeros_fixture();
  const auto x = constant_name(Rational(1, 3));
  const auto idx = stage_index(f.u, 400);
  bool any = false;
  for (unsigned long n = 1; n < 6; ++n) {
    const auto w = locally_ktrivial_witness(f.u, x, n, 4, 400, ScaleMode::dyadic, &idx);
    if (w.strict) {
      any = true;
      EXPECT_GE(w.candidates, 1u);
    }
  }
  EXPECT_TRUE(any);
}

TEST(LocalWitness, PlainCheckRejectsPrefixFreeMachine) {
  UniversalMachine u;
  EXPECT_THROW(locally_c_trivial_check(u, constant_name(Rational(1, 3)), 3, 3, 0), ContractViolation);
}

TEST(LocalWitness, PlainDeskFindsWitness) {
  UniversalMachine p(28, false);
  install_plain_desk_machines(p);
  p.run_until(200);
  const auto w = locally_c_trivial_check(p, constant_name(Rational(1, 3)), 3, 3, 200);
  EXPECT_TRUE(w.strict);
}

TEST(Incompressibility, StageZeroIsVacuous) {
  UniversalMachine u;
  const auto rep = ia_report(u, cantor_name(BitString("0110100110010110")), 0, 0, 10, 0);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.strong_pass);
}

TEST(Incompressibility, DescribedPointIsStrongOffender) {
  UniversalMachine u;
  const auto id = u.reserve_machine("script");
  u.add_entry(id, BitString("00000"), unit_index(Rational(1, 3)), 1);
  u.run_until(10);
  const auto near = ia_report(u, constant_name(Rational(1, 3)), 0, 0, 4, 10);
  ASSERT_EQ(near.strong_offenders.size(), 1u);
  EXPECT_EQ(near.strong_offenders[0].point, unit_index(Rational(1, 3)));
  EXPECT_FALSE(near.strong_pass);
  const auto far = ia_report(u, constant_name(Rational(0)), 0, 0, 4, 10);
  EXPECT_TRUE(far.strong_pass);
}

TEST(Incompressibility, PointComplexityAtStageZeroIsInfinite) {
  UniversalMachine u;
  const auto pc = point_complexity(u, constant_name(Rational(1, 3)), 3, 0);
  EXPECT_FALSE(pc.K_at);
  EXPECT_FALSE(pc.K_star);
}

TEST(DescriptionTest, SingleDescriptionBall) {
  UniversalMachine u;
  const auto id = u.reserve_machine("one");
  u.add_entry(id, BitString("000"), Natural(3), 1);
  u.run_until(5);
  const auto r = description_ml_test(u, unit_interval(), 1, 5);
  ASSERT_EQ(r.balls.size(), 1u);
  EXPECT_EQ(r.balls[0].radius, Rational(1, 64));
  EXPECT_EQ(r.weight, Rational(1, 32));
  EXPECT_EQ(r.bound, Rational(1, 32));
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(description_ml_test(u, cantor_space(), 1, 5).measure, Rational(1, 128));
}

TEST(DescriptionTest, WeightBelowScaledOmega) {
  auto &f = zeros_fixture();
  for (std::size_t b = 0; b < 3; ++b) {
    const auto r = description_ml_test(f.u, unit_interval(), b, 400);
    EXPECT_LE(r.weight, r.bound);
    EXPECT_LE(r.measure, r.weight * 2);
    EXPECT_TRUE(r.holds);
  }
}

TEST(CountBound, CompressibleCountBelowBound) {
  auto &f = zeros_fixture();
  const auto cb = count_bound_constant(f.u, 0, 10, 400);
  ASSERT_TRUE(cb.constant);
  for (unsigned long n = 0; n <= 10; ++n)
    for (std::size_t b = 0; b < 4; ++b)
      EXPECT_LE(count_compressible(f.u, Natural(n), b, 400, 1 << 12), 1ul << (b + *cb.constant));
}

TEST(Lipschitz, IdentityTransfersComplexity) {
  auto &f = zeros_fixture();
  const auto rep = lipschitz_transfer_check(f.u, identity_map(unit_interval()), constant_name(Rational(1, 3)), 1, 8,
                                            400, 4096, 3);
  EXPECT_TRUE(rep.pass) << rep.to_json().dump();
  EXPECT_EQ(rep.machine_constant, f.u.machine_count() + 1);
  for (const auto &row : rep.rows)
    EXPECT_NE(row.status, "fail");
}

TEST(Lipschitz, CantorEmbeddingTransfersComplexity) {
  auto &f = zeros_fixture();
  const auto rep = lipschitz_transfer_check(f.u, cantor_embed_map(6), cantor_name(BitString(std::string(16, '0'))),
                                            1, 12, 400, 4096, 3);
  EXPECT_TRUE(rep.pass) << rep.to_json().dump();
  ASSERT_TRUE(rep.strong_violations);
  EXPECT_EQ(*rep.strong_violations, 0u);
}
