// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "randwork/desk.hpp"
#include "randwork/machines.hpp"

using namespace randwork;

TEST(Reserve, IdsAndConstants) {
  UniversalMachine u;
  const auto a = u.reserve_machine("a");
  const auto b = u.reserve_machine("b");
  EXPECT_EQ(a, 0u);
  EXPECT_EQ(b, 1u);
  EXPECT_EQ(u.machine(a).reserved_constant(), 1u);
  EXPECT_EQ(u.machine(b).reserved_constant(), 2u);
  // The constant is the length of the coding prefix 0^e 1.
  EXPECT_EQ(UniversalMachine::code_input(b, BitString()).size(), u.machine(b).reserved_constant());
}

TEST(KraftChaitin, LeftmostAssignment) {
  MachineTable m(0, "kc");
  EXPECT_EQ(m.kc_extend({1, 7}, 1), BitString("0"));
}

TEST(KraftChaitin, Saturation) {
  MachineTable m(0, "kc");
  EXPECT_EQ(m.kc_extend({1, 1}, 1), BitString("0"));
  EXPECT_EQ(m.kc_extend({1, 2}, 1), BitString("1"));
  for (std::size_t k = 1; k < 10; ++k)
    EXPECT_THROW(m.kc_extend({k, 3}, 1), BudgetExceeded);
}

TEST(KraftChaitin, MixedLengths) {
  MachineTable m(0, "kc");
  EXPECT_EQ(m.kc_extend({2, 1}, 1), BitString("00"));
  EXPECT_EQ(m.kc_extend({1, 2}, 1), BitString("1"));
  EXPECT_EQ(m.kc_extend({2, 3}, 1), BitString("01"));
  EXPECT_EQ(m.weight(), 1);
}

TEST(KraftChaitin, NeverFailsWithinBudget) {
  MachineTable m(0, "kc");
  const std::size_t lengths[] = {3, 5, 2, 4, 6, 3, 7, 8, 5, 8};
  Rational total = 0;
  for (std::size_t k : lengths) {
    total += pow2(-static_cast<long>(k));
    ASSERT_LE(total, 1);
    EXPECT_EQ(m.kc_extend({k, 0}, 1).size(), k);
  }
  for (std::size_t i = 0; i < m.entries().size(); ++i)
    for (std::size_t j = 0; j < m.entries().size(); ++j)
      if (i != j) {
        EXPECT_FALSE(m.entries()[i].input.is_prefix_of(m.entries()[j].input));
      }
}

TEST(Table, DirectEntriesKeepPrefixFreedom) {
  MachineTable m(0, "direct");
  m.add(BitString("01"), 3, 1);
  EXPECT_THROW(m.add(BitString("010"), 4, 1), ContractViolation);
  EXPECT_THROW(m.add(BitString("0"), 4, 1), ContractViolation);
  EXPECT_THROW(m.kc_extend({3, 1}, 1), ContractViolation);
  MachineTable plain(1, "plain", false);
  plain.add(BitString("01"), 3, 1);
  EXPECT_NO_THROW(plain.add(BitString("010"), 4, 1));
}

TEST(Universal, EmptyAtStageZero) {
  UniversalMachine u;
  EXPECT_EQ(u.stage(), 0u);
  EXPECT_TRUE(u.domain().empty());
  EXPECT_EQ(u.omega(), 0);
  EXPECT_FALSE(K_stage(u, 5, 0));
}

TEST(Universal, OmegaAfterOneRequest) {
  UniversalMachine u;
  const auto id = u.reserve_machine("scratch");
  u.kc_extend(id, {3, 42}, 1);
  u.run_until(10);
  EXPECT_EQ(u.omega(), pow2(-4));
  EXPECT_EQ(u.K(42), Complexity(4));
}

TEST(Universal, StageComplexityTakesMinimum) {
  UniversalMachine u;
  u.reserve_machine("a");
  const auto id = u.reserve_machine("b");
  // Machine 1 adds two coding bits: a 5-bit input gives length 7, a 3-bit input length 5.
  u.add_entry(id, BitString("11111"), 9, 2);
  u.add_entry(id, BitString("000"), 9, 20);
  u.run_until(30);
  EXPECT_EQ(K_stage(u, 9, 6), Complexity(7));
  EXPECT_EQ(K_stage(u, 9, 30), Complexity(5));
  EXPECT_FALSE(K_stage(u, 9, 1));
}

TEST(Universal, VisibilityFollowsTheClock) {
  UniversalMachine u;
  for (int i = 0; i < 3; ++i)
    u.reserve_machine("m" + std::to_string(i));
  u.add_entry(2, BitString("0101"), 1, 1);
  u.run_until(4);
  EXPECT_FALSE(u.K(1));
  u.run_stage();
  // Visible from max(e + 1, |sigma| + 1, halt) = 5.
  EXPECT_EQ(u.K(1), Complexity(7));
  ASSERT_NE(u.shortest_description(1), nullptr);
  EXPECT_EQ(u.shortest_description(1)->stage, 5u);
}

TEST(Universal, InputsBeyondCapNeverRun) {
  UniversalMachine u(8);
  const auto id = u.reserve_machine("a");
  u.add_entry(id, BitString::repeat(true, 9), 1, 1);
  u.run_until(40);
  EXPECT_TRUE(u.domain().empty());
}

TEST(Universal, KraftAndOmegaOverDeskRun) {
  UniversalMachine u;
  install_desk_machines(u);
  EXPECT_GE(u.machine_count(), 5u);
  Rational previous = 0;
  for (Stage s = 1; s <= 500; ++s) {
    u.run_stage();
    EXPECT_GE(u.omega(), previous);
    EXPECT_LE(u.omega(), 1);
    previous = u.omega();
  }
  Rational kraft = 0;
  for (const auto &h : u.domain())
    kraft += pow2(-static_cast<long>(h.input.size()));
  EXPECT_EQ(kraft, u.omega());
}

TEST(Universal, DeterministicReplay) {
  UniversalMachine a, b;
  install_desk_machines(a);
  install_desk_machines(b);
  a.run_until(300);
  b.run_until(300);
  const auto words = a.described_words();
  EXPECT_EQ(words, b.described_words());
  for (const auto &w : words)
    EXPECT_EQ(a.K(w), b.K(w));
}

TEST(Solovay, NonTripleCodesReturnArgument) {
  UniversalMachine u;
  u.reserve_machine("a");
  u.run_until(5);
  for (unsigned long r = 0; r < 200; ++r)
    EXPECT_EQ(solovay_h(u, r), r);
}

TEST(Solovay, MinimalHaltingStage) {
  UniversalMachine u;
  const auto id = u.reserve_machine("a");
  u.add_entry(id, BitString("01"), 6, 1);
  u.run_until(10);
  const Halting *h = u.shortest_description(6);
  ASSERT_NE(h, nullptr);
  const Natural sigma = code_of(h->input);
  const Natural exact = triple(sigma, 6, static_cast<unsigned long>(h->stage));
  EXPECT_EQ(solovay_h(u, exact), h->input.size());
  const Natural late = triple(sigma, 6, static_cast<unsigned long>(h->stage + 1));
  EXPECT_EQ(solovay_h(u, late), late);
  const Natural wrong_output = triple(sigma, 7, static_cast<unsigned long>(h->stage));
  EXPECT_EQ(solovay_h(u, wrong_output), wrong_output);
}

TEST(CountCompressible, ZeroAtStageZero) {
  UniversalMachine u;
  install_desk_machines(u);
  EXPECT_EQ(count_compressible(u, 3, 4, 0, 64), 0u);
}

TEST(CountCompressible, ScriptedThreeQualifiers) {
  UniversalMachine u;
  const auto id = u.reserve_machine("script");
  // K(n) = 4 for n = 5; pairs <p,5> for p = 0,1,2 at length 5 and p = 3 at length 9.
  u.add_entry(id, BitString("000"), 5, 1);
  u.add_entry(id, BitString("0010"), pair(0, 5), 1);
  u.add_entry(id, BitString("0011"), pair(1, 5), 1);
  u.add_entry(id, BitString("0100"), pair(2, 5), 1);
  u.add_entry(id, BitString("11111111"), pair(3, 5), 1);
  u.run_until(12);
  EXPECT_EQ(count_compressible(u, 5, 1, 12, 100), 3u);
  EXPECT_EQ(count_compressible(u, 5, 5, 12, 100), 4u);
}
