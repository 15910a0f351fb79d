// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "randwork/errors.hpp"
#include "randwork/machines.hpp"
#include "randwork/martingale.hpp"
#include "randwork/numeric.hpp"
#include "randwork/pi_class.hpp"

namespace randwork {

// ---------------------------------------------------------------- Demuth tests

// Component m at stage t is the version W_{index(m,t)}; the index may change at most
// change_bound(m) times.
struct DemuthTest {
  std::function<std::size_t(std::size_t m, Stage t)> index;
  std::function<std::size_t(std::size_t m)> change_bound;
  std::function<std::vector<BitString>(std::size_t id, Stage t)> component;
};

struct DemuthVersion {
  std::size_t id = 0;
  std::vector<BitString> strings; // minimal antichain
  std::size_t changes = 0;
  Rational measure = 0;
};

inline DemuthVersion demuth_eval(const DemuthTest &test, std::size_t m, Stage t) {
  DemuthVersion v;
  for (Stage u = 1; u <= t; ++u)
    if (test.index(m, u) != test.index(m, u - 1))
      ++v.changes;
  if (v.changes > test.change_bound(m))
    throw ContractViolation("component " + std::to_string(m) + " changed " + std::to_string(v.changes) +
                            " times by stage " + std::to_string(t) + ", bound " +
                            std::to_string(test.change_bound(m)));
  v.id = test.index(m, t);
  v.strings = minimal_antichain(test.component(v.id, t));
  v.measure = antichain_measure(v.strings);
  if (v.measure > pow2(-static_cast<long>(m)))
    throw ContractViolation("component " + std::to_string(m) + " at stage " + std::to_string(t) + " has measure " +
                            to_string(v.measure));
  return v;
}

struct DemuthTrace {
  std::vector<bool> captured; // captured[m]: a prefix of Z lies in the final version of S_m
  bool weak_pass = false;     // some m with Z outside S_m
  std::optional<std::size_t> passes_from; // Z outside S_m for every observed m >= this
};

inline DemuthTrace demuth_pass_trace(const BitString &z, const DemuthTest &test, std::size_t max_m, Stage t) {
  DemuthTrace tr;
  for (std::size_t m = 0; m <= max_m; ++m) {
    const auto v = demuth_eval(test, m, t);
    bool in = std::any_of(v.strings.begin(), v.strings.end(), [&](const BitString &s) { return s.is_prefix_of(z); });
    tr.captured.push_back(in);
    tr.weak_pass = tr.weak_pass || !in;
  }
  std::size_t from = max_m + 1;
  while (from > 0 && !tr.captured[from - 1])
    --from;
  if (from <= max_m)
    tr.passes_from = from;
  return tr;
}

// ------------------------------------------------------------ difference tests

// Pi class P with uniformly open U_n (as string sets at stage s).
struct DifferenceTest {
  PiClass P;
  std::function<std::vector<BitString>(std::size_t n, Stage s)> U;
};

// Exact measure of the stage-s class inside the open set generated by strings.
inline Rational class_measure_within(const PiClass &C, const std::vector<BitString> &strings, Stage s) {
  Rational total = 0;
  for (const auto &r : minimal_antichain(strings)) {
    auto iv = interval_of_string(r);
    total += C.measure_within(iv.left.value(), iv.right.value(), s);
  }
  return total;
}

inline Rational difference_test_measure(const DifferenceTest &test, std::size_t n, Stage s) {
  return class_measure_within(test.P, test.U(n, s), s);
}

struct OmegaDifferenceProbe {
  Rational alpha;                      // Omega_s
  std::optional<Natural> index;        // largest i with i 2^-n < alpha; absent when alpha = 0
  Rational u_right;                    // U_n[s] = [0, u_right)
  Rational measure;                    // lambda([alpha,1] cap U_n[s])
  bool omega_inside = false;           // Omega_s in [alpha,1] cap U_n[s]
};

// P = [alpha, 1] and U_n = [0, (i+1) 2^-n). With alpha = 0 there is no such i and U_n = [0, 2^-n).
inline OmegaDifferenceProbe difference_test_omega_at(const Rational &alpha, std::size_t n) {
  OmegaDifferenceProbe p;
  p.alpha = alpha;
  const Rational unit = pow2(-static_cast<long>(n));
  if (alpha == 0) {
    p.u_right = unit;
  } else {
    Natural scaled_floor = floor_of(alpha / unit);
    Natural i = Rational(scaled_floor) * unit == alpha ? Natural(scaled_floor - 1) : scaled_floor;
    p.index = i;
    p.u_right = Rational(i + 1) * unit;
  }
  p.measure = std::max(Rational(0), Rational(std::min(p.u_right, Rational(1)) - alpha));
  p.omega_inside = alpha <= 1 && alpha < p.u_right;
  return p;
}

inline OmegaDifferenceProbe difference_test_omega(const UniversalMachine &u, std::size_t n, Stage s) {
  return difference_test_omega_at(u.omega_at(s), n);
}

// ------------------------------------------------------- Solovay test ledgers

struct LedgerInterval {
  Stage stage = 0;
  std::size_t position = 0; // bit position i that flipped; the interval has length 2^-(i+1)
  Rational left;
  Rational right;
  Rational weight;
  std::size_t later_hits = 0; // stages t >= stage with Omega_t in [left, right)
  bool contains_omega = false;
};

struct SolovayTestLedger {
  std::vector<LedgerInterval> intervals;
  Rational total_weight = 0;
  std::map<std::size_t, std::size_t> flips;      // per bit position
  std::map<std::size_t, Rational> position_weight; // per bit position
};

// Leftmost bit position where the binary expansions of two dyadic rationals in [0,1) differ.
inline std::optional<std::size_t> first_difference(const Rational &a, const Rational &b) {
  if (a == b)
    return std::nullopt;
  std::size_t lo = 1, hi = 2;
  auto differs = [&](std::size_t k) {
    return floor_of(a * pow2(static_cast<long>(k))) != floor_of(b * pow2(static_cast<long>(k)));
  };
  while (!differs(hi))
    hi *= 2;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (differs(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo - 1;
}

// Whenever Omega changes, enumerate the cylinder of its new prefix through the first changed bit.
inline SolovayTestLedger omega_change_test(const std::vector<Rational> &omega_history) {
  SolovayTestLedger led;
  for (Stage s = 1; s < omega_history.size(); ++s) {
    auto pos = first_difference(omega_history[s - 1], omega_history[s]);
    if (!pos)
      continue;
    const std::size_t i = *pos;
    const Rational width = pow2(-static_cast<long>(i + 1));
    LedgerInterval iv;
    iv.stage = s;
    iv.position = i;
    iv.left = Rational(floor_of(omega_history[s] / width)) * width;
    iv.right = iv.left + width;
    iv.weight = width;
    iv.contains_omega = iv.left <= omega_history[s] && omega_history[s] < iv.right;
    for (Stage t = s; t < omega_history.size(); ++t)
      if (iv.left <= omega_history[t] && omega_history[t] < iv.right)
        ++iv.later_hits;
    led.total_weight += width;
    ++led.flips[i];
    led.position_weight[i] += width;
    led.intervals.push_back(std::move(iv));
  }
  return led;
}

inline SolovayTestLedger omega_change_test(const UniversalMachine &u) { return omega_change_test(u.omega_history()); }

// ------------------------------------------------------------- cost functions

struct CostFunction {
  std::function<Rational(std::size_t x, Stage s)> c;
  std::string name = "cost";
  bool nonincreasing_in_x = false;
  bool nondecreasing_in_s = false;
};

inline CostFunction exponential_cost() {
  return {[](std::size_t x, Stage) { return pow2(-static_cast<long>(x)); }, "2^-x", true, true};
}

// c(m, s) = measure of the open set G_{m,s}.
inline CostFunction measure_cost(std::function<std::vector<BitString>(std::size_t m, Stage s)> G) {
  return {[G = std::move(G)](std::size_t m, Stage s) { return antichain_measure(minimal_antichain(G(m, s))); },
          "measure", false, false};
}

// Flag violations on the grid x <= max_x, s <= max_s.
inline std::vector<std::pair<std::size_t, Stage>> cost_monotonicity_violations(const CostFunction &c,
                                                                                std::size_t max_x, Stage max_s) {
  std::vector<std::pair<std::size_t, Stage>> bad;
  for (std::size_t x = 0; x <= max_x; ++x)
    for (Stage s = 0; s <= max_s; ++s) {
      if (c.nonincreasing_in_x && x > 0 && c.c(x, s) > c.c(x - 1, s))
        bad.emplace_back(x, s);
      if (c.nondecreasing_in_s && s > 0 && c.c(x, s) < c.c(x, s - 1))
        bad.emplace_back(x, s);
    }
  return bad;
}

struct CostReport {
  Rational total = 0;
  std::vector<std::tuple<std::size_t, Stage, Rational>> ledger;
  // per e: maximal number of pairwise disjoint pairs x < s <= horizon with c(x,s) >= 2^-e
  std::vector<std::size_t> disjoint_pairs;
  std::vector<std::size_t> bound;
  bool benign_within_bound = true;
};

inline CostReport cost_report(const CostFunction &c, const std::vector<std::pair<std::size_t, Stage>> &changes,
                              std::size_t max_e, const std::function<std::size_t(std::size_t)> &g,
                              std::optional<Stage> horizon = std::nullopt) {
  CostReport r;
  Stage h = horizon.value_or(0);
  for (std::size_t k = 0; k < changes.size(); ++k) {
    const auto &[x, s] = changes[k];
    if (k > 0 && s < changes[k - 1].second)
      throw Error("cost report needs stage-sorted changes");
    Rational v = c.c(x, s);
    r.total += v;
    r.ledger.emplace_back(x, s, v);
    if (!horizon)
      h = std::max(h, s);
  }
  for (std::size_t e = 0; e <= max_e; ++e) {
    const Rational threshold = pow2(-static_cast<long>(e));
    std::size_t count = 0;
    Stage cursor = 0;
    // Earliest-finishing greedy choice is optimal for disjoint intervals [x, s).
    for (Stage s = 1; s <= h; ++s) {
      bool hit = false;
      for (std::size_t x = cursor; x < s && !hit; ++x)
        hit = c.c(x, s) >= threshold;
      if (hit) {
        ++count;
        cursor = s;
      }
    }
    r.disjoint_pairs.push_back(count);
    r.bound.push_back(g(e));
    r.benign_within_bound = r.benign_within_bound && count <= g(e);
  }
  return r;
}

// ------------------------------------------------- ML tests from BV functions

struct BVTestResult {
  std::vector<BitString> level_strings; // length n, slope > 2^r
  Rational level_measure = 0;
  std::vector<BitString> generators;    // minimal strings of length <= n with slope > 2^r
  Rational measure = 0;
  Rational sampled_variation = 0;
};

inline BVTestResult bv_ml_test(const FunctionOracle &f, long r, std::size_t n, const Rational &variation_bound = 1,
                               unsigned long precision = 40) {
  BVTestResult out;
  const std::size_t count = std::size_t{1} << n;
  std::vector<Rational> values(count + 1);
  for (std::size_t k = 0; k <= count; ++k)
    values[k] = f.eval(Rational(static_cast<long>(k)) * pow2(-static_cast<long>(n)), precision);
  for (std::size_t k = 0; k < count; ++k)
    out.sampled_variation += abs_of(values[k + 1] - values[k]);
  if (out.sampled_variation > variation_bound)
    throw ContractViolation("sampled variation " + to_string(out.sampled_variation) + " exceeds " +
                            to_string(variation_bound));
  const Rational bound = pow2(r);
  std::vector<BitString> all;
  for (std::size_t len = 0; len <= n; ++len) {
    const std::size_t stride = std::size_t{1} << (n - len);
    for (std::size_t k = 0; k < (std::size_t{1} << len); ++k) {
      const Rational s = (values[(k + 1) * stride] - values[k * stride]) * pow2(static_cast<long>(len));
      if (s <= bound)
        continue;
      std::string bits(len, '0');
      for (std::size_t j = 0; j < len; ++j)
        if (k >> (len - 1 - j) & 1u)
          bits[j] = '1';
      all.emplace_back(bits);
      if (len == n)
        out.level_strings.emplace_back(bits);
    }
  }
  out.level_measure = Rational(static_cast<long>(out.level_strings.size())) * pow2(-static_cast<long>(n));
  out.generators = minimal_antichain(std::move(all));
  out.measure = antichain_measure(out.generators);
  return out;
}

// Nondecreasing function made of linear ramps: each step rises by height over [left, left + width].
inline FunctionOracle staircase_function(std::vector<std::tuple<Rational, Rational, Rational>> steps,
                                         std::string name = "staircase") {
  return FunctionOracle::exact(
      [steps = std::move(steps)](const Rational &x) {
        Rational v = 0;
        for (const auto &[left, width, height] : steps) {
          if (x >= left + width)
            v += height;
          else if (x > left)
            v += height * (x - left) / width;
        }
        return v;
      },
      std::move(name));
}

// --------------------------------------------- difference test from porosity

// Holes of the stage-t class among strings of length <= max_length.
class HoleTable {
public:
  HoleTable(const PiClass &C, Stage t, std::size_t max_length) : max_length_(max_length) {
    holes_.resize(max_length + 1);
    meets_.resize(max_length + 1);
    const std::size_t cells = std::size_t{1} << max_length;
    meets_[max_length].assign(cells, false);
    const Rational width = pow2(-static_cast<long>(max_length));
    for (const auto &p : C.pieces(t)) {
      if (!(p.left < p.right))
        continue; // single points carry no measure
      std::size_t lo = static_cast<std::size_t>(floor_of(p.left / width).get_ui());
      std::size_t hi = std::min(cells, static_cast<std::size_t>(floor_of(p.right / width).get_ui()) + 1);
      for (std::size_t k = lo; k < hi; ++k) {
        const Rational a = Rational(static_cast<long>(k)) * width;
        if (std::min(p.right, Rational(a + width)) > std::max(p.left, a))
          meets_[max_length][k] = true;
      }
    }
    for (std::size_t len = max_length; len-- > 0;) {
      meets_[len].assign(std::size_t{1} << len, false);
      for (std::size_t k = 0; k < meets_[len].size(); ++k)
        meets_[len][k] = meets_[len + 1][2 * k] || meets_[len + 1][2 * k + 1];
    }
    for (std::size_t len = 0; len <= max_length; ++len) {
      holes_[len].resize(meets_[len].size());
      for (std::size_t k = 0; k < meets_[len].size(); ++k)
        holes_[len][k] = !meets_[len][k];
    }
  }
  std::size_t max_length() const noexcept { return max_length_; }
  bool hole(std::size_t len, std::size_t k) const { return holes_[len][k]; }
  bool meets(std::size_t len, std::size_t k) const { return meets_[len][k]; }

private:
  std::size_t max_length_;
  std::vector<std::vector<bool>> holes_;
  std::vector<std::vector<bool>> meets_;
};

inline std::size_t string_index(const BitString &s) { return static_cast<std::size_t>(s.as_integer().get_ui()); }

inline BitString string_at(std::size_t len, std::size_t k) {
  std::string bits(len, '0');
  for (std::size_t j = 0; j < len; ++j)
    if (k >> (len - 1 - j) & 1u)
      bits[j] = '1';
  return BitString(bits);
}

// Minimal rho extending sigma with a same-length hole tau extending sigma and |0.tau - 0.rho| <= 2^(c-|tau|).
inline std::vector<BitString> porous_extensions(const HoleTable &holes, const BitString &sigma, std::size_t c) {
  std::vector<BitString> out;
  const std::size_t base = sigma.size();
  const std::size_t radius = std::size_t{1} << c;
  const std::size_t root = string_index(sigma);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{base, root}};
  while (!stack.empty()) {
    auto [len, k] = stack.back();
    stack.pop_back();
    const std::size_t shift = len - base;
    const std::size_t lo = root << shift, hi = (root + 1) << shift; // extensions of sigma at this length
    const std::size_t from = k >= lo + radius ? k - radius : lo;
    const std::size_t to = std::min(hi - 1, k + radius);
    bool found = false;
    for (std::size_t j = from; j <= to && !found; ++j)
      found = holes.hole(len, j);
    if (found) {
      out.push_back(string_at(len, k));
      continue;
    }
    if (len < holes.max_length()) {
      stack.emplace_back(len + 1, 2 * k + 1);
      stack.emplace_back(len + 1, 2 * k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct PorosityNodeCheck {
  BitString sigma;
  Rational meeting_weight; // sum of 2^-|rho| over rho in N_t(sigma) meeting the class
  Rational bound;          // (1 - 2^-c-2) 2^-|sigma|
};

struct PorosityLevel {
  std::vector<BitString> antichain; // B_{n,t}
  Rational meeting_weight = 0;      // sum over rho in B_{n,t} meeting the class
  Rational class_measure = 0;       // lambda(C_t cap [B_{n,t}])
  Rational bound = 0;               // (1 - 2^-c-2)^n
};

struct PorosityRun {
  std::size_t c = 0;
  Stage stage = 0;
  std::vector<PorosityLevel> levels; // index n = 0..max_n
  std::vector<PorosityNodeCheck> nodes;
  std::vector<PorosityNodeCheck> node_violations;
  std::vector<std::size_t> level_violations;
};

// Builds B_{0,t}, ..., B_{max_n,t} with every search truncated at max_length and checks both bounds.
inline PorosityRun porosity_levels(const PiClass &C, std::size_t c, std::size_t max_n, Stage t,
                                   std::size_t max_length = 12) {
  if (c < 1)
    throw Error("porosity constant c must be at least 1");
  HoleTable holes(C, t, max_length);
  PorosityRun run;
  run.c = c;
  run.stage = t;
  const Rational factor = 1 - pow2(-static_cast<long>(c) - 2);
  std::vector<BitString> level{BitString()};
  Rational power = 1;
  for (std::size_t n = 0; n <= max_n; ++n) {
    PorosityLevel L;
    L.antichain = level;
    L.bound = power;
    for (const auto &r : level) {
      if (holes.meets(r.size(), string_index(r)))
        L.meeting_weight += pow2(-static_cast<long>(r.size()));
      auto iv = interval_of_string(r);
      L.class_measure += C.measure_within(iv.left.value(), iv.right.value(), t);
    }
    if (L.meeting_weight > L.bound || L.class_measure > L.bound)
      run.level_violations.push_back(n);
    run.levels.push_back(std::move(L));
    if (n == max_n)
      break;
    std::vector<BitString> next;
    for (const auto &sigma : level) {
      auto ext = porous_extensions(holes, sigma, c);
      PorosityNodeCheck chk{sigma, 0, factor * pow2(-static_cast<long>(sigma.size()))};
      for (const auto &r : ext)
        if (holes.meets(r.size(), string_index(r)))
          chk.meeting_weight += pow2(-static_cast<long>(r.size()));
      if (holes.meets(sigma.size(), string_index(sigma)) && chk.meeting_weight > chk.bound)
        run.node_violations.push_back(chk);
      run.nodes.push_back(std::move(chk));
      next.insert(next.end(), ext.begin(), ext.end());
    }
    level = std::move(next);
    power *= factor;
  }
  return run;
}

// Throwing form: U_n[t] as generators together with lambda(C_t cap U_n[t]).
inline std::pair<std::vector<BitString>, Rational> porosity_difference_test(const PiClass &C, std::size_t c,
                                                                            std::size_t n, Stage t,
                                                                            std::size_t max_length = 12) {
  auto run = porosity_levels(C, c, n, t, max_length);
  if (!run.node_violations.empty())
    throw ContractViolation("node bound fails at '" + run.node_violations.front().sigma.str() + "'");
  if (!run.level_violations.empty())
    throw ContractViolation("level bound fails at n = " + std::to_string(run.level_violations.front()));
  return {run.levels.back().antichain, run.levels.back().class_measure};
}

// Every rho in B_{n,t} has a prefix in B_{n,t+1}.
inline bool nested_union_holds(const PorosityRun &earlier, const PorosityRun &later) {
  for (std::size_t n = 0; n < earlier.levels.size() && n < later.levels.size(); ++n)
    for (const auto &r : earlier.levels[n].antichain)
      if (std::none_of(later.levels[n].antichain.begin(), later.levels[n].antichain.end(),
                       [&](const BitString &p) { return p.is_prefix_of(r); }))
        return false;
  return true;
}

// Brute-force oracle: lambda(C_t cap [B]) summed over all strings of length max_length.
inline Rational brute_force_class_measure(const PiClass &C, const std::vector<BitString> &antichain, Stage t,
                                          std::size_t max_length) {
  Rational total = 0;
  const Rational width = pow2(-static_cast<long>(max_length));
  for (std::size_t k = 0; k < (std::size_t{1} << max_length); ++k) {
    const BitString x = string_at(max_length, k);
    if (std::none_of(antichain.begin(), antichain.end(), [&](const BitString &p) { return p.is_prefix_of(x); }))
      continue;
    const Rational a = Rational(static_cast<long>(k)) * width;
    total += C.measure_within(a, a + width, t);
  }
  return total;
}

} // namespace randwork
