// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "randwork/errors.hpp"
#include "randwork/numeric.hpp"

namespace randwork {

// f(q) to within 2^-n for rationals q in the domain.
struct FunctionOracle {
  std::function<Rational(const Rational &, unsigned long)> eval;
  bool markov_style = false;
  std::string name = "f";

  static FunctionOracle exact(std::function<Rational(const Rational &)> f, std::string name = "f") {
    return {[f = std::move(f)](const Rational &q, unsigned long) { return f(q); }, true, std::move(name)};
  }
};

inline FunctionOracle identity_function() {
  return FunctionOracle::exact([](const Rational &x) { return x; }, "identity");
}

inline FunctionOracle square_function() {
  return FunctionOracle::exact([](const Rational &x) -> Rational { return x * x; }, "square");
}

inline FunctionOracle scaled_identity(const Rational &c) {
  return FunctionOracle::exact([c](const Rational &x) -> Rational { return c * x; }, "scaled-identity");
}

// |x - centre|
inline FunctionOracle kink_function(const Rational &centre) {
  return FunctionOracle::exact([centre](const Rational &x) { return abs_of(x - centre); }, "kink");
}

// Linear interpolation through (x_i, y_i) with strictly increasing x_i; constant outside.
inline FunctionOracle piecewise_linear(std::vector<std::pair<Rational, Rational>> knots, std::string name = "pl") {
  if (knots.empty())
    throw Error("piecewise linear function needs knots");
  std::sort(knots.begin(), knots.end());
  return FunctionOracle::exact(
      [knots = std::move(knots)](const Rational &x) {
        if (x <= knots.front().first)
          return knots.front().second;
        if (x >= knots.back().first)
          return knots.back().second;
        auto hi = std::upper_bound(knots.begin(), knots.end(), x,
                                   [](const Rational &v, const auto &k) { return v < k.first; });
        auto lo = hi - 1;
        if (lo->first == x)
          return lo->second;
        return Rational(lo->second + (hi->second - lo->second) * (x - lo->first) / (hi->first - lo->first));
      },
      std::move(name));
}

// Values on all strings extending a base string, up to a depth.
class Martingale {
public:
  Martingale() = default;
  explicit Martingale(BitString base) : base_(std::move(base)) {}

  const BitString &base() const noexcept { return base_; }
  const std::map<BitString, Rational> &values() const noexcept { return values_; }

  void set(const BitString &node, Rational v) { values_[node] = std::move(v); }
  std::optional<Rational> get(const BitString &node) const {
    auto it = values_.find(node);
    if (it == values_.end())
      return std::nullopt;
    return it->second;
  }
  const Rational &at(const BitString &node) const {
    auto it = values_.find(node);
    if (it == values_.end())
      throw IndexError("martingale not materialized at '" + node.str() + "'");
    return it->second;
  }

  void mark_doubling(const BitString &node) { doublings_.insert(node); }
  bool doubled_at(const BitString &node) const { return doublings_.count(node) > 0; }
  const std::set<BitString> &doublings() const noexcept { return doublings_; }

  // Interior nodes where 2 M(t) != M(t0) + M(t1).
  std::vector<BitString> fairness_violations() const {
    std::vector<BitString> bad;
    for (const auto &[node, v] : values_) {
      auto a = get(node.child(false)), b = get(node.child(true));
      if (a && b && *a + *b != 2 * v)
        bad.push_back(node);
    }
    return bad;
  }

  std::vector<BitString> negative_nodes() const {
    std::vector<BitString> bad;
    for (const auto &[node, v] : values_)
      if (v < 0)
        bad.push_back(node);
    return bad;
  }

private:
  BitString base_;
  std::map<BitString, Rational> values_;
  std::set<BitString> doublings_;
};

// Slope of f over [shift + 0.s, shift + 0.s + 2^-|s|], endpoints evaluated at precision n + |s| + 2.
inline Rational slope_martingale(const FunctionOracle &f, const Rational &shift, const BitString &s,
                                 unsigned long n) {
  const Rational a = shift + s.binary_fraction();
  const Rational b = a + pow2(-static_cast<long>(s.size()));
  const unsigned long prec = n + s.size() + 2;
  return slope(f.eval(b, prec), f.eval(a, prec), b, a);
}

// Full table of the (shifted) slope martingale to the given depth. Each dyadic endpoint
// is evaluated once, so the table is exactly fair for any oracle.
inline Martingale slope_martingale_table(const FunctionOracle &f, const Rational &shift, std::size_t depth,
                                         unsigned long n) {
  std::map<Rational, Rational> point_values;
  const unsigned long prec = n + depth + 2;
  auto value_at = [&](const Rational &x) -> const Rational & {
    auto it = point_values.find(x);
    if (it == point_values.end())
      it = point_values.emplace(x, f.eval(x, prec)).first;
    return it->second;
  };
  Martingale m;
  std::vector<BitString> level{BitString()};
  for (std::size_t d = 0; d <= depth; ++d) {
    std::vector<BitString> next;
    for (const auto &s : level) {
      const Rational a = shift + s.binary_fraction();
      const Rational b = a + pow2(-static_cast<long>(s.size()));
      m.set(s, slope(value_at(b), value_at(a), b, a));
      if (d < depth) {
        next.push_back(s.child(false));
        next.push_back(s.child(true));
      }
    }
    level = std::move(next);
  }
  return m;
}

struct DebtFreeResult {
  Martingale martingale;
  // Nodes whose observed slope does not exceed the threshold 4 required of the start region.
  std::vector<BitString> threshold_flags;
  std::size_t case1_count = 0;
  std::size_t case2_count = 0;
};

// Converts the slope martingale of g on extensions of start into a martingale without
// debt: where the second Cauchy entry of a child slope drops below 1 the capital doubles
// on the sibling and the child's whole subtree is set to 0; otherwise it bets with the
// betting factors of the slopes.
inline DebtFreeResult debt_free_convert(const FunctionOracle &g, const BitString &start, std::size_t depth,
                                        unsigned long precision = 24) {
  const Rational threshold = 4;
  const unsigned long fixed_prec = precision + start.size() + depth + 2;
  std::map<Rational, Rational> fixed_values;
  auto fixed_at = [&](const Rational &x) -> const Rational & {
    auto it = fixed_values.find(x);
    if (it == fixed_values.end())
      it = fixed_values.emplace(x, g.eval(x, fixed_prec)).first;
    return it->second;
  };
  // Slope from one consistent set of endpoint values; satisfies the midpoint identity exactly.
  auto slope_of = [&](const BitString &s) {
    const Rational a = s.binary_fraction();
    const Rational b = a + pow2(-static_cast<long>(s.size()));
    return slope(fixed_at(b), fixed_at(a), b, a);
  };
  // Entry k of the Cauchy name of the slope: endpoints at precision k + |s| + 1.
  auto slope_entry = [&](const BitString &s, unsigned long k) {
    const Rational a = s.binary_fraction();
    const Rational b = a + pow2(-static_cast<long>(s.size()));
    const unsigned long prec = k + s.size() + 1;
    return slope(g.eval(b, prec), g.eval(a, prec), b, a);
  };

  DebtFreeResult out;
  out.martingale = Martingale(start);
  Martingale &m = out.martingale;
  m.set(start, slope_of(start));
  std::vector<BitString> level{start};
  std::set<BitString> zeroed;
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<BitString> next;
    for (const auto &tau : level) {
      const Rational capital = m.at(tau);
      if (zeroed.count(tau)) {
        for (bool bit : {false, true}) {
          m.set(tau.child(bit), 0);
          zeroed.insert(tau.child(bit));
          next.push_back(tau.child(bit));
        }
        continue;
      }
      if (slope_of(tau) <= threshold)
        out.threshold_flags.push_back(tau);
      std::optional<bool> dropped;
      for (bool v : {false, true})
        if (!dropped && slope_entry(tau.child(v), 1) < 1)
          dropped = v;
      if (dropped) {
        const bool v = *dropped;
        m.set(tau.child(!v), 2 * capital);
        m.set(tau.child(v), 0);
        m.mark_doubling(tau.child(!v));
        zeroed.insert(tau.child(v));
        ++out.case1_count;
      } else {
        const Rational s = slope_of(tau);
        if (s <= 0)
          throw ContractViolation("slope oracle inconsistent with its Cauchy entries at '" + tau.str() + "'");
        for (bool u : {false, true})
          m.set(tau.child(u), capital * slope_of(tau.child(u)) / s);
        ++out.case2_count;
      }
      next.push_back(tau.child(false));
      next.push_back(tau.child(true));
    }
    level = std::move(next);
  }
  return out;
}

struct CapitalTrace {
  std::vector<std::pair<BitString, Rational>> values;
  std::size_t doublings = 0;
  Rational maximum = 0;
  Rational oscillation = 0; // sum of |M(path|k+1) - M(path|k)|

  std::string csv() const {
    std::ostringstream os;
    os << "node,value\n";
    for (const auto &[node, v] : values)
      os << node.str() << "," << to_string(v) << "\n";
    return os.str();
  }
};

inline CapitalTrace capital_trace(const Martingale &m, const BitString &path) {
  if (!m.base().is_prefix_of(path))
    throw IndexError("path does not extend the martingale's base");
  CapitalTrace t;
  for (std::size_t k = m.base().size(); k <= path.size(); ++k) {
    const BitString node = path.prefix(k);
    const Rational &v = m.at(node);
    if (!t.values.empty())
      t.oscillation += abs_of(v - t.values.back().second);
    if (t.values.empty() || v > t.maximum)
      t.maximum = v;
    if (m.doubled_at(node))
      ++t.doublings;
    t.values.emplace_back(node, v);
  }
  return t;
}

// Strings of length n whose slope exceeds 2^r.
inline std::vector<BitString> steep_strings(const FunctionOracle &f, long r, std::size_t n) {
  std::vector<BitString> out;
  const Rational bound = pow2(r);
  const std::size_t count = std::size_t{1} << n;
  std::vector<Rational> values(count + 1);
  for (std::size_t k = 0; k <= count; ++k)
    values[k] = f.eval(Rational(static_cast<long>(k)) * pow2(-static_cast<long>(n)), n + 2);
  for (std::size_t k = 0; k < count; ++k) {
    const Rational s = (values[k + 1] - values[k]) * pow2(static_cast<long>(n));
    if (s > bound) {
      std::string bits(n, '0');
      for (std::size_t j = 0; j < n; ++j)
        if (k >> (n - 1 - j) & 1u)
          bits[j] = '1';
      out.emplace_back(bits);
    }
  }
  return out;
}

} // namespace randwork
