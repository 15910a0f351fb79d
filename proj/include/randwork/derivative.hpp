// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "randwork/errors.hpp"
#include "randwork/martingale.hpp"
#include "randwork/numeric.hpp"
#include "randwork/pi_class.hpp"

namespace randwork {

inline Rational floor_to_grid(const Rational &q, unsigned long e) {
  return Rational(floor_of(q * pow2(static_cast<long>(e)))) * pow2(-static_cast<long>(e));
}

inline Rational ceil_to_grid(const Rational &q, unsigned long e) { return -floor_to_grid(-q, e); }

// Entry k of the Cauchy name of S_f(a,b): endpoints evaluated precisely enough that the
// entry is within 2^-k of the true slope.
inline Rational slope_cauchy_entry(const FunctionOracle &f, const Rational &a, const Rational &b, unsigned long k) {
  const long width_bits = std::max(0L, -ceil_log2(abs_of(b - a)));
  const unsigned long prec = k + static_cast<unsigned long>(width_bits) + 2;
  return slope(f.eval(a, prec), f.eval(b, prec), a, b);
}

struct SlopeWindow {
  Rational center;
  Rational scale;              // h: every sampled pair has 0 < b - a <= h
  unsigned long resolution;    // grid points are center + j 2^-resolution
  unsigned long precision = 40; // oracle precision for endpoint values
};

struct SlopeBounds {
  Rational lo;
  Rational hi;
  std::size_t pairs = 0;
};

// Offsets j 2^-g with 0 <= j 2^-g <= h/2.
inline std::vector<Rational> window_offsets(const Rational &h, unsigned long g) {
  if (h <= 0)
    throw Error("slope window scale must be positive");
  std::vector<Rational> out;
  const Rational step = pow2(-static_cast<long>(g));
  for (Rational d = 0; d <= h / 2; d += step)
    out.push_back(d);
  return out;
}

// Extreme slopes S_f(a,b) over grid pairs a <= z <= b with a < b.
inline SlopeBounds slope_window_bounds(const FunctionOracle &f, const SlopeWindow &w) {
  const auto offsets = window_offsets(w.scale, w.resolution);
  if (offsets.size() < 2)
    throw Error("slope window grid is empty at resolution " + std::to_string(w.resolution));
  std::vector<Rational> left, right;
  for (const auto &d : offsets) {
    left.push_back(f.eval(w.center - d, w.precision));
    right.push_back(f.eval(w.center + d, w.precision));
  }
  SlopeBounds out;
  for (std::size_t i = 0; i < offsets.size(); ++i)
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      if (i == 0 && j == 0)
        continue;
      const Rational s = slope(left[i], right[j], w.center - offsets[i], w.center + offsets[j]);
      if (out.pairs == 0 || s < out.lo)
        out.lo = s;
      if (out.pairs == 0 || s > out.hi)
        out.hi = s;
      ++out.pairs;
    }
  return out;
}

enum class DenjoyTrend { converging, diverging_up, diverging_down, two_sided_diverging, inconclusive };

inline std::string to_string(DenjoyTrend t) {
  switch (t) {
  case DenjoyTrend::converging:
    return "converging";
  case DenjoyTrend::diverging_up:
    return "diverging-up";
  case DenjoyTrend::diverging_down:
    return "diverging-down";
  case DenjoyTrend::two_sided_diverging:
    return "two-sided-diverging";
  case DenjoyTrend::inconclusive:
    return "inconclusive";
  }
  return "inconclusive";
}

struct DenjoyConfig {
  Rational growth = 2;             // per-scale factor that counts as divergence
  unsigned long extra_resolution = 3; // grid resolution beyond the scale
};

struct DenjoyReport {
  std::vector<Rational> scales;
  std::vector<SlopeBounds> bounds;
  std::vector<unsigned long> resolutions;
  DenjoyTrend trend = DenjoyTrend::inconclusive;
  Rational estimate = 0; // midpoint at the finest scale
};

// Diagnostic only: classifies how the slope window behaves as the scale shrinks.
inline DenjoyReport denjoy_probe(const FunctionOracle &f, const Rational &z, const std::vector<Rational> &scales,
                                 const DenjoyConfig &cfg = {}) {
  DenjoyReport r;
  r.scales = scales;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (k > 0 && !(scales[k] < scales[k - 1]))
      throw Error("denjoy probe scales must be strictly decreasing");
    const unsigned long g = static_cast<unsigned long>(std::max(0L, -ceil_log2(scales[k]))) + cfg.extra_resolution;
    r.resolutions.push_back(g);
    r.bounds.push_back(slope_window_bounds(f, {z, scales[k], g}));
  }
  if (r.bounds.empty())
    return r;
  r.estimate = (r.bounds.back().lo + r.bounds.back().hi) / 2;
  if (r.bounds.size() < 2)
    return r;
  const std::size_t last = r.bounds.size() - 1;
  const std::size_t transitions = std::min<std::size_t>(3, last);
  bool up = true, down = true;
  for (std::size_t k = last - transitions; k < last; ++k) {
    const auto &a = r.bounds[k], &b = r.bounds[k + 1];
    up = up && a.hi > 0 && b.hi >= cfg.growth * a.hi;
    down = down && a.lo < 0 && b.lo <= cfg.growth * a.lo;
  }
  if (up && down)
    r.trend = DenjoyTrend::two_sided_diverging;
  else if (up)
    r.trend = DenjoyTrend::diverging_up;
  else if (down)
    r.trend = DenjoyTrend::diverging_down;
  else {
    bool shrinking = true;
    for (std::size_t k = 0; k < last; ++k)
      shrinking = shrinking && r.bounds[k + 1].hi - r.bounds[k + 1].lo <= r.bounds[k].hi - r.bounds[k].lo;
    const Rational first = r.bounds.front().hi - r.bounds.front().lo;
    const Rational final = r.bounds.back().hi - r.bounds.back().lo;
    if (shrinking && (final == 0 || 2 * final <= first))
      r.trend = DenjoyTrend::converging;
  }
  return r;
}

// Piecewise linear function with f(z) = 0 and f(z +- 2^-k) = (-1)^k for 1 <= k <= depth;
// its slopes at scale 2^-k are about +-2^k on both sides.
inline FunctionOracle oscillator_function(const Rational &z, unsigned depth) {
  std::vector<std::pair<Rational, Rational>> knots{{z, Rational(0)}};
  for (unsigned k = 1; k <= depth; ++k) {
    const Rational v = k % 2 == 0 ? 1 : -1;
    knots.emplace_back(z + pow2(-static_cast<long>(k)), v);
    knots.emplace_back(z - pow2(-static_cast<long>(k)), v);
  }
  return piecewise_linear(std::move(knots), "oscillator");
}

struct SlopeGap {
  Rational estimate;     // one-sided slope over the smallest right step
  Rational gap;          // max |estimate - S_f(z-s, z+r)|
  Rational one_sided_gap; // max |estimate - S_f(z, z+r)|, |estimate - S_f(z-s, z)|
  bool one_sided_within = false;
};

// Two-sided slopes are convex combinations of one-sided ones, so one_sided_within implies gap <= eps.
inline SlopeGap two_sided_slope_gap(const FunctionOracle &f, const Rational &z, const Rational &eps,
                                    const Rational &delta, unsigned long resolution, unsigned long precision = 40) {
  const Rational step = pow2(-static_cast<long>(resolution));
  std::vector<Rational> steps;
  for (Rational d = step; d <= delta; d += step)
    steps.push_back(d);
  if (steps.empty())
    throw Error("slope gap grid is empty");
  const Rational fz = f.eval(z, precision);
  std::vector<Rational> left, right;
  for (const auto &d : steps) {
    left.push_back(f.eval(z - d, precision));
    right.push_back(f.eval(z + d, precision));
  }
  SlopeGap g;
  g.estimate = slope(fz, right[0], z, z + steps[0]);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    g.one_sided_gap = std::max(g.one_sided_gap, abs_of(g.estimate - slope(fz, right[i], z, z + steps[i])));
    g.one_sided_gap = std::max(g.one_sided_gap, abs_of(g.estimate - slope(left[i], fz, z - steps[i], z)));
    for (std::size_t j = 0; j < steps.size(); ++j)
      g.gap = std::max(g.gap, abs_of(g.estimate - slope(left[i], right[j], z - steps[i], z + steps[j])));
  }
  g.one_sided_within = g.one_sided_gap <= eps;
  return g;
}

// Membership probe for the class of x whose slopes over intervals of length <= 2^-r around x
// have first Cauchy entry > -n + 1. Returns the number of offending grid pairs.
inline std::size_t slope_floor_violations(const FunctionOracle &f, const Rational &x, long n, unsigned long r,
                                          unsigned long resolution) {
  const auto offsets = window_offsets(pow2(-static_cast<long>(r)), resolution);
  std::size_t bad = 0;
  for (const auto &u : offsets)
    for (const auto &v : offsets) {
      if (u == 0 && v == 0)
        continue;
      if (!(slope_cauchy_entry(f, x - u, x + v, 0) > Rational(-n + 1)))
        ++bad;
    }
  return bad;
}

struct SlopeBelowCount {
  std::size_t strict = 0;    // intervals with slope entry < p
  std::size_t nonstrict = 0; // intervals with slope entry <= p
};

// Stage-s witnesses for "some small interval around the point has slope below p": dyadic
// intervals of length 2^-j, 1 <= j <= s, inside [0,1].
inline SlopeBelowCount slope_below_witnesses(const FunctionOracle &f, const Rational &p, std::size_t s) {
  SlopeBelowCount c;
  for (std::size_t j = 1; j <= s; ++j) {
    const Rational step = pow2(-static_cast<long>(j));
    for (std::size_t k = 0; k < (std::size_t{1} << j); ++k) {
      const Rational a = Rational(static_cast<long>(k)) * step;
      const Rational v = slope_cauchy_entry(f, a, a + step, s);
      if (v < p)
        ++c.strict;
      if (v <= p)
        ++c.nonstrict;
    }
  }
  return c;
}

// Maps precision n to a resolution m with |x - y| <= 2^-m implying |h(x) - h(y)| <= 2^-n.
using Modulus = std::function<unsigned long(unsigned long)>;

inline Modulus lipschitz_modulus(unsigned long log_constant = 0) {
  return [log_constant](unsigned long n) { return n + log_constant; };
}

// One sweep of the tree of grid intervals at precision k: pruned where the stage-s class is
// absent, with an upper (or lower) bound for h on each surviving interval.
inline std::optional<Rational> pi_class_sweep(const FunctionOracle &h, const PiClass &E, unsigned long k,
                                              std::size_t s, const Modulus &modulus, bool upper) {
  const unsigned long m = modulus(k + 1);
  const Rational width = pow2(-static_cast<long>(m));
  std::set<Natural> cells;
  const Natural top = pow2_natural(m) - 1;
  for (const auto &p : E.pieces(s)) {
    Natural lo = floor_of(p.left / width);
    if (lo > 0 && Rational(lo) * width == p.left)
      lo -= 1;
    Natural hi = floor_of(p.right / width);
    if (hi > top)
      hi = top;
    for (Natural j = lo; j <= hi; ++j)
      cells.insert(j);
  }
  if (cells.empty())
    return std::nullopt;
  const Rational slack = pow2(-static_cast<long>(k + 2)) + pow2(-static_cast<long>(k + 1));
  std::optional<Rational> best;
  for (const auto &j : cells) {
    const Rational v = h.eval(Rational(j) * width, k + 2);
    const Rational bound = upper ? ceil_to_grid(v + slack, k + 3) : floor_to_grid(v - slack, k + 3);
    if (!best || (upper ? bound > *best : bound < *best))
      best = bound;
  }
  return best;
}

// Right-c.e. upper approximation of sup over the class of h; nonincreasing in n and s.
// nullopt reports that the stage-s class is empty.
inline std::optional<Dyadic> pi_class_sup(const FunctionOracle &h, const PiClass &E, unsigned long n, std::size_t s,
                                          const Modulus &modulus = lipschitz_modulus()) {
  std::optional<Rational> best;
  for (unsigned long k = 0; k <= n; ++k) {
    auto v = pi_class_sweep(h, E, k, s, modulus, true);
    if (!v)
      return std::nullopt;
    if (!best || *v < *best)
      best = v;
  }
  return Dyadic::from_rational(*best);
}

// Left-c.e. lower approximation of inf over the class of h; nondecreasing in n and s.
inline std::optional<Dyadic> pi_class_inf(const FunctionOracle &h, const PiClass &E, unsigned long n, std::size_t s,
                                          const Modulus &modulus = lipschitz_modulus()) {
  std::optional<Rational> best;
  for (unsigned long k = 0; k <= n; ++k) {
    auto v = pi_class_sweep(h, E, k, s, modulus, false);
    if (!v)
      return std::nullopt;
    if (!best || *v > *best)
      best = v;
  }
  return Dyadic::from_rational(*best);
}

// Nondecreasing total extension of an h that is nondecreasing on the class. Precision level n
// refines the grid until every grid interval meeting the class sees h vary by less than
// 2^-(n+1); the knots are the extreme class points of those intervals, and the removed
// runs between them are bridged linearly.
class MonotoneExtension {
public:
  MonotoneExtension(FunctionOracle h, PiClass E, std::size_t stage, unsigned long max_resolution = 24)
      : h_(std::move(h)), E_(std::move(E)), stage_(stage), max_resolution_(max_resolution) {
    if (E_.empty(stage_))
      throw Error("monotone extension of an empty class");
  }

  const std::vector<std::pair<Rational, Rational>> &knots(unsigned long n) {
    auto it = knots_.find(n);
    if (it == knots_.end())
      it = knots_.emplace(n, build(n)).first;
    return it->second;
  }

  unsigned long resolution(unsigned long n) {
    knots(n);
    return resolution_.at(n);
  }

  // g(x) to within 2^-(n+3); |g(x) - h(x)| < 2^-n on the class.
  Dyadic value(const Rational &x, unsigned long n) {
    const auto &k = knots(n);
    Rational y;
    if (x <= k.front().first)
      y = k.front().second;
    else if (x >= k.back().first)
      y = k.back().second;
    else {
      auto hi = std::upper_bound(k.begin(), k.end(), x, [](const Rational &v, const auto &p) { return v < p.first; });
      auto lo = hi - 1;
      y = lo->second + (hi->second - lo->second) * (x - lo->first) / (hi->first - lo->first);
    }
    return Dyadic::approximate(y, n + 3);
  }

private:
  std::vector<std::pair<Rational, Rational>> build(unsigned long n) {
    const unsigned long prec = n + 3;
    const Rational err = pow2(-static_cast<long>(prec));
    const Rational fit = pow2(-static_cast<long>(n + 1));
    for (unsigned long p = n + 1; p <= max_resolution_; ++p) {
      const Rational width = pow2(-static_cast<long>(p));
      std::vector<std::pair<Rational, Rational>> raw;
      bool fits = true;
      const std::size_t cells = std::size_t{1} << p;
      // Cells meeting the class, found by walking its pieces.
      std::vector<std::size_t> meeting;
      for (const auto &piece : E_.pieces(stage_)) {
        std::size_t lo = static_cast<std::size_t>(floor_of(piece.left / width).get_ui());
        std::size_t hi = static_cast<std::size_t>(floor_of(piece.right / width).get_ui());
        lo = std::min(lo, cells - 1);
        hi = std::min(hi, cells - 1);
        for (std::size_t j = lo; j <= hi; ++j)
          if (meeting.empty() || meeting.back() != j)
            meeting.push_back(j);
      }
      for (std::size_t j : meeting) {
        const Rational a = Rational(static_cast<long>(j)) * width;
        auto in = E_.pieces_within(a, a + width, stage_);
        if (in.empty())
          continue;
        const Rational lo_pt = in.front().left, hi_pt = in.back().right;
        const Rational i_val = eval(lo_pt, prec), s_val = eval(hi_pt, prec);
        if (s_val < i_val - 2 * err)
          throw ContractViolation("h decreases on the class between " + to_string(lo_pt) + " and " +
                                  to_string(hi_pt));
        if (!raw.empty() && i_val < raw.back().second - 2 * err)
          throw ContractViolation("h decreases on the class near " + to_string(lo_pt));
        if (s_val - i_val >= fit)
          fits = false;
        if (raw.empty() || raw.back().first != lo_pt)
          raw.emplace_back(lo_pt, i_val);
        if (hi_pt != lo_pt)
          raw.emplace_back(hi_pt, s_val);
      }
      if (!fits)
        continue;
      for (std::size_t i = 1; i < raw.size(); ++i)
        raw[i].second = std::max(raw[i].second, raw[i - 1].second);
      resolution_[n] = p;
      return raw;
    }
    throw BudgetExceeded("monotone extension found no fitting grid up to resolution " +
                         std::to_string(max_resolution_));
  }

  const Rational &eval(const Rational &x, unsigned long prec) {
    auto key = std::make_pair(x, prec);
    auto it = evals_.find(key);
    if (it == evals_.end())
      it = evals_.emplace(key, h_.eval(x, prec)).first;
    return it->second;
  }

  FunctionOracle h_;
  PiClass E_;
  std::size_t stage_;
  unsigned long max_resolution_;
  std::map<unsigned long, std::vector<std::pair<Rational, Rational>>> knots_;
  std::map<unsigned long, unsigned long> resolution_;
  std::map<std::pair<Rational, unsigned long>, Rational> evals_;
};

inline Dyadic monotone_extension(const FunctionOracle &h, const PiClass &E, const Rational &x, unsigned long n,
                                 std::size_t stage) {
  MonotoneExtension ext(h, E, stage);
  return ext.value(x, n);
}

struct PorosityWitness {
  Rational alpha;
  Rational beta;
  Rational hole_left;
  Rational hole_right;
};

// For each alpha, the first beta = alpha 2^-j (j <= max_halvings) for which (z-beta, z+beta)
// contains an open hole of length eps*beta missing the stage-s class. The hole sits in the
// leftmost gap of [0,1] that is wide enough, eps*beta from its left end when room allows.
inline std::vector<std::pair<Rational, std::optional<PorosityWitness>>>
porosity_probe(const PiClass &E, const Rational &z, const Rational &eps, const std::vector<Rational> &alphas,
               std::size_t s, unsigned max_halvings = 12) {
  if (!(eps > 0 && eps <= 1))
    throw Error("porosity constant must lie in (0,1]");
  std::vector<std::pair<Rational, Rational>> gaps;
  const auto pieces = E.pieces(s);
  Rational cursor = 0;
  for (const auto &p : pieces) {
    if (p.left > cursor)
      gaps.emplace_back(cursor, p.left);
    cursor = p.right;
  }
  if (pieces.empty())
    gaps.emplace_back(Rational(0), Rational(1));
  else if (cursor < 1)
    gaps.emplace_back(cursor, Rational(1));

  std::vector<std::pair<Rational, std::optional<PorosityWitness>>> out;
  for (const auto &alpha : alphas) {
    std::optional<PorosityWitness> found;
    Rational beta = alpha;
    for (unsigned j = 0; j <= max_halvings && !found; ++j, beta /= 2) {
      const Rational len_needed = eps * beta;
      for (const auto &[a, b] : gaps) {
        const Rational lo = std::max(a, Rational(z - beta)), hi = std::min(b, Rational(z + beta));
        if (hi - lo < len_needed)
          continue;
        const Rational margin = std::min(len_needed, Rational((hi - lo - len_needed) / 2));
        found = PorosityWitness{alpha, beta, lo + margin, lo + margin + len_needed};
        break;
      }
    }
    out.emplace_back(alpha, found);
  }
  return out;
}

} // namespace randwork
