// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "randwork/errors.hpp"
#include "randwork/numeric.hpp"

namespace randwork {

// Effectively closed subset of [0,1]: the unit interval minus open intervals enumerated
// over stages. Cylinder removals make it a class of the Cantor space as well; the
// string-level queries read it that way.
class PiClass {
public:
  struct Removal {
    std::size_t stage;
    Rational left;
    Rational right;
  };
  struct Piece {
    Rational left;
    Rational right;
  };

  PiClass() = default;
  explicit PiClass(std::string name) : name_(std::move(name)) {}

  const std::string &name() const noexcept { return name_; }
  const std::vector<Removal> &removals() const noexcept { return removals_; }

  // Removes the open interval (left, right). To drop an endpoint of [0,1] as well, let the
  // interval reach past it.
  PiClass &remove_interval(Rational left, Rational right, std::size_t stage = 0) {
    if (!(left < right))
      throw DegenerateInterval("empty removal (" + to_string(left) + ", " + to_string(right) + ")");
    removals_.push_back({stage, std::move(left), std::move(right)});
    return *this;
  }

  // Removes the cylinder of s. Inner dyadic endpoints stay as isolated points of the
  // interval reading; they carry no measure.
  PiClass &remove_cylinder(const BitString &s, std::size_t stage = 0) {
    Rational lo = s.binary_fraction();
    Rational hi = lo + pow2(-static_cast<long>(s.size()));
    if (lo == 0)
      lo = -1;
    if (hi == 1)
      hi = 2;
    return remove_interval(lo, hi, stage);
  }

  // Connected components of the removed open set at stage s, left to right.
  std::vector<Piece> removed_components(std::size_t s) const {
    std::vector<Piece> active;
    for (const auto &r : removals_)
      if (r.stage <= s)
        active.push_back({r.left, r.right});
    std::sort(active.begin(), active.end(), [](const Piece &a, const Piece &b) { return a.left < b.left; });
    std::vector<Piece> merged;
    for (auto &p : active) {
      if (!merged.empty() && p.left < merged.back().right)
        merged.back().right = std::max(merged.back().right, p.right);
      else
        merged.push_back(std::move(p));
    }
    return merged;
  }

  // The stage-s class as closed pieces [left, right] (possibly single points), left to right.
  std::vector<Piece> pieces(std::size_t s) const {
    std::vector<Piece> out;
    Rational cursor = 0; // leftmost point not yet known to be removed
    for (const auto &c : removed_components(s)) {
      if (c.right <= 0)
        continue;
      if (c.left >= 1)
        break;
      if (c.left >= cursor)
        out.push_back({cursor, c.left});
      cursor = c.right;
    }
    if (cursor <= 1)
      out.push_back({cursor, Rational(1)});
    return out;
  }

  bool contains(const Rational &x, std::size_t s) const {
    if (x < 0 || x > 1)
      return false;
    for (const auto &r : removals_)
      if (r.stage <= s && r.left < x && x < r.right)
        return false;
    return true;
  }

  bool empty(std::size_t s) const { return pieces(s).empty(); }

  // The part of the stage-s class inside the closed interval [a, b].
  std::vector<Piece> pieces_within(const Rational &a, const Rational &b, std::size_t s) const {
    std::vector<Piece> out;
    for (const auto &p : pieces(s)) {
      Rational lo = std::max(p.left, a), hi = std::min(p.right, b);
      if (lo <= hi)
        out.push_back({lo, hi});
    }
    return out;
  }

  // Measure of the stage-s class inside (a, b).
  Rational measure_within(const Rational &a, const Rational &b, std::size_t s) const {
    Rational total = 0;
    for (const auto &p : pieces_within(a, b, s))
      total += p.right - p.left;
    return total;
  }

  // Cantor reading: [sigma] meets the class iff a positive part of its interval survives.
  bool meets(const BitString &sigma, std::size_t s) const {
    auto iv = interval_of_string(sigma);
    return measure_within(iv.left.value(), iv.right.value(), s) > 0;
  }

  Rational measure(std::size_t s) const { return measure_within(0, 1, s); }

  // Last stage at which something is removed.
  std::size_t final_stage() const {
    std::size_t out = 0;
    for (const auto &r : removals_)
      out = std::max(out, r.stage);
    return out;
  }

private:
  std::string name_ = "class";
  std::vector<Removal> removals_;
};

// Middle-thirds construction up to the given depth; level k is removed at stage k.
inline PiClass middle_thirds_class(unsigned depth) {
  PiClass c("middle-thirds");
  std::vector<std::pair<Rational, Rational>> level{{Rational(0), Rational(1)}};
  for (unsigned k = 0; k < depth; ++k) {
    std::vector<std::pair<Rational, Rational>> next;
    for (const auto &[a, b] : level) {
      const Rational third = (b - a) / 3;
      c.remove_interval(a + third, b - third, k);
      next.emplace_back(a, a + third);
      next.emplace_back(b - third, b);
    }
    level = std::move(next);
  }
  return c;
}

} // namespace randwork
