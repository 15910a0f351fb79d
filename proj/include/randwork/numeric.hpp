// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "randwork/errors.hpp"

namespace randwork {

using Natural = mpz_class;
using Rational = mpq_class;

inline Rational rational(const Natural &num, const Natural &den) {
  if (den == 0)
    throw Error("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational rational(long num, long den = 1) { return rational(Natural(num), Natural(den)); }

// 2^k for any integer k.
inline Rational pow2(long k) {
  Natural p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(k < 0 ? -k : k));
  return k < 0 ? Rational(Natural(1), p) : Rational(p);
}

inline Natural pow2_natural(unsigned long k) {
  Natural p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, k);
  return p;
}

inline std::string to_string(const Natural &n) { return n.get_str(); }

// Always "p/q", also for integers.
inline std::string to_string(const Rational &q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos)
      return rational(Natural(s), Natural(1));
    return rational(Natural(s.substr(0, slash)), Natural(s.substr(slash + 1)));
  } catch (const std::invalid_argument &) {
    throw Error("malformed rational: " + s);
  }
}

inline Natural floor_of(const Rational &q) {
  Natural r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Rational abs_of(const Rational &q) { return q < 0 ? Rational(-q) : q; }

inline bool is_power_of_two(const Natural &n) { return n > 0 && mpz_popcount(n.get_mpz_t()) == 1; }

// Exponent e with n = 2^e; n must be a power of two.
inline unsigned long log2_exact(const Natural &n) { return mpz_scan1(n.get_mpz_t(), 0); }

// Number of binary digits, 0 for n = 0.
inline unsigned long bit_length(const Natural &n) {
  return n == 0 ? 0 : mpz_sizeinbase(n.get_mpz_t(), 2);
}

// Smallest e with 2^e >= q, for q > 0.
inline long ceil_log2(const Rational &q) {
  long e = static_cast<long>(bit_length(q.get_num())) - static_cast<long>(bit_length(q.get_den())) - 1;
  while (pow2(e) < q)
    ++e;
  while (pow2(e - 1) >= q)
    --e;
  return e;
}

struct NaturalHash {
  std::size_t operator()(const Natural &n) const noexcept {
    const auto *z = n.get_mpz_t();
    std::size_t h = static_cast<std::size_t>(z->_mp_size);
    const int limbs = z->_mp_size < 0 ? -z->_mp_size : z->_mp_size;
    for (int i = 0; i < limbs; ++i)
      h = h * 1000003u ^ static_cast<std::size_t>(z->_mp_d[i]);
    return h;
  }
};

// m * 2^-e in canonical form: m odd or zero, e minimal.
class Dyadic {
public:
  Dyadic() = default;
  Dyadic(Natural mantissa, unsigned long exponent) : mantissa_(std::move(mantissa)), exponent_(exponent) {
    normalize();
  }

  static Dyadic from_rational(const Rational &q) {
    if (!is_power_of_two(q.get_den()))
      throw Error("not a dyadic rational: " + randwork::to_string(q));
    return Dyadic(q.get_num(), log2_exact(q.get_den()));
  }

  // Dyadic within 2^-n of q; exact whenever q is itself dyadic.
  static Dyadic approximate(const Rational &q, unsigned long n) {
    if (is_power_of_two(q.get_den()))
      return from_rational(q);
    return Dyadic(floor_of(q * pow2(static_cast<long>(n))), n);
  }

  const Natural &mantissa() const noexcept { return mantissa_; }
  unsigned long exponent() const noexcept { return exponent_; }
  Rational value() const { return Rational(mantissa_) * pow2(-static_cast<long>(exponent_)); }

  std::string to_string() const { return mantissa_.get_str() + "*2^-" + std::to_string(exponent_); }

  friend bool operator==(const Dyadic &a, const Dyadic &b) {
    return a.mantissa_ == b.mantissa_ && a.exponent_ == b.exponent_;
  }
  friend bool operator<(const Dyadic &a, const Dyadic &b) { return a.value() < b.value(); }

private:
  void normalize() {
    if (mantissa_ == 0) {
      exponent_ = 0;
      return;
    }
    while (exponent_ > 0 && mpz_even_p(mantissa_.get_mpz_t())) {
      mantissa_ /= 2;
      --exponent_;
    }
  }

  Natural mantissa_{0};
  unsigned long exponent_ = 0;
};

// Finite binary string stored as ASCII '0'/'1'.
class BitString {
public:
  BitString() = default;
  explicit BitString(std::string_view bits) : bits_(bits) {
    for (char c : bits_)
      if (c != '0' && c != '1')
        throw Error("bit string may only contain 0 and 1");
  }
  static BitString repeat(bool bit, std::size_t n) {
    BitString b;
    b.bits_.assign(n, bit ? '1' : '0');
    return b;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_.at(i) == '1'; }
  const std::string &str() const noexcept { return bits_; }

  BitString prefix(std::size_t n) const {
    BitString b;
    b.bits_ = bits_.substr(0, std::min(n, bits_.size()));
    return b;
  }
  BitString child(bool bit) const {
    BitString b(*this);
    b.bits_.push_back(bit ? '1' : '0');
    return b;
  }
  void push_back(bool bit) { bits_.push_back(bit ? '1' : '0'); }
  BitString operator+(const BitString &o) const {
    BitString b(*this);
    b.bits_ += o.bits_;
    return b;
  }

  bool is_prefix_of(const BitString &o) const {
    return bits_.size() <= o.bits_.size() && o.bits_.compare(0, bits_.size(), bits_) == 0;
  }
  bool comparable(const BitString &o) const { return is_prefix_of(o) || o.is_prefix_of(*this); }

  // Numeric value of the bits read as a binary integer.
  Natural as_integer() const {
    if (bits_.empty())
      return 0;
    return Natural(bits_, 2);
  }

  // Value 0.b_0 b_1 ... as a dyadic rational.
  Rational binary_fraction() const {
    return Rational(as_integer()) * pow2(-static_cast<long>(bits_.size()));
  }

  friend bool operator==(const BitString &, const BitString &) = default;
  // Length-lexicographic order.
  friend std::strong_ordering operator<=>(const BitString &a, const BitString &b) {
    if (a.size() != b.size())
      return a.size() <=> b.size();
    return a.bits_ <=> b.bits_;
  }

private:
  std::string bits_;
};

struct BitStringHash {
  std::size_t operator()(const BitString &b) const noexcept { return std::hash<std::string>{}(b.str()); }
};

// Length-lexicographic bijection between strings and naturals: "" -> 0, "0" -> 1, "1" -> 2, ...
inline Natural code_of(const BitString &s) { return pow2_natural(s.size()) - 1 + s.as_integer(); }

inline BitString string_of(const Natural &code) {
  if (code < 0)
    throw Error("negative string code");
  Natural v = code + 1;
  const unsigned long len = bit_length(v) - 1;
  Natural rest = v - pow2_natural(len);
  std::string bits = len == 0 ? std::string() : rest.get_str(2);
  bits.insert(0, len - bits.size(), '0');
  return BitString(bits);
}

// Cantor pairing <a,b> = (a+b)(a+b+1)/2 + b.
inline Natural pair(const Natural &a, const Natural &b) {
  Natural s = a + b;
  return s * (s + 1) / 2 + b;
}

inline std::pair<Natural, Natural> unpair(const Natural &z) {
  Natural w;
  Natural disc = 8 * z + 1;
  mpz_sqrt(w.get_mpz_t(), disc.get_mpz_t());
  w = (w - 1) / 2;
  Natural t = w * (w + 1) / 2;
  Natural b = z - t;
  return {w - b, b};
}

struct Triple {
  Natural first, second, third;
};

// Triples nest to the left: <a,b,c> = <<a,b>,c>.
inline Natural triple(const Natural &a, const Natural &b, const Natural &c) { return pair(pair(a, b), c); }

inline Triple untriple(const Natural &r) {
  auto [ab, c] = unpair(r);
  auto [a, b] = unpair(ab);
  return {a, b, c};
}

// Self-delimiting code of n: write n+1 in binary as 1b, emit 1^|b| 0 b.
inline BitString prefix_code(const Natural &n) {
  std::string tail = Natural(n + 1).get_str(2).substr(1);
  return BitString(std::string(tail.size(), '1') + "0" + tail);
}

// Parses one prefix code starting at pos; returns the value and the position after it.
inline std::optional<std::pair<Natural, std::size_t>> read_prefix_code(const BitString &s, std::size_t pos) {
  std::size_t ones = 0;
  while (pos + ones < s.size() && s[pos + ones])
    ++ones;
  if (pos + ones >= s.size())
    return std::nullopt;
  const std::size_t start = pos + ones + 1;
  if (start + ones > s.size())
    return std::nullopt;
  std::string bits = "1" + s.str().substr(start, ones);
  return std::make_pair(Natural(bits, 2) - 1, start + ones);
}

// Tuples of naturals as the length-lex code of their concatenated prefix codes.
inline Natural encode_tuple(const std::vector<Natural> &items) {
  BitString s;
  for (const auto &x : items)
    s = s + prefix_code(x);
  return code_of(s);
}

inline std::optional<std::vector<Natural>> decode_tuple(const Natural &code) {
  BitString s = string_of(code);
  std::vector<Natural> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto item = read_prefix_code(s, pos);
    if (!item)
      return std::nullopt;
    out.push_back(item->first);
    pos = item->second;
  }
  return out;
}

// Open interval (left, right).
struct DyadicInterval {
  Dyadic left;
  Dyadic right;

  Rational length() const { return right.value() - left.value(); }
  bool contains(const Rational &x) const { return left.value() < x && x < right.value(); }
};

inline DyadicInterval interval_of_string(const BitString &s) {
  Rational lo = s.binary_fraction();
  return {Dyadic::from_rational(lo), Dyadic::from_rational(lo + pow2(-static_cast<long>(s.size())))};
}

inline Rational slope(const Rational &fa, const Rational &fb, const Rational &a, const Rational &b) {
  if (a == b)
    throw DegenerateInterval("slope over a degenerate interval at " + to_string(a));
  return (fa - fb) / (a - b);
}

// Prefix-minimal elements of a set of strings, in length-lex order.
inline std::vector<BitString> minimal_antichain(std::vector<BitString> strings) {
  std::sort(strings.begin(), strings.end());
  strings.erase(std::unique(strings.begin(), strings.end()), strings.end());
  std::set<std::string> kept;
  std::vector<BitString> out;
  for (const auto &s : strings) {
    bool covered = false;
    for (std::size_t k = 0; k <= s.size() && !covered; ++k)
      covered = kept.count(s.str().substr(0, k)) > 0;
    if (!covered) {
      kept.insert(s.str());
      out.push_back(s);
    }
  }
  return out;
}

// Lebesgue measure of the open set generated by the strings.
inline Rational antichain_measure(const std::vector<BitString> &strings) {
  Rational total = 0;
  for (const auto &s : minimal_antichain(strings))
    total += pow2(-static_cast<long>(s.size()));
  return total;
}

// Minimum distance between k*2^-m and 1/3 + j*2^-m over |k|, |j| <= window.
inline Rational thirds_grid_gap(unsigned m, long window = 4) {
  if (m < 1)
    throw Error("grid level must be at least 1");
  const Rational step = pow2(-static_cast<long>(m));
  const Rational third = rational(1, 3);
  std::optional<Rational> best;
  for (long k = -window; k <= window; ++k)
    for (long j = -window; j <= window; ++j) {
      const Rational d = abs_of(step * k - (third + step * j));
      if (!best || d < *best)
        best = d;
    }
  if (!best)
    throw Error("empty grid window");
  return *best;
}

} // namespace randwork
