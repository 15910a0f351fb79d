// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "randwork/errors.hpp"
#include "randwork/numeric.hpp"

namespace randwork {

// A computable metric space given by its special points and a distance oracle.
// Indices are naturals; the oracle must be pure.
class SpaceDescriptor {
public:
  using DistanceFn = std::function<Rational(const Natural &, const Natural &)>;
  using LabelFn = std::function<std::string(const Natural &)>;
  using ValidFn = std::function<bool(const Natural &)>;

  SpaceDescriptor(std::string name, DistanceFn exact_distance, LabelFn label, ValidFn valid)
      : name_(std::move(name)), distance_(std::move(exact_distance)), label_(std::move(label)),
        valid_(std::move(valid)) {}

  const std::string &name() const noexcept { return name_; }

  bool is_valid(const Natural &i) const { return i >= 0 && valid_(i); }

  void check_index(const Natural &i) const {
    if (!is_valid(i))
      throw IndexError(name_ + ": unknown special point " + i.get_str());
  }

  // Dyadic within 2^-n of d(q_i, q_k). All built-in spaces have rational metrics,
  // so dyadic distances come back exact.
  Dyadic distance_approx(const Natural &i, const Natural &k, unsigned long n) const {
    return Dyadic::approximate(distance(i, k), n);
  }

  Rational distance(const Natural &i, const Natural &k) const {
    check_index(i);
    check_index(k);
    return distance_(i, k);
  }

  std::string label(const Natural &i) const {
    check_index(i);
    return label_(i);
  }

private:
  std::string name_;
  DistanceFn distance_;
  LabelFn label_;
  ValidFn valid_;
};

using SpacePtr = std::shared_ptr<const SpaceDescriptor>;

namespace detail {

inline std::vector<std::uint64_t> prime_factors(std::uint64_t q) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t p = 2; p * p <= q; ++p) {
    if (q % p == 0) {
      ps.push_back(p);
      while (q % p == 0)
        q /= p;
    }
  }
  if (q > 1)
    ps.push_back(q);
  return ps;
}

// #{1 <= k <= x : gcd(k, q) = 1} by inclusion-exclusion over the prime factors of q.
inline std::uint64_t coprime_count(std::uint64_t x, std::uint64_t q) {
  const auto ps = prime_factors(q);
  std::int64_t total = 0;
  const std::size_t subsets = std::size_t{1} << ps.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::uint64_t d = 1;
    int bits = 0;
    for (std::size_t j = 0; j < ps.size(); ++j)
      if (mask >> j & 1u) {
        d *= ps[j];
        ++bits;
      }
    total += (bits % 2 ? -1 : 1) * static_cast<std::int64_t>(x / d);
  }
  return static_cast<std::uint64_t>(total);
}

using u128 = unsigned __int128;

inline std::uint64_t totient(std::uint64_t q) {
  std::uint64_t r = q;
  for (auto p : prime_factors(q))
    r -= r / p;
  return r;
}

// Sum of Euler's totient over 1..n.
class TotientSums {
public:
  static TotientSums &instance() {
    static TotientSums t;
    return t;
  }

  u128 operator()(std::uint64_t n) {
    if (n < small_.size())
      return small_[n];
    std::lock_guard lock(mutex_);
    return large(n);
  }

private:
  TotientSums() {
    constexpr std::size_t limit = std::size_t{1} << 22;
    std::vector<std::uint64_t> phi(limit);
    for (std::size_t i = 0; i < limit; ++i)
      phi[i] = i;
    for (std::size_t i = 2; i < limit; ++i)
      if (phi[i] == i)
        for (std::size_t j = i; j < limit; j += i)
          phi[j] -= phi[j] / i;
    small_.assign(limit, 0);
    for (std::size_t i = 1; i < limit; ++i)
      small_[i] = small_[i - 1] + phi[i];
    // phi is reused as scratch; release it early
    std::vector<std::uint64_t>().swap(phi);
  }

  u128 large(std::uint64_t n) {
    if (n < small_.size())
      return small_[n];
    if (auto it = memo_.find(n); it != memo_.end())
      return it->second;
    u128 result = static_cast<u128>(n) * (n + 1) / 2;
    for (std::uint64_t d = 2; d <= n;) {
      const std::uint64_t q = n / d;
      const std::uint64_t last = n / q;
      result -= static_cast<u128>(last - d + 1) * large(q);
      d = last + 1;
    }
    memo_.emplace(n, result);
    return result;
  }

  std::vector<std::uint64_t> small_;
  std::map<std::uint64_t, u128> memo_;
  std::mutex mutex_;
};

inline Natural to_natural(u128 v) {
  Natural hi(static_cast<unsigned long>(v >> 64));
  Natural lo(static_cast<unsigned long>(v & ~std::uint64_t{0}));
  return hi * pow2_natural(64) + lo;
}

inline u128 to_u128(const Natural &n) {
  if (bit_length(n) > 127)
    throw IndexError("special point index out of range: " + n.get_str());
  Natural hi = n / pow2_natural(64);
  Natural lo = n - hi * pow2_natural(64);
  return (static_cast<u128>(hi.get_ui()) << 64) | lo.get_ui();
}

constexpr std::uint64_t max_unit_denominator = std::uint64_t{1} << 32;

} // namespace detail

// Repetition-free enumeration of Q ∩ [0,1]: 0, 1, then reduced fractions by
// increasing denominator and numerator (1/2, 1/3, 2/3, 1/4, 3/4, ...).
inline Rational unit_point(const Natural &index) {
  if (index < 0)
    throw IndexError("negative special point index");
  if (index <= 1)
    return Rational(index);
  auto &sums = detail::TotientSums::instance();
  const detail::u128 t = detail::to_u128(index - 2);
  // fractions with denominator in [2, q] number sums(q) - 1; start from the
  // asymptotic estimate 3q^2/pi^2 and walk with single totients
  const long double pi = 3.14159265358979323846L;
  std::uint64_t q = std::max<std::uint64_t>(
      2, static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(t) * pi * pi / 3.0L)));
  if (q > detail::max_unit_denominator)
    throw IndexError("special point index beyond the supported denominator range");
  detail::u128 upto = sums(q) - 1;
  while (upto <= t) {
    ++q;
    upto += detail::totient(q);
  }
  while (q > 2 && upto - detail::totient(q) > t) {
    upto -= detail::totient(q);
    --q;
  }
  const detail::u128 below = upto - detail::totient(q);
  const std::uint64_t rank = static_cast<std::uint64_t>(t - below) + 1;
  std::uint64_t plo = 1, phi = q - 1;
  while (plo < phi) {
    std::uint64_t mid = plo + (phi - plo) / 2;
    if (detail::coprime_count(mid, q) >= rank)
      phi = mid;
    else
      plo = mid + 1;
  }
  return rational(Natural(static_cast<unsigned long>(plo)), Natural(static_cast<unsigned long>(q)));
}

inline Natural unit_index(const Rational &x) {
  if (x < 0 || x > 1)
    throw IndexError("rational outside [0,1]: " + to_string(x));
  if (x.get_den() == 1)
    return x.get_num();
  if (x.get_den() > Natural(static_cast<unsigned long>(detail::max_unit_denominator)))
    throw IndexError("denominator too large for the special point enumeration");
  const std::uint64_t q = x.get_den().get_ui();
  const std::uint64_t p = x.get_num().get_ui();
  auto &sums = detail::TotientSums::instance();
  const detail::u128 before = sums(q - 1) - 1;
  return detail::to_natural(before + 2 + detail::coprime_count(p - 1, q));
}

inline SpacePtr unit_interval() {
  return std::make_shared<const SpaceDescriptor>(
      "unit-interval",
      [](const Natural &i, const Natural &k) { return abs_of(unit_point(i) - unit_point(k)); },
      [](const Natural &i) { return to_string(unit_point(i)); }, [](const Natural &) { return true; });
}

// Cantor space: index i names the eventually-zero sequence whose bit j is bit j of i.
inline bool cantor_bit(const Natural &index, unsigned long j) { return mpz_tstbit(index.get_mpz_t(), j) != 0; }

inline Natural cantor_index(const BitString &prefix) {
  Natural idx = 0;
  for (std::size_t j = 0; j < prefix.size(); ++j)
    if (prefix[j])
      mpz_setbit(idx.get_mpz_t(), j);
  return idx;
}

inline SpacePtr cantor_space() {
  return std::make_shared<const SpaceDescriptor>(
      "cantor",
      [](const Natural &i, const Natural &k) {
        if (i == k)
          return Rational(0);
        Natural x = i ^ k;
        return pow2(-static_cast<long>(mpz_scan1(x.get_mpz_t(), 0)));
      },
      [](const Natural &i) {
        std::string s;
        for (unsigned long j = 0; j < bit_length(i); ++j)
          s.push_back(cantor_bit(i, j) ? '1' : '0');
        return s + "0^w";
      },
      [](const Natural &) { return true; });
}

// Baire space: index 0 is the zero sequence; index n > 0 with set bits b_0 < ... < b_m
// names (b_0, b_1 - b_0 - 1, ..., b_m - b_{m-1}) followed by zeros. The last entry is
// nonzero, so every eventually-zero sequence has exactly one index.
inline std::vector<Natural> baire_sequence(const Natural &index) {
  std::vector<Natural> out;
  long prev = -1;
  const unsigned long len = bit_length(index);
  for (unsigned long j = 0; j < len; ++j)
    if (mpz_tstbit(index.get_mpz_t(), j)) {
      out.emplace_back(static_cast<long>(j) - prev - 1);
      prev = static_cast<long>(j);
    }
  if (!out.empty())
    out.back() += 1;
  return out;
}

inline SpacePtr baire_space() {
  return std::make_shared<const SpaceDescriptor>(
      "baire",
      [](const Natural &i, const Natural &k) {
        if (i == k)
          return Rational(0);
        auto a = baire_sequence(i), b = baire_sequence(k);
        std::size_t j = 0;
        while (j < a.size() && j < b.size() && a[j] == b[j])
          ++j;
        return pow2(-static_cast<long>(j));
      },
      [](const Natural &i) {
        std::string s = "(";
        for (const auto &v : baire_sequence(i))
          s += v.get_str() + ",";
        return s + "0,...)";
      },
      [](const Natural &) { return true; });
}

// Tree space: index 2n + r is the generator <r, n>. The metric is the shortest-path
// completion of the generator distances d(<0,n>,<1,n>) = 2^-n, d(<r,n>,<k,n+1>) = 2^-n-1.
inline Natural tree_point(unsigned long level, bool side) { return Natural(2) * level + (side ? 1 : 0); }

inline Rational tree_distance(const Natural &i, const Natural &k) {
  if (i == k)
    return 0;
  Natural li = i / 2, lk = k / 2;
  if (li == lk)
    return pow2(-static_cast<long>(li.get_ui()));
  if (li > lk)
    std::swap(li, lk);
  return pow2(-static_cast<long>(li.get_ui())) - pow2(-static_cast<long>(lk.get_ui()));
}

inline SpacePtr tree_space() {
  return std::make_shared<const SpaceDescriptor>(
      "tree", tree_distance,
      [](const Natural &i) {
        Natural level = i / 2;
        return "<" + Natural(i - 2 * level).get_str() + "," + level.get_str() + ">";
      },
      [](const Natural &i) { return i / 2 < Natural(1u << 30); });
}

// Finitely many points on the line; used for scripted spaces and for Omega approximations.
inline SpacePtr finite_line_space(std::string name, std::vector<Rational> points) {
  auto pts = std::make_shared<const std::vector<Rational>>(std::move(points));
  return std::make_shared<const SpaceDescriptor>(
      std::move(name),
      [pts](const Natural &i, const Natural &k) { return abs_of((*pts)[i.get_ui()] - (*pts)[k.get_ui()]); },
      [pts](const Natural &i) { return to_string((*pts)[i.get_ui()]); },
      [pts](const Natural &i) { return i < Natural(static_cast<unsigned long>(pts->size())); });
}

// Special points q_s = Omega_s of a finished run.
inline SpacePtr omega_space(std::vector<Rational> omegas) { return finite_line_space("omega", std::move(omegas)); }

// Spaces addressable by name; the finite ones need data and are built directly.
inline const std::vector<std::string> &space_names() {
  static const std::vector<std::string> names{"unit-interval", "cantor", "baire", "tree"};
  return names;
}

inline SpacePtr space_by_name(const std::string &name) {
  if (name == "unit-interval")
    return unit_interval();
  if (name == "cantor")
    return cantor_space();
  if (name == "baire")
    return baire_space();
  if (name == "tree")
    return tree_space();
  throw Error("unknown space '" + name + "'");
}

struct CauchyName {
  SpacePtr space;
  std::vector<Natural> entries;
};

struct CauchyViolation {
  std::size_t s;
  std::size_t t;
  Dyadic distance;
};

// Every pair s <= t with d(p_s, p_t) > 2^-(s + first_index) + 2^-n at precision n; first_index
// is the Cauchy index of the first entry.
inline std::vector<CauchyViolation> validate_cauchy_name(const CauchyName &name, unsigned long n,
                                                         std::size_t first_index = 0) {
  std::vector<CauchyViolation> bad;
  const Rational slack = pow2(-static_cast<long>(n));
  for (std::size_t s = 0; s < name.entries.size(); ++s)
    for (std::size_t t = s; t < name.entries.size(); ++t) {
      Dyadic d = name.space->distance_approx(name.entries[s], name.entries[t], n);
      if (d.value() > pow2(-static_cast<long>(s + first_index)) + slack)
        bad.push_back({s, t, d});
    }
  return bad;
}

// A Markov-computable map: entry n of the output name depends on the first demand(n)
// entries of the input name.
struct ComputableMap {
  SpacePtr source;
  SpacePtr target;
  std::function<Natural(std::span<const Natural>, unsigned long)> apply;
  std::function<std::size_t(unsigned long)> demand;
  std::optional<unsigned> inverse_lipschitz;
  // Map on special points, when the map sends special points to special points.
  std::function<std::optional<Natural>(const Natural &)> on_point;
};

inline Natural markov_apply(const ComputableMap &f, const CauchyName &name, unsigned long n) {
  const std::size_t need = f.demand(n);
  if (name.entries.size() < need)
    throw DemandError(need, name.entries.size());
  return f.apply(std::span<const Natural>(name.entries.data(), need), n);
}

inline CauchyName markov_image(const ComputableMap &f, const CauchyName &name) {
  CauchyName out{f.target, {}};
  for (unsigned long n = 0; f.demand(n) <= name.entries.size(); ++n)
    out.entries.push_back(markov_apply(f, name, n));
  return out;
}

inline ComputableMap identity_map(SpacePtr space) {
  ComputableMap f;
  f.source = space;
  f.target = space;
  f.apply = [](std::span<const Natural> prefix, unsigned long n) { return prefix[n]; };
  f.demand = [](unsigned long n) { return static_cast<std::size_t>(n + 1); };
  f.inverse_lipschitz = 0;
  f.on_point = [](const Natural &p) { return std::optional<Natural>(p); };
  return f;
}

// x -> x/2 on the unit interval.
inline ComputableMap halving_map() {
  auto space = unit_interval();
  ComputableMap f;
  f.source = space;
  f.target = space;
  f.apply = [](std::span<const Natural> prefix, unsigned long n) { return unit_index(unit_point(prefix[n]) / 2); };
  f.demand = [](unsigned long n) { return static_cast<std::size_t>(n + 1); };
  f.on_point = [](const Natural &p) { return std::optional<Natural>(unit_index(unit_point(p) / 2)); };
  return f;
}

// Sum over i < len of 2 * bit_i * 3^-(i+1).
inline Rational ternary_value(const BitString &bits, std::size_t len) {
  Rational v = 0, w = rational(2, 3);
  for (std::size_t i = 0; i < len && i < bits.size(); ++i, w /= 3)
    if (bits[i])
      v += w;
  return v;
}

// Cauchy name in the unit interval of the ternary Cantor-set image of the bits.
// Entry n uses the first n+2 bits; only entries fully determined by the prefix are produced.
inline CauchyName cantor_embed(const BitString &bits) {
  CauchyName out{unit_interval(), {}};
  for (std::size_t n = 0; n + 2 <= bits.size(); ++n)
    out.entries.push_back(unit_index(ternary_value(bits, n + 2)));
  return out;
}

// Inverse of the ternary embedding on its range: recovers the bits of a point given
// to accuracy better than 3^-len / 2.
inline BitString cantor_unembed(const Rational &x, std::size_t len) {
  BitString out;
  Rational lo = 0, width = 1;
  for (std::size_t i = 0; i < len; ++i) {
    width /= 3;
    const bool bit = x >= lo + 2 * width - width / 2;
    out.push_back(bit);
    if (bit)
      lo += 2 * width;
  }
  return out;
}

// Exponent v with d(X,Y) <= 2^v |F(X) - F(Y)| for all X, Y first differing before
// position depth. The ternary embedding is only Hölder globally, so the certificate
// is tied to a resolution.
inline unsigned cantor_embed_inverse_exponent(unsigned depth) {
  // worst pair differs at k = depth-1: 2^-k <= 2^v 3^-(k+1)
  Rational ratio = pow2(-static_cast<long>(depth) + 1);
  for (unsigned i = 0; i < depth; ++i)
    ratio *= 3;
  return static_cast<unsigned>(std::max<long>(0, ceil_log2(ratio)));
}

// The ternary embedding as a map from Cantor space into the unit interval.
inline ComputableMap cantor_embed_map(unsigned certified_depth) {
  ComputableMap f;
  f.source = cantor_space();
  f.target = unit_interval();
  f.apply = [](std::span<const Natural> prefix, unsigned long n) {
    const Natural &idx = prefix[n + 2];
    BitString bits;
    for (unsigned long j = 0; j < n + 2; ++j)
      bits.push_back(cantor_bit(idx, j));
    return unit_index(ternary_value(bits, n + 2));
  };
  f.demand = [](unsigned long n) { return static_cast<std::size_t>(n + 3); };
  f.inverse_lipschitz = cantor_embed_inverse_exponent(certified_depth);
  f.on_point = [](const Natural &p) {
    BitString bits;
    for (unsigned long j = 0; j < bit_length(p); ++j)
      bits.push_back(cantor_bit(p, j));
    return std::optional<Natural>(unit_index(ternary_value(bits, bits.size())));
  };
  return f;
}

// Cauchy name in Cantor space of a bit sequence: entry n is the prefix of length n padded with zeros.
inline CauchyName cantor_name(const BitString &bits) {
  CauchyName out{cantor_space(), {}};
  for (std::size_t n = 0; n <= bits.size(); ++n)
    out.entries.push_back(cantor_index(bits.prefix(n)));
  return out;
}

} // namespace randwork
