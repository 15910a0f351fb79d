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
#include "randwork/metric.hpp"
#include "randwork/numeric.hpp"
#include "randwork/run_log.hpp"

namespace randwork {

// Stage-s complexities of every described word below a size cap, plus the pair words
// <p, n> grouped by their second coordinate.
struct StageIndex {
  Stage stage = 0;
  std::map<Natural, std::size_t> words;
  std::map<Natural, std::map<Natural, std::size_t>> pairs; // n -> p -> K_s(<p, n>)

  Complexity K(const Natural &w) const {
    auto it = words.find(w);
    return it == words.end() ? Complexity() : Complexity(it->second);
  }
  const std::map<Natural, std::size_t> *pairs_at(const Natural &n) const {
    auto it = pairs.find(n);
    return it == pairs.end() ? nullptr : &it->second;
  }
};

inline StageIndex stage_index(const UniversalMachine &u, Stage s, unsigned long max_bits = 96) {
  StageIndex idx;
  idx.stage = s;
  for (const auto &[w, hist] : u.minima()) {
    if (bit_length(w) > max_bits)
      continue;
    Complexity k;
    for (const auto &m : hist) {
      if (m.stage > s)
        break;
      k = m.length;
    }
    if (!k)
      continue;
    idx.words.emplace(w, *k);
    auto [p, n] = unpair(w);
    idx.pairs[n][p] = *k;
  }
  return idx;
}

// Copies every computation of the universal machine through a map on outputs: for each
// new U(sigma) = w with f(w) defined, the new machine gets sigma -> f(w) one stage later.
// Returns the machine id; its coding constant is id + 1.
inline std::size_t install_image_machine(UniversalMachine &u, std::string name,
                                         std::function<std::optional<Natural>(const Natural &)> f) {
  const std::size_t id = u.reserve_machine(std::move(name));
  u.add_observer(id, [id, f = std::move(f)](UniversalMachine &m, const Halting &h) {
    if (h.machine == id || h.input.size() > m.max_input_length())
      return;
    if (auto out = f(h.output))
      m.add_entry(id, h.input, *out, h.stage + 1);
  });
  return id;
}

// Word coding an initial segment of a function N -> N.
inline Natural function_prefix_word(const std::vector<Natural> &alpha, std::size_t n) {
  return encode_tuple(std::vector<Natural>(alpha.begin(), alpha.begin() + static_cast<long>(n)));
}

// Word coding the finite graph {<k, alpha(k)> : k < n}, listed in increasing order.
inline Natural graph_prefix_word(const std::vector<Natural> &alpha, std::size_t n) {
  std::vector<Natural> codes;
  for (std::size_t k = 0; k < n; ++k)
    codes.push_back(pair(Natural(static_cast<unsigned long>(k)), alpha[k]));
  std::sort(codes.begin(), codes.end());
  return encode_tuple(codes);
}

inline std::optional<long> complexity_margin(const Complexity &lhs, const Complexity &rhs, std::size_t b) {
  if (!lhs || !rhs)
    return std::nullopt;
  return static_cast<long>(*lhs) - static_cast<long>(*rhs) - static_cast<long>(b);
}

struct TrivialityRow {
  std::size_t n;
  Complexity K_prefix;
  Complexity K_graph;
  Complexity K_length;
  std::optional<long> margin;       // K_s(alpha|n) - K_s(n) - b
  std::optional<long> graph_margin; // same for the graph prefix
};

struct TrivialityReport {
  std::string subject;
  std::size_t b = 0;
  Stage stage = 0;     // stage of the left-hand complexities
  Stage rhs_stage = 0; // stage of K(n)
  std::vector<TrivialityRow> rows;
  bool pass = true;
  bool graph_pass = true;

  Json to_json() const {
    Json rows_json = Json::array();
    for (const auto &r : rows)
      rows_json.push_back(Json{{"n", r.n},
                               {"K_prefix", to_string(r.K_prefix)},
                               {"K_graph", to_string(r.K_graph)},
                               {"K_n", to_string(r.K_length)},
                               {"margin", r.margin ? Json(*r.margin) : Json("inf")},
                               {"graph_margin", r.graph_margin ? Json(*r.graph_margin) : Json("inf")}});
    return Json{{"subject", subject}, {"b", b},       {"stage", stage},           {"rhs_stage", rhs_stage},
                {"pass", pass},       {"graph_pass", graph_pass}, {"rows", std::move(rows_json)}};
  }
};

// Margins of the prefixes (and of the graph prefixes) of alpha against K(n) + b. Rows with
// K(n) infinite are vacuous; an infinite left side against a finite K(n) fails. The verdict
// holds for these stages only.
inline TrivialityReport ktrivial_check(const UniversalMachine &u, const std::vector<Natural> &alpha, std::size_t b,
                                       Stage s, std::optional<Stage> rhs_stage = std::nullopt,
                                       std::string subject = "alpha") {
  TrivialityReport rep;
  rep.subject = std::move(subject);
  rep.b = b;
  rep.stage = s;
  rep.rhs_stage = rhs_stage.value_or(s);
  for (std::size_t n = 0; n <= alpha.size(); ++n) {
    TrivialityRow row{n, u.K_at(function_prefix_word(alpha, n), s), u.K_at(graph_prefix_word(alpha, n), s),
                      u.K_at(Natural(static_cast<unsigned long>(n)), rep.rhs_stage), std::nullopt, std::nullopt};
    row.margin = complexity_margin(row.K_prefix, row.K_length, b);
    row.graph_margin = complexity_margin(row.K_graph, row.K_length, b);
    if (row.K_length) {
      rep.pass = rep.pass && row.margin && *row.margin <= 0;
      rep.graph_pass = rep.graph_pass && row.graph_margin && *row.graph_margin <= 0;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

enum class Proximity { inside, marginal, outside };

inline std::string to_string(Proximity p) {
  switch (p) {
  case Proximity::inside:
    return "inside";
  case Proximity::marginal:
    return "marginal";
  default:
    return "outside";
  }
}

// Decides d(x, p) < radius (or <= radius) from the deepest entry m of the name of x, which
// is within 2^-m of x, with the distance approximated to at least 2^-precision. Undecidable cases come back marginal.
inline Proximity proximity(const CauchyName &x, const Natural &p, const Rational &radius, unsigned long precision,
                           bool closed = false) {
  if (x.entries.empty())
    return Proximity::marginal;
  const std::size_t m = x.entries.size() - 1;
  const unsigned long digits = std::max<unsigned long>(precision, m);
  const Rational err = pow2(-static_cast<long>(m)) + pow2(-static_cast<long>(digits));
  const Rational a = x.space->distance_approx(x.entries[m], p, digits).value();
  if (closed ? a + err <= radius : a + err < radius)
    return Proximity::inside;
  if (closed ? a - err > radius : a - err >= radius)
    return Proximity::outside;
  return Proximity::marginal;
}

// Sweeps over described special points skip indices above this size; locating a huge
// unit-interval index costs far more than the point can contribute at desk scale.
inline constexpr unsigned long sweep_index_bits = 40;

inline bool usable_point(const SpacePtr &space, const Natural &p) {
  if (bit_length(p) > sweep_index_bits)
    return false;
  try {
    if (!space->is_valid(p))
      return false;
    space->distance(p, p);
    return true;
  } catch (const IndexError &) {
    return false;
  }
}

enum class ScaleMode { dyadic, rational };

// Word standing for the scale 2^-n: n itself, or the rational 1/2^n coded as <1, 2^n>.
inline Natural scale_word(unsigned long n, ScaleMode mode) {
  return mode == ScaleMode::dyadic ? Natural(n) : pair(Natural(1), pow2_natural(n));
}

struct LocalWitnessReport {
  unsigned long n = 0;
  std::size_t b = 0;
  Stage stage = 0;
  ScaleMode mode = ScaleMode::dyadic;
  Complexity K_scale;
  std::size_t candidates = 0; // p with K_s(<p, scale>) <= K_s(scale) + b
  std::optional<Natural> strict;
  std::vector<Natural> marginal;
  std::optional<Natural> weak; // K_s(p) <= K_s(n) + b and d(x, p) <= 2^-n
  std::vector<Natural> weak_marginal;

  Json to_json() const {
    auto opt = [](const std::optional<Natural> &v) { return v ? Json(v->get_str()) : Json(nullptr); };
    Json m = Json::array(), wm = Json::array();
    for (const auto &p : marginal)
      m.push_back(p.get_str());
    for (const auto &p : weak_marginal)
      wm.push_back(p.get_str());
    return Json{{"n", n},
                {"b", b},
                {"stage", stage},
                {"mode", mode == ScaleMode::dyadic ? "dyadic" : "rational"},
                {"K_scale", to_string(K_scale)},
                {"candidates", candidates},
                {"strict", opt(strict)},
                {"marginal", std::move(m)},
                {"weak", opt(weak)},
                {"weak_marginal", std::move(wm)}};
  }
};

// Searches a special point p near x with K_s(p, scale) <= K_s(scale) + b, and separately the
// weak form with K_s(p) <= K_s(n) + b. Works for plain machines as well.
inline LocalWitnessReport locally_ktrivial_witness(const UniversalMachine &u, const CauchyName &x, unsigned long n,
                                                   std::size_t b, Stage s, ScaleMode mode = ScaleMode::dyadic,
                                                   const StageIndex *index = nullptr) {
  StageIndex local;
  if (!index) {
    local = stage_index(u, s);
    index = &local;
  }
  LocalWitnessReport rep;
  rep.n = n;
  rep.b = b;
  rep.stage = s;
  rep.mode = mode;
  const Natural scale = scale_word(n, mode);
  rep.K_scale = index->K(scale);
  const Rational radius = pow2(-static_cast<long>(n));
  if (rep.K_scale) {
    if (const auto *labels = index->pairs_at(scale))
      for (const auto &[p, k] : *labels) {
        if (k > *rep.K_scale + b || !usable_point(x.space, p))
          continue;
        ++rep.candidates;
        const Proximity where = proximity(x, p, radius, n + 3);
        if (where == Proximity::inside && !rep.strict)
          rep.strict = p;
        else if (where == Proximity::marginal)
          rep.marginal.push_back(p);
      }
  }
  const Complexity kn = index->K(Natural(n));
  if (kn)
    for (const auto &[p, k] : index->words) {
      if (k > *kn + b || !usable_point(x.space, p))
        continue;
      const Proximity where = proximity(x, p, radius, n + 3, true);
      if (where == Proximity::inside && !rep.weak)
        rep.weak = p;
      else if (where == Proximity::marginal)
        rep.weak_marginal.push_back(p);
    }
  return rep;
}

// Plain-complexity version; the machine must be a plain one.
inline LocalWitnessReport locally_c_trivial_check(const UniversalMachine &plain, const CauchyName &x,
                                                  unsigned long n, std::size_t b, Stage s) {
  if (plain.prefix_free())
    throw ContractViolation("plain complexity needs a machine built without the prefix-free constraint");
  return locally_ktrivial_witness(plain, x, n, b, s, ScaleMode::dyadic);
}

struct PointComplexity {
  Complexity K_at;   // min K_s(<p, n>) over special points p with d(z, p) < 2^-n
  Complexity K_star; // min K_s(p) over the same points
  std::size_t marginal = 0;
};

inline PointComplexity point_complexity(const CauchyName &z, unsigned long n, const StageIndex &index) {
  PointComplexity out;
  const Rational radius = pow2(-static_cast<long>(n));
  auto consider = [&](const Natural &p, std::size_t k, Complexity &best) {
    if (best && *best <= k)
      return;
    if (!usable_point(z.space, p))
      return;
    const Proximity where = proximity(z, p, radius, n + 3);
    if (where == Proximity::inside)
      best = k;
    else if (where == Proximity::marginal)
      ++out.marginal;
  };
  if (const auto *labels = index.pairs_at(Natural(n)))
    for (const auto &[p, k] : *labels)
      consider(p, k, out.K_at);
  for (const auto &[p, k] : index.words)
    consider(p, k, out.K_star);
  return out;
}

inline PointComplexity point_complexity(const UniversalMachine &u, const CauchyName &z, unsigned long n, Stage s) {
  return point_complexity(z, n, stage_index(u, s));
}

struct IncompressibilityRow {
  unsigned long n;
  PointComplexity complexity;
  bool pass_at;
  bool pass_star;
};

struct StrongOffender {
  Natural point;
  std::size_t complexity;
};

struct IncompressibilityReport {
  std::size_t b = 0;
  Stage stage = 0;
  std::vector<IncompressibilityRow> rows;
  std::vector<StrongOffender> strong_offenders; // d(z, p) < 2^-K(p)-b certified
  bool pass = true;
  bool strong_pass = true;

  Json to_json() const {
    Json r = Json::array(), o = Json::array();
    for (const auto &row : rows)
      r.push_back(Json{{"n", row.n},
                       {"K_at", to_string(row.complexity.K_at)},
                       {"K_star", to_string(row.complexity.K_star)},
                       {"pass_at", row.pass_at},
                       {"pass_star", row.pass_star}});
    for (const auto &off : strong_offenders)
      o.push_back(Json{{"point", off.point.get_str()}, {"K", off.complexity}});
    return Json{{"b", b}, {"stage", stage}, {"pass", pass}, {"strong_pass", strong_pass}, {"rows", std::move(r)},
                {"strong_offenders", std::move(o)}};
  }
};

// K(z; n) > n - b and K_*(z; n) > n - b for n in [n_lo, n_hi], and the strong form
// d(z, p) >= 2^-K(p)-b for every described special point.
inline IncompressibilityReport ia_report(const UniversalMachine &u, const CauchyName &z, std::size_t b,
                                         unsigned long n_lo, unsigned long n_hi, Stage s) {
  const StageIndex index = stage_index(u, s);
  IncompressibilityReport rep;
  rep.b = b;
  rep.stage = s;
  auto above = [&](const Complexity &k, unsigned long n) {
    return !k || static_cast<long>(*k) > static_cast<long>(n) - static_cast<long>(b);
  };
  for (unsigned long n = n_lo; n <= n_hi; ++n) {
    IncompressibilityRow row{n, point_complexity(z, n, index), false, false};
    row.pass_at = above(row.complexity.K_at, n);
    row.pass_star = above(row.complexity.K_star, n);
    rep.pass = rep.pass && row.pass_at && row.pass_star;
    rep.rows.push_back(row);
  }
  for (const auto &[p, k] : index.words) {
    if (!usable_point(z.space, p))
      continue;
    const unsigned long e = k + b;
    if (proximity(z, p, pow2(-static_cast<long>(e)), e + 3) == Proximity::inside)
      rep.strong_offenders.push_back({p, k});
  }
  rep.strong_pass = rep.strong_offenders.empty();
  return rep;
}

struct Ball {
  Natural centre;
  std::size_t complexity;
  Rational radius;
};

struct DescriptionTestReport {
  std::size_t b = 0;
  Stage stage = 0;
  std::vector<Ball> balls;
  Rational weight = 0; // sum of 2^-K(p)-b
  Rational bound = 0;  // 2^-b Omega_s
  Rational measure = 0;
  bool holds = true;

  Json to_json() const {
    Json bl = Json::array();
    for (const auto &ball : balls)
      bl.push_back(Json{{"centre", ball.centre.get_str()}, {"K", ball.complexity}, {"radius", to_string(ball.radius)}});
    return Json{{"b", b},
                {"stage", stage},
                {"weight", to_string(weight)},
                {"bound", to_string(bound)},
                {"measure", to_string(measure)},
                {"holds", holds},
                {"balls", std::move(bl)}};
  }
};

// The open set of balls B(p, 2^-K_s(p)-b-1) around described special points of the unit
// interval or Cantor space, with its exact weight and the measure of its union.
inline DescriptionTestReport description_ml_test(const UniversalMachine &u, const SpacePtr &space, std::size_t b,
                                                 Stage s, unsigned long max_bits = 64) {
  const bool cantor = space->name() == "cantor";
  if (!cantor && space->name() != "unit-interval")
    throw ContractViolation("the description test needs the unit interval or Cantor space");
  DescriptionTestReport rep;
  rep.b = b;
  rep.stage = s;
  rep.bound = pow2(-static_cast<long>(b)) * u.omega_at(s);
  std::vector<std::pair<Rational, Rational>> intervals;
  std::vector<BitString> cylinders;
  for (const auto &[p, k] : stage_index(u, s, max_bits).words) {
    if (!usable_point(space, p))
      continue;
    const long e = static_cast<long>(k + b + 1);
    rep.balls.push_back({p, k, pow2(-e)});
    rep.weight += pow2(-e + 1);
    if (cantor) {
      BitString prefix;
      for (long j = 0; j <= e; ++j)
        prefix.push_back(cantor_bit(p, static_cast<unsigned long>(j)));
      cylinders.push_back(prefix);
    } else {
      const Rational x = unit_point(p);
      intervals.emplace_back(std::max(Rational(0), Rational(x - pow2(-e))), std::min(Rational(1), Rational(x + pow2(-e))));
    }
  }
  if (cantor) {
    rep.measure = antichain_measure(minimal_antichain(cylinders));
  } else {
    std::sort(intervals.begin(), intervals.end());
    Rational lo = -1, hi = -1;
    for (const auto &[a, c] : intervals) {
      if (a > hi) {
        if (hi > lo)
          rep.measure += hi - lo;
        lo = a;
        hi = c;
      } else if (c > hi) {
        hi = c;
      }
    }
    if (hi > lo)
      rep.measure += hi - lo;
  }
  rep.holds = rep.weight <= rep.bound;
  return rep;
}

struct LipschitzRow {
  unsigned long n;
  Complexity K_image;   // K_s(F(z); n)
  Complexity K_source;  // K_s(z; n - v - 1) over U together with L
  std::optional<long> margin; // K_image + c_L - K_source
  std::string status;   // ok, fail, vacuous, inconclusive
};

struct LipschitzReport {
  unsigned v = 0;
  std::size_t machine_constant = 0; // c_L
  Stage stage = 0;
  std::vector<LipschitzRow> rows;
  std::size_t machine_entries = 0;
  bool pass = true;
  // Transfer of strong incompressibility: violations of d(F(z), q) >= 2^-K(q)-v-c_L-b-1.
  std::optional<std::size_t> strong_violations;

  Json to_json() const {
    Json r = Json::array();
    for (const auto &row : rows)
      r.push_back(Json{{"n", row.n},
                       {"K_image", to_string(row.K_image)},
                       {"K_source", to_string(row.K_source)},
                       {"margin", row.margin ? Json(*row.margin) : Json(nullptr)},
                       {"status", row.status}});
    Json out{{"v", v}, {"c_L", machine_constant}, {"stage", stage}, {"L_entries", machine_entries},
             {"pass", pass}, {"rows", std::move(r)}};
    out["strong_violations"] = strong_violations ? Json(*strong_violations) : Json(nullptr);
    return out;
  }
};

// Replays the auxiliary machine L: a description of <q, n> with q near F(z) is sent to
// <p, n - v - 1> for the first special point p (below the horizon) with d(F(p), q) < 2^-n.
// L counts with the coding constant it would receive as the next registered machine.
// With strong_b set, also checks the transfer of strong incompressibility via b.
inline LipschitzReport lipschitz_transfer_check(const UniversalMachine &u, const ComputableMap &f,
                                                const CauchyName &z, unsigned long n_lo, unsigned long n_hi, Stage s,
                                                std::size_t horizon = 4096,
                                                std::optional<std::size_t> strong_b = std::nullopt) {
  if (!f.inverse_lipschitz || !f.on_point)
    throw ContractViolation("the map needs an inverse-Lipschitz exponent and an action on special points");
  const unsigned v = *f.inverse_lipschitz;
  const StageIndex index = stage_index(u, s);
  const CauchyName image = markov_image(f, z);
  LipschitzReport rep;
  rep.v = v;
  rep.stage = s;
  rep.machine_constant = u.machine_count() + 1;
  // L searches the least exact preimage of q first, then the least p with d(F(p), q) below
  // the radius; per q the improving distances along the search are kept for reuse.
  std::map<Natural, Natural> exact_preimage;
  std::vector<std::optional<Natural>> images;
  for (std::size_t p = 0; p < horizon; ++p) {
    const Natural pn(static_cast<unsigned long>(p));
    images.push_back(f.on_point(pn));
    if (images.back())
      exact_preimage.emplace(*images.back(), pn);
  }
  std::map<Natural, std::vector<std::pair<Natural, Rational>>> records;
  auto search = [&](const Natural &q, const Rational &radius) -> std::optional<Natural> {
    if (auto it = exact_preimage.find(q); it != exact_preimage.end())
      return it->second;
    auto it = records.find(q);
    if (it == records.end()) {
      std::vector<std::pair<Natural, Rational>> improving;
      for (std::size_t p = 0; p < horizon; ++p) {
        if (!images[p] || !usable_point(f.target, *images[p]))
          continue;
        Rational d = f.target->distance(*images[p], q);
        if (improving.empty() || d < improving.back().second)
          improving.emplace_back(Natural(static_cast<unsigned long>(p)), std::move(d));
      }
      it = records.emplace(q, std::move(improving)).first;
    }
    for (const auto &[p, d] : it->second)
      if (d < radius)
        return p;
    return std::nullopt;
  };
  for (unsigned long n = std::max<unsigned long>(n_lo, v + 1); n <= n_hi; ++n) {
    const unsigned long m = n - v - 1;
    LipschitzRow row{n, std::nullopt, std::nullopt, std::nullopt, "vacuous"};
    const Rational radius = pow2(-static_cast<long>(n));
    const Rational source_radius = pow2(-static_cast<long>(m));
    bool inconclusive = false;
    Complexity via_machine;
    if (const auto *labels = index.pairs_at(Natural(n)))
      for (const auto &[q, k] : *labels) {
        if (!usable_point(f.target, q) || proximity(image, q, radius, n + 3) != Proximity::inside)
          continue;
        if (!row.K_image || k < *row.K_image)
          row.K_image = k;
        const std::optional<Natural> found = search(q, radius);
        if (!found) {
          inconclusive = true;
          continue;
        }
        ++rep.machine_entries;
        if (proximity(z, *found, source_radius, m + 3) != Proximity::inside) {
          inconclusive = true;
          continue;
        }
        const std::size_t len = k + rep.machine_constant;
        if (!via_machine || len < *via_machine)
          via_machine = len;
      }
    const PointComplexity direct = point_complexity(z, m, index);
    row.K_source = direct.K_at;
    if (via_machine && (!row.K_source || *via_machine < *row.K_source))
      row.K_source = via_machine;
    if (row.K_image) {
      if (row.K_source) {
        row.margin = static_cast<long>(*row.K_image + rep.machine_constant) - static_cast<long>(*row.K_source);
        row.status = *row.margin >= 0 ? "ok" : "fail";
      } else {
        row.status = inconclusive ? "inconclusive" : "fail";
      }
    }
    rep.pass = rep.pass && row.status != "fail";
    rep.rows.push_back(std::move(row));
  }
  if (strong_b) {
    std::size_t bad = 0;
    for (const auto &[q, k] : index.words) {
      if (!usable_point(f.target, q))
        continue;
      const unsigned long e = k + v + rep.machine_constant + *strong_b + 1;
      if (proximity(image, q, pow2(-static_cast<long>(e)), e + 3) == Proximity::inside)
        ++bad;
    }
    rep.strong_violations = bad;
  }
  return rep;
}

struct CountBoundRow {
  unsigned long n;
  Complexity K_n;
  Rational pair_weight; // sum over p of 2^-K_s(<p, n>)
  std::optional<long> constant;
};

struct CountBoundReport {
  std::vector<CountBoundRow> rows;
  std::optional<long> constant; // c_0: max over n of K_s(n) + ceil(log2 pair_weight)
};

// Measures the constant of the counting bound #{p : K(p, n) <= K(n) + b} <= 2^(b + c_0).
inline CountBoundReport count_bound_constant(const UniversalMachine &u, unsigned long n_lo, unsigned long n_hi,
                                             Stage s) {
  const StageIndex index = stage_index(u, s);
  CountBoundReport rep;
  for (unsigned long n = n_lo; n <= n_hi; ++n) {
    CountBoundRow row{n, index.K(Natural(n)), 0, std::nullopt};
    if (const auto *labels = index.pairs_at(Natural(n)))
      for (const auto &[p, k] : *labels)
        row.pair_weight += pow2(-static_cast<long>(k));
    if (row.K_n && row.pair_weight > 0) {
      row.constant = static_cast<long>(*row.K_n) + ceil_log2(row.pair_weight);
      if (!rep.constant || *row.constant > *rep.constant)
        rep.constant = row.constant;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

} // namespace randwork
