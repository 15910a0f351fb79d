// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "randwork/errors.hpp"
#include "randwork/machines.hpp"
#include "randwork/numeric.hpp"
#include "randwork/run_log.hpp"

namespace randwork {

// Co-c.e. set A_s given by the intervals cut out of the naturals so far. The markers are
// the elements of A_s in increasing order; [s, oo) always stays inside.
class MarkerArray {
public:
  struct Cut {
    std::size_t from; // first removed element (old marker position)
    std::size_t to;   // exclusive end (the stage of the cut)
    std::size_t marker;
    Stage stage;
  };

  explicit MarkerArray(std::size_t tracked = 48) : moves_(tracked, 0) {}

  bool contains(std::size_t x) const { return x >= member_.size() || member_[x]; }
  const std::vector<Cut> &cuts() const noexcept { return cuts_; }
  const std::vector<std::size_t> &move_counts() const noexcept { return moves_; }
  std::size_t tracked() const noexcept { return moves_.size(); }

  // Position of marker i: the i-th element of A (0-indexed).
  std::size_t position(std::size_t i) const {
    std::size_t seen = 0;
    for (std::size_t x = 0; x < member_.size(); ++x)
      if (member_[x] && seen++ == i)
        return x;
    return member_.size() + (i - seen);
  }

  std::vector<std::size_t> positions(std::size_t count) const {
    std::vector<std::size_t> out;
    for (std::size_t x = 0; out.size() < count; ++x)
      if (contains(x))
        out.push_back(x);
    return out;
  }

  // A := A - [position(i), s). Every marker j >= i moves.
  void cut(std::size_t i, Stage s) {
    const std::size_t from = position(i);
    if (from >= s)
      throw ContractViolation("marker " + std::to_string(i) + " already at or beyond stage " + std::to_string(s));
    if (member_.size() < s)
      member_.resize(s, 1);
    for (std::size_t x = from; x < s; ++x)
      member_[x] = 0;
    cuts_.push_back({from, s, i, s});
    starts_.insert(std::upper_bound(starts_.begin(), starts_.end(), from), from);
    for (std::size_t j = i; j < moves_.size(); ++j)
      ++moves_[j];
  }

  // Number of cuts starting at or below x; with the largest element a of A below n it
  // pins down A restricted to [0, a].
  std::size_t cuts_starting_at_or_below(std::size_t x) const {
    return static_cast<std::size_t>(std::upper_bound(starts_.begin(), starts_.end(), x) - starts_.begin());
  }
  const std::vector<std::size_t> &sorted_cut_starts() const noexcept { return starts_; }

  // Characteristic string of A restricted to [0, n).
  BitString prefix(std::size_t n) const {
    std::string bits(n, '0');
    for (std::size_t x = 0; x < n; ++x)
      if (contains(x))
        bits[x] = '1';
    return BitString(bits);
  }

private:
  std::vector<char> member_; // membership below the largest cut end
  std::vector<Cut> cuts_;
  std::vector<std::size_t> starts_;
  std::vector<std::size_t> moves_;
};

// Longest prefix of the string that ends in 1; empty if there is none.
inline BitString last_one_prefix(const BitString &s) {
  for (std::size_t k = s.size(); k > 0; --k)
    if (s[k - 1])
      return s.prefix(k);
  return BitString();
}

// A description made available at a given stage, for scripted runs.
struct ScriptedDescription {
  Stage stage;
  std::size_t word;
  std::size_t length;
};

inline std::vector<ScriptedDescription> scripted_descriptions_from_json(const Json &j) {
  std::vector<ScriptedDescription> out;
  try {
    for (const auto &d : j.at("descriptions"))
      out.push_back({d.at("stage").get<Stage>(), d.at("word").get<std::size_t>(), d.at("length").get<std::size_t>()});
  } catch (const nlohmann::json::exception &e) {
    throw ScriptError(std::string("malformed description script: ") + e.what());
  }
  for (const auto &d : out)
    if (d.stage == 0)
      throw ScriptError("descriptions start at stage 1");
  return out;
}

struct WeaklyKTrivialResult {
  ConstructionRun run;
  MarkerArray markers;
  MachineTable machine{0, "weak-trivial-M"};
  // max over stages and n of (shortest M-description of g(A_s|n)) - K_s(n); the argument gives <= 0.
  std::optional<long> measured_constant;
  std::size_t serialized_stages = 0; // stages with more than one new minimal description
};

namespace detail {

// Shared engine: feed the new visible descriptions of each stage, in order.
class WeaklyKTrivialEngine {
public:
  struct Description {
    std::size_t word;
    std::size_t length;
    BitString input; // universal input, empty for scripted runs
  };

  WeaklyKTrivialEngine(WeaklyKTrivialResult &out, std::size_t horizon, bool kraft_chaitin)
      : out_(out), horizon_(horizon), kc_(kraft_chaitin), view_(horizon + 1) {}

  void stage(Stage s, const std::vector<Description> &fresh) {
    // Keep the best visible description of every word that can ever be released.
    std::vector<std::size_t> touched;
    for (const auto &d : fresh) {
      if (d.word > horizon_)
        continue;
      auto &best = visible_[d.word];
      if (!best || d.length < best->length) {
        best = d;
        touched.push_back(d.word);
      }
    }
    // New minimal descriptions of released words w < s, smallest w first.
    std::vector<std::size_t> events;
    if (s >= 1 && visible_.count(s - 1))
      events.push_back(s - 1);
    for (std::size_t w : touched)
      if (w + 1 < s)
        events.push_back(w);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    std::vector<std::size_t> improved;
    for (std::size_t w : events)
      if (!view_[w] || visible_[w]->length < *view_[w])
        improved.push_back(w);
    if (improved.size() > 1) {
      ++out_.serialized_stages;
      out_.run.log(s, "serialize", Json{{"events", improved.size()}});
    }
    for (std::size_t w : improved)
      act(s, *visible_[w]);
    verify(s);
  }

  Stage last_stage() const noexcept { return last_; }

private:
  void act(Stage s, const Description &d) {
    view_[d.word] = d.length;
    MarkerArray &a = out_.markers;
    const std::size_t i = d.length;
    const std::size_t gamma = a.position(i);
    Json data{{"word", d.word}, {"length", i}, {"marker", i}, {"position", gamma}};
    if (d.word > gamma) {
      a.cut(i, s);
      data["cut"] = Json::array({gamma, s});
    }
    const Key key = key_of(d.word);
    const Natural output = code_of(last_one_prefix(a.prefix(d.word)));
    BitString input = d.input;
    if (kc_)
      input = out_.machine.kc_extend({i, output}, s);
    else
      out_.machine.add(input, output, s);
    auto it = best_m_.find(key);
    if (it == best_m_.end() || input.size() < it->second)
      best_m_[key] = input.size();
    data["M_input"] = input.str();
    out_.run.log(s, "description", std::move(data));
  }

  using Key = std::pair<long, std::size_t>;

  // (largest element of A below n or -1, cuts starting at or below it) identifies g(A|n).
  Key key_of(std::size_t n) const {
    const MarkerArray &a = out_.markers;
    for (std::size_t x = n; x > 0; --x)
      if (a.contains(x - 1))
        return {static_cast<long>(x - 1), a.cuts_starting_at_or_below(x - 1)};
    return {-1, 0};
  }

  void verify(Stage s) {
    last_ = s;
    MarkerArray &a = out_.markers;
    const auto &starts = a.sorted_cut_starts();
    long last_elem = -1;
    std::size_t cut_ptr = 0, below = 0;
    std::optional<std::string> maintain_fail, large_fail;
    for (std::size_t n = 0; n < s && n <= horizon_; ++n) {
      if (n > 0 && a.contains(n - 1)) {
        last_elem = static_cast<long>(n - 1);
        ++below;
        while (cut_ptr < starts.size() && starts[cut_ptr] <= static_cast<std::size_t>(last_elem))
          ++cut_ptr;
      }
      if (!view_[n])
        continue;
      const std::size_t k = *view_[n];
      // gamma_i < n implies K(n) > i, i.e. K(n) >= |A below n|.
      if (k < below && !large_fail)
        large_fail = "K(" + std::to_string(n) + ")=" + std::to_string(k) + " with " + std::to_string(below) +
                     " markers below";
      const Key key = last_elem < 0 ? Key{-1, 0} : Key{last_elem, cut_ptr};
      auto it = best_m_.find(key);
      if (it == best_m_.end()) {
        if (!maintain_fail)
          maintain_fail = "no M-description of g(A|" + std::to_string(n) + ")";
        continue;
      }
      const long diff = static_cast<long>(it->second) - static_cast<long>(k);
      if (!out_.measured_constant || diff > *out_.measured_constant)
        out_.measured_constant = diff;
      if (diff > 0 && !maintain_fail)
        maintain_fail = "g(A|" + std::to_string(n) + ") needs " + std::to_string(it->second) + " > K=" +
                        std::to_string(k);
    }
    out_.run.check(s, "maintain_weak_K_triv", !maintain_fail, maintain_fail.value_or(""));
    out_.run.check(s, "gamma_K_large", !large_fail, large_fail.value_or(""));
    bool tail = true;
    for (const auto &c : a.cuts())
      tail = tail && c.to <= s;
    out_.run.check(s, "tail_inside_A", tail, "a cut reaches past the stage");
    std::optional<std::string> moves_fail;
    for (std::size_t i = 0; i < a.tracked() && i < 62; ++i)
      if (a.move_counts()[i] > (std::size_t{1} << (i + 1)) && !moves_fail)
        moves_fail = "marker " + std::to_string(i) + " moved " + std::to_string(a.move_counts()[i]) + " times";
    out_.run.check(s, "marker_moves", !moves_fail, moves_fail.value_or(""));
  }

  WeaklyKTrivialResult &out_;
  std::size_t horizon_;
  bool kc_;
  std::vector<std::optional<std::size_t>> view_; // released stage complexity, indexed by word
  std::map<std::size_t, std::optional<Description>> visible_;
  std::map<Key, std::size_t> best_m_;
  Stage last_ = 0;
};

inline void finish_weakly(WeaklyKTrivialResult &out, Stage s) {
  const auto &a = out.markers;
  Json cuts = Json::array();
  for (const auto &c : a.cuts())
    cuts.push_back(Json{{"from", c.from}, {"to", c.to}, {"marker", c.marker}, {"stage", c.stage}});
  Json moves = Json::array();
  for (std::size_t m : a.move_counts())
    moves.push_back(m);
  out.run.final_state() = Json{{"stage", s},
                               {"cuts", std::move(cuts)},
                               {"markers", a.positions(16)},
                               {"move_counts", std::move(moves)},
                               {"M_entries", out.machine.entries().size()},
                               {"M_weight", to_string(out.machine.weight())},
                               {"serialized_stages", out.serialized_stages}};
  out.run.constants()["c_M"] = out.machine.reserved_constant();
  if (out.measured_constant)
    out.run.constants()["maintain_margin"] = *out.measured_constant;
}

} // namespace detail

// Replays the construction against the running universal machine for the given number of
// stages. A description of w is taken into account from stage w + 1 on, so every event
// has w < s. The built machine M reads universal inputs, hence its domain is prefix-free.
inline WeaklyKTrivialResult build_weakly_ktrivial(UniversalMachine &u, Stage stages, std::size_t tracked = 48) {
  WeaklyKTrivialResult out;
  out.run = ConstructionRun("weakly-ktrivial", "constructions", stages);
  out.markers = MarkerArray(tracked);
  out.machine = MachineTable(u.machine_count(), "weak-trivial-M");
  detail::WeaklyKTrivialEngine engine(out, stages, false);
  while (u.stage() < stages) {
    StageSnapshot snap = u.run_stage();
    std::vector<detail::WeaklyKTrivialEngine::Description> fresh;
    for (const auto &h : snap.new_halts)
      if (h.output <= Natural(static_cast<unsigned long>(stages)))
        fresh.push_back({static_cast<std::size_t>(h.output.get_ui()), h.input.size(), h.input});
    engine.stage(snap.stage, fresh);
  }
  detail::finish_weakly(out, u.stage());
  return out;
}

// Scripted variant: descriptions (stage, word, length); M gets Kraft-Chaitin inputs of the
// scripted lengths.
inline WeaklyKTrivialResult build_weakly_ktrivial(const std::vector<ScriptedDescription> &script, Stage stages,
                                                  std::size_t tracked = 48) {
  WeaklyKTrivialResult out;
  out.run = ConstructionRun("weakly-ktrivial", "constructions", stages);
  out.markers = MarkerArray(tracked);
  detail::WeaklyKTrivialEngine engine(out, stages, true);
  std::map<Stage, std::vector<detail::WeaklyKTrivialEngine::Description>> by_stage;
  for (const auto &d : script)
    by_stage[d.stage].push_back({d.word, d.length, BitString()});
  try {
    for (Stage s = 1; s <= stages; ++s) {
      auto it = by_stage.find(s);
      engine.stage(s, it == by_stage.end() ? std::vector<detail::WeaklyKTrivialEngine::Description>{} : it->second);
    }
  } catch (const BudgetExceeded &e) {
    throw ScriptError(std::string("description script violates the Kraft inequality: ") + e.what());
  }
  detail::finish_weakly(out, stages);
  return out;
}

// A weak-truth-table chain B_0 < B_1 < ... read off a finite oracle: B_{k+1} adds 2 n_k or
// 2 n_k + 1 by the oracle bit, where n_k is the strong index of B_k.
struct WttStep {
  std::vector<Natural> set; // B_k
  Natural added;
  bool bit = false;
  std::optional<Natural> strong_index;
};

struct WttChain {
  std::vector<WttStep> steps;
  // m = 2 n_k: B restricted to [0, m) equals the finite set with index n_k.
  std::vector<Natural> checkpoints;
  bool index_exceeds_max = true;
};

// Strong index of a finite set: sum of 2^x.
inline Natural strong_index(const std::vector<Natural> &set, unsigned long max_bits = 1ul << 24) {
  Natural n = 0;
  for (const auto &x : set) {
    if (x >= Natural(max_bits))
      throw BudgetExceeded("strong index of a set containing " + x.get_str() + " is too large to materialize");
    mpz_setbit(n.get_mpz_t(), x.get_ui());
  }
  return n;
}

inline WttChain build_wtt_weakly_ktrivial(const BitString &oracle, std::size_t k_max) {
  if (oracle.size() < k_max + 1)
    throw IndexError("oracle needs " + std::to_string(k_max + 1) + " bits");
  WttChain out;
  std::vector<Natural> set;
  Natural index = 0; // strong index of B_{-1} = {}
  for (std::size_t k = 0; k <= k_max; ++k) {
    Natural largest = set.empty() ? Natural(-1) : set.back();
    if (index <= largest)
      out.index_exceeds_max = false;
    const bool bit = oracle[k];
    const Natural added = 2 * index + (bit ? 0 : 1);
    set.push_back(added);
    WttStep step{set, added, bit, std::nullopt};
    if (k < k_max) {
      index = strong_index(set);
      step.strong_index = index;
      out.checkpoints.push_back(2 * index);
    }
    out.steps.push_back(std::move(step));
  }
  return out;
}

// Reads the oracle back from the parity of each added element.
inline BitString recover_oracle(const WttChain &chain) {
  BitString out;
  for (const auto &s : chain.steps)
    out.push_back(mpz_even_p(s.added.get_mpz_t()) != 0);
  return out;
}

} // namespace randwork
