// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "randwork/errors.hpp"
#include "randwork/jump_trace.hpp"
#include "randwork/machines.hpp"
#include "randwork/numeric.hpp"
#include "randwork/run_log.hpp"

namespace randwork {

// g_e(n) converges at the given stage with the given value.
struct BoundConvergence {
  std::size_t e;
  std::size_t n;
  Stage stage;
  std::size_t value;
};

// phi_i(input) converges at the given stage; input -1 matches every input.
struct PartialRule {
  std::size_t i;
  long input;
  Stage stage;
  long value;
};

// Gamma_e^X(n, s) = value for X extending oracle and s >= from. The latest applicable rule
// wins (later start, then longer oracle, then later in the list); the default is 0.
struct GuessRule {
  std::size_t e;
  std::size_t n;
  BitString oracle;
  Stage from;
  long value;
};

struct BlrScript {
  std::size_t r_requirements = 0;
  std::vector<BoundConvergence> convergences;
  std::vector<PartialRule> partial;
  std::vector<GuessRule> guesses;
  std::size_t search_depth = 4; // extra bits searched above a Q-output
};

// Rejects scripts that break the one-convergence-per-stage convention.
inline void validate_blr_script(const BlrScript &script) {
  std::set<Stage> stages;
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto &c : script.convergences) {
    if (c.e >= c.n)
      throw ScriptError("convergence of g_" + std::to_string(c.e) + "(" + std::to_string(c.n) + ") needs e < n");
    if (c.stage == 0)
      throw ScriptError("convergences start at stage 1");
    if (!stages.insert(c.stage).second)
      throw ScriptError("two bound convergences at stage " + std::to_string(c.stage));
    if (!pairs.insert({c.e, c.n}).second)
      throw ScriptError("g_" + std::to_string(c.e) + "(" + std::to_string(c.n) + ") converges twice");
  }
}

inline BlrScript blr_script_from_json(const Json &j) {
  BlrScript out;
  try {
    out.r_requirements = j.at("r_requirements").get<std::size_t>();
    if (j.contains("search_depth"))
      out.search_depth = j.at("search_depth").get<std::size_t>();
    for (const auto &c : j.value("convergences", Json::array()))
      out.convergences.push_back(
          {c.at("e").get<std::size_t>(), c.at("n").get<std::size_t>(), c.at("stage").get<Stage>(),
           c.value("value", std::size_t{1})});
    for (const auto &p : j.value("phi", Json::array()))
      out.partial.push_back({p.at("i").get<std::size_t>(), p.value("input", -1L), p.at("stage").get<Stage>(),
                             p.at("value").get<long>()});
    for (const auto &g : j.value("gamma", Json::array()))
      out.guesses.push_back({g.at("e").get<std::size_t>(), g.at("n").get<std::size_t>(),
                             BitString(g.value("oracle", std::string())), g.value("from", Stage{0}),
                             g.at("value").get<long>()});
  } catch (const nlohmann::json::exception &e) {
    throw ScriptError(std::string("malformed class script: ") + e.what());
  }
  validate_blr_script(out);
  return out;
}

struct BlrResult {
  ConstructionRun run;
  std::vector<std::vector<BitString>> outputs; // final outputs after each stage; P_s is their cone
  TraceFamily traces;                          // member e, index n
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> trace_changes;
  std::size_t initializations = 0;
};

// Strings comparable with one of the outputs.
inline bool in_output_tree(const std::vector<BitString> &outputs, const BitString &s) {
  for (const auto &b : outputs)
    if (b.comparable(s))
      return true;
  return false;
}

namespace detail {

struct BlrStrategy {
  bool is_q = false;
  std::size_t i = 0; // R_i
  std::size_t e = 0, n = 0;
  bool initialized = false;
  std::vector<BitString> inputs;
  std::vector<BitString> outputs;
  // R state
  bool decided = false;
  // Q state
  std::size_t redefinitions = 0;
  std::vector<long> guesses;

  std::string name() const {
    return is_q ? "Q(" + std::to_string(e) + "," + std::to_string(n) + ")" : "R" + std::to_string(i);
  }
};

} // namespace detail

// Replays the priority construction of a perfect class whose members are traceable with
// bound 2^n. Strategies act once per stage in priority order; a Q-strategy redefines at most
// one output per stage.
inline BlrResult build_blr_pi_class(const BlrScript &script, Stage stages) {
  validate_blr_script(script);
  BlrResult out;
  out.run = ConstructionRun("blr-class", "constructions", stages);
  ConstructionRun &run = out.run;

  std::vector<detail::BlrStrategy> rs(script.r_requirements);
  for (std::size_t i = 0; i < rs.size(); ++i)
    rs[i].i = i;
  std::vector<detail::BlrStrategy> qs; // in convergence order
  std::map<Stage, const BoundConvergence *> by_stage;
  for (const auto &c : script.convergences)
    by_stage[c.stage] = &c;

  // Priority list of (is_q, index): R_i goes right after R_{i-1} and every Q(e, n) with n <= i.
  auto priority = [&]() {
    std::vector<std::size_t> after(rs.size(), 0); // number of Q's preceding R_i
    for (std::size_t i = 0; i < rs.size(); ++i) {
      std::size_t k = i > 0 ? after[i - 1] : 0;
      for (std::size_t q = 0; q < qs.size(); ++q)
        if (qs[q].n <= i)
          k = std::max(k, q + 1);
      after[i] = k;
    }
    std::vector<std::pair<bool, std::size_t>> order;
    for (std::size_t q = 0; q <= qs.size(); ++q) {
      for (std::size_t i = 0; i < rs.size(); ++i)
        if (after[i] == q)
          order.emplace_back(false, i);
      if (q < qs.size())
        order.emplace_back(true, q);
    }
    return order;
  };
  auto strategy = [&](const std::pair<bool, std::size_t> &k) -> detail::BlrStrategy & {
    return k.first ? qs[k.second] : rs[k.second];
  };
  auto guess = [&](std::size_t e, std::size_t n, const BitString &x, Stage s) {
    const GuessRule *best = nullptr;
    for (const auto &g : script.guesses)
      if (g.e == e && g.n == n && g.from <= s && g.oracle.is_prefix_of(x))
        if (!best || std::tie(g.from, g.oracle) >= std::tie(best->from, best->oracle))
          best = &g;
    return best ? best->value : 0L;
  };
  auto phi = [&](std::size_t i, std::size_t input, Stage s) -> std::optional<long> {
    for (const auto &p : script.partial)
      if (p.i == i && p.stage <= s && (p.input < 0 || static_cast<std::size_t>(p.input) == input))
        return p.value;
    return std::nullopt;
  };
  auto trace_of = [](const detail::BlrStrategy &q) {
    std::set<Natural> values;
    for (long c : q.guesses)
      if (c >= 0)
        values.insert(Natural(c));
    return values;
  };
  auto initialize = [&](detail::BlrStrategy &st, const std::vector<BitString> &inputs, Stage s) {
    const bool was = st.initialized;
    st.initialized = true;
    st.inputs = inputs;
    st.decided = false;
    st.redefinitions = 0;
    if (st.is_q) {
      st.outputs = inputs;
      st.guesses.assign(inputs.size(), -1);
      out.traces.reset(st.e, st.n, {});
      if (was)
        ++out.trace_changes[{st.e, st.n}];
    } else {
      st.outputs.clear();
      for (const auto &a : inputs) {
        st.outputs.push_back(a.child(false));
        st.outputs.push_back(a.child(true));
      }
    }
    if (was) {
      ++out.initializations;
      run.log(s, "initialize", Json{{"strategy", st.name()}});
    }
  };

  std::vector<BitString> previous{BitString()};
  for (Stage s = 1; s <= stages; ++s) {
    auto fresh = by_stage.find(s);
    if (fresh != by_stage.end()) {
      const BoundConvergence &c = *fresh->second;
      // Initialise R_n and everything weaker, then insert the new Q.
      auto order = priority();
      bool weaker = false;
      for (const auto &k : order) {
        auto &st = strategy(k);
        if (!k.first && st.i == c.n)
          weaker = true;
        if (weaker && st.initialized) {
          st.initialized = false;
          ++out.initializations;
          run.log(s, "initialize", Json{{"strategy", st.name()}});
        }
      }
      detail::BlrStrategy q;
      q.is_q = true;
      q.e = c.e;
      q.n = c.n;
      qs.push_back(std::move(q));
      run.log(s, "converge", Json{{"e", c.e}, {"n", c.n}, {"value", c.value}});
    }

    std::vector<BitString> current{BitString()};
    for (const auto &k : priority()) {
      auto &st = strategy(k);
      if (!st.is_q && st.i >= s) {
        st.initialized = false;
        continue; // not yet allowed to act; passes its input through
      }
      if (!st.initialized || st.inputs != current)
        initialize(st, current, s);
      if (!st.is_q) {
        if (!st.decided) {
          if (auto v = phi(st.i, st.inputs.front().size(), s)) {
            st.decided = true;
            std::vector<BitString> kept;
            for (const auto &a : st.inputs)
              kept.push_back(a.child(*v != 0 ? false : true));
            st.outputs = std::move(kept);
            run.log(s, "split-decided", Json{{"strategy", st.name()}, {"value", *v}});
          }
        }
      } else {
        // Least (j, gamma) with gamma in P_s above beta_j and a guess different from c(j).
        std::optional<std::pair<std::size_t, BitString>> found;
        for (std::size_t j = 0; j < st.outputs.size() && !found; ++j) {
          std::vector<BitString> level{st.outputs[j]};
          for (std::size_t d = 0; d <= script.search_depth && !found; ++d) {
            std::vector<BitString> next;
            for (const auto &g : level) {
              if (in_output_tree(previous, g) && guess(st.e, st.n, g, s) != st.guesses[j]) {
                found = std::make_pair(j, g);
                break;
              }
              next.push_back(g.child(false));
              next.push_back(g.child(true));
            }
            level = std::move(next);
          }
        }
        if (found) {
          const auto &[j, gamma] = *found;
          std::vector<BitString> next = st.outputs;
          next[j] = gamma;
          for (std::size_t k2 = 0; k2 < next.size(); ++k2)
            if (k2 != j)
              next[k2] = next[k2] + BitString::repeat(false, gamma.size() - next[k2].size());
          bool extends = true;
          for (std::size_t k2 = 0; k2 < next.size(); ++k2)
            extends = extends && st.outputs[k2].is_prefix_of(next[k2]);
          run.check(s, "extension_only", extends, st.name());
          st.outputs = std::move(next);
          st.guesses[j] = guess(st.e, st.n, gamma, s);
          ++st.redefinitions;
          out.traces.reset(st.e, st.n, trace_of(st));
          ++out.trace_changes[{st.e, st.n}];
          Json outs = Json::array();
          for (const auto &b : st.outputs)
            outs.push_back(b.str());
          run.log(s, "redefine", Json{{"strategy", st.name()}, {"j", j}, {"gamma", gamma.str()},
                                      {"guess", st.guesses[j]}, {"outputs", std::move(outs)}});
        }
        const std::size_t size = out.traces.size(st.e, st.n);
        run.check(s, "trace_bound", st.n >= 62 || size <= (std::size_t{1} << st.n),
                  "|T_" + std::to_string(st.n) + "^" + std::to_string(st.e) + "| = " + std::to_string(size));
      }
      current = st.outputs;
    }
    bool nonempty = !current.empty();
    run.check(s, "class_nonempty", nonempty);
    if (current != previous) {
      Json outs = Json::array();
      for (const auto &b : current)
        outs.push_back(b.str());
      run.log(s, "tree", Json{{"outputs", std::move(outs)}});
    }
    out.outputs.push_back(current);
    previous = std::move(current);
  }
  Json outs = Json::array();
  for (const auto &b : previous)
    outs.push_back(b.str());
  Json changes = Json::array();
  for (const auto &[key, c] : out.trace_changes)
    changes.push_back(Json{{"e", key.first}, {"n", key.second}, {"changes", c}});
  run.final_state() = Json{{"outputs", std::move(outs)},
                           {"traces", out.traces.to_json()},
                           {"trace_changes", std::move(changes)},
                           {"initializations", out.initializations}};
  return out;
}

} // namespace randwork
