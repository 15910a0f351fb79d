// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "randwork/errors.hpp"
#include "randwork/machines.hpp"
#include "randwork/metric.hpp"
#include "randwork/numeric.hpp"
#include "randwork/run_log.hpp"

namespace randwork {

// Node of a tree of labels; entry k is a special point at level first_level + k.
using LabelTuple = std::vector<Natural>;

inline Json label_tuple_json(const LabelTuple &t) {
  Json out = Json::array();
  for (const auto &x : t)
    out.push_back(x.get_str());
  return out;
}

struct PointTreeConfig {
  std::size_t b = 0;
  unsigned long n_star = 2;
  Natural p_tilde = 0;
  Stage stages = 0;
  unsigned long max_level = 40;
  // Outputs with more bits are never unpaired; they cannot name a level this small.
  unsigned long max_output_bits = 160;
};

struct PointTreeResult {
  ConstructionRun run;
  std::vector<LabelTuple> slow_tree; // in order of enumeration, root first
  std::vector<LabelTuple> thin_tree; // G, in order of enumeration, root first
  std::size_t machine_id = 0;        // the reserved machine L
  std::size_t machine_constant = 0;  // its coding constant c_L
  Stage final_stage = 0;
};

namespace detail {

// Shortest descriptions of pairs <p, n>, grouped by level n.
class LevelIndex {
public:
  struct Entry {
    std::size_t length;
    BitString input;
  };

  LevelIndex(unsigned long max_level, unsigned long max_bits) : max_level_(max_level), max_bits_(max_bits) {}

  void add(const Halting &h) {
    if (bit_length(h.output) > max_bits_)
      return;
    auto [p, n] = unpair(h.output);
    if (n > Natural(max_level_))
      return;
    auto &slot = levels_[n.get_ui()];
    auto it = slot.find(p);
    if (it == slot.end() || h.input.size() < it->second.length)
      slot[p] = {h.input.size(), h.input};
  }

  const std::map<Natural, Entry> *level(unsigned long n) const {
    auto it = levels_.find(n);
    return it == levels_.end() ? nullptr : &it->second;
  }

  const Entry *find(const Natural &p, unsigned long n) const {
    auto lv = level(n);
    if (!lv)
      return nullptr;
    auto it = lv->find(p);
    return it == lv->end() ? nullptr : &it->second;
  }

private:
  unsigned long max_level_;
  unsigned long max_bits_;
  std::map<unsigned long, std::map<Natural, Entry>> levels_;
};

} // namespace detail

// The Solovay bound h(n) once it can no longer change: h(<sigma, m, t>) depends on the
// machine up to stage t only.
class SettledSolovay {
public:
  explicit SettledSolovay(const UniversalMachine &u) : u_(u) {}

  std::optional<Natural> operator()(unsigned long r) {
    auto it = cache_.find(r);
    if (it != cache_.end())
      return it->second;
    const Natural code(r);
    if (untriple(code).third > Natural(static_cast<unsigned long>(u_.stage())))
      return std::nullopt;
    return cache_[r] = solovay_h(u_, code);
  }

private:
  const UniversalMachine &u_;
  std::map<unsigned long, Natural> cache_;
};

// Builds the slow enumeration of the tree of witnesses (one leaf per stage) together with
// the thin subtree G and its machine L. Every label of the tree, including the leaf,
// carries a description of <p, level> of length at most h(level) + b.
inline PointTreeResult build_ktrivial_point_trees(UniversalMachine &u, const SpacePtr &space,
                                                  const PointTreeConfig &cfg) {
  if (cfg.n_star < 2)
    throw ContractViolation("the root level must be at least 2");
  PointTreeResult out;
  out.run = ConstructionRun("ktrivial-point-trees", "constructions", cfg.stages);
  ConstructionRun &run = out.run;
  out.machine_id = u.reserve_machine("point-tree-L");
  out.machine_constant = u.machine(out.machine_id).reserved_constant();
  run.constants()["c_L"] = out.machine_constant;

  detail::LevelIndex index(cfg.max_level, cfg.max_output_bits);
  for (const auto &h : u.domain())
    index.add(h);
  SettledSolovay h_of(u);

  auto level_of = [&](const LabelTuple &t) { return cfg.n_star + t.size() - 1; };
  auto bound_at = [&](unsigned long level) -> std::optional<Natural> {
    auto h = h_of(level);
    if (!h)
      return std::nullopt;
    return *h + cfg.b;
  };
  auto qualifies = [&](const Natural &p, unsigned long level) {
    auto bound = bound_at(level);
    auto e = index.find(p, level);
    return bound && e && Natural(static_cast<unsigned long>(e->length)) <= *bound;
  };
  auto close = [&](const Natural &q, const Natural &p, unsigned long level) {
    return space->distance(q, p) <= pow2(-static_cast<long>(level));
  };

  std::set<LabelTuple> slow{LabelTuple{}};
  out.slow_tree.push_back({});
  out.thin_tree.push_back({});
  std::set<std::pair<std::size_t, Natural>> present;                // (length, last label) in G
  std::map<std::pair<std::size_t, Natural>, LabelTuple> least_node;   // least G-node of that shape
  std::map<LabelTuple, std::size_t> l_length;                         // shortest L-input per node
  std::map<std::string, LabelTuple> l_graph;                          // L-input -> node

  for (Stage s = u.stage() + 1; s <= cfg.stages; ++s) {
    StageSnapshot snap = u.run_stage();
    for (const auto &h : snap.new_halts)
      index.add(h);

    // Least node of T_s outside the slow tree; its parent is in the slow tree because codes
    // of proper prefixes are smaller.
    std::optional<std::pair<Natural, LabelTuple>> pick;
    for (const auto &rho : out.slow_tree) {
      const unsigned long level = cfg.n_star + rho.size();
      if (level > cfg.max_level)
        continue;
      const auto *entries = index.level(level);
      if (!entries)
        continue;
      for (const auto &[p, e] : *entries) {
        if (rho.empty() ? p != cfg.p_tilde : !close(rho.back(), p, level))
          continue;
        if (!qualifies(p, level))
          continue;
        LabelTuple tau = rho;
        tau.push_back(p);
        if (slow.count(tau))
          continue;
        Natural code = encode_tuple(tau);
        if (!pick || code < pick->first)
          pick = std::make_pair(std::move(code), std::move(tau));
      }
    }
    const std::size_t before = out.slow_tree.size();
    if (pick) {
      const LabelTuple &tau = pick->second;
      slow.insert(tau);
      out.slow_tree.push_back(tau);
      run.log(s, "slow-leaf", Json{{"node", label_tuple_json(tau)}, {"level", level_of(tau)}});
      const unsigned long level = level_of(tau);
      const Natural &p = tau.back();
      if (!present.count({tau.size(), p})) {
        LabelTuple eta;
        if (tau.size() > 1) {
          auto it = least_node.find({tau.size() - 1, tau[tau.size() - 2]});
          if (it == least_node.end())
            throw ContractViolation("parent label missing from the thin tree");
          eta = it->second;
        }
        eta.push_back(p);
        const detail::LevelIndex::Entry *e = index.find(p, level);
        if (l_graph.count(e->input.str()))
          throw ContractViolation("description of <p, n> already used although p is absent at level n");
        u.add_entry(out.machine_id, e->input, encode_tuple(eta), s);
        l_graph[e->input.str()] = eta;
        auto &best = l_length[eta];
        if (best == 0 || e->input.size() < best)
          best = e->input.size();
        present.insert({eta.size(), p});
        auto key = std::make_pair(eta.size(), p);
        auto it = least_node.find(key);
        if (it == least_node.end() || encode_tuple(eta) < encode_tuple(it->second))
          least_node[key] = eta;
        out.thin_tree.push_back(eta);
        run.log(s, "thin-node", Json{{"node", label_tuple_json(eta)}, {"level", level},
                                     {"L_input", e->input.str()}, {"length", e->input.size()}});
      }
    }
    run.check(s, "one_leaf_per_stage", out.slow_tree.size() <= before + 1);

    // Every label present at a level of the slow tree is present there in G.
    std::optional<std::string> sim_fail;
    for (const auto &tau : out.slow_tree)
      if (!tau.empty() && !present.count({tau.size(), tau.back()}) && !sim_fail)
        sim_fail = "label " + tau.back().get_str() + " at level " + std::to_string(level_of(tau));
    run.check(s, "rhosimeta", !sim_fail, sim_fail.value_or(""));

    // Every prefix of a G-node has an L-description within h(level) + b.
    std::optional<std::string> compr_fail;
    for (const auto &eta : out.thin_tree)
      for (std::size_t m = 1; m <= eta.size() && !compr_fail; ++m) {
        const LabelTuple pre(eta.begin(), eta.begin() + static_cast<long>(m));
        auto it = l_length.find(pre);
        auto bound = bound_at(level_of(pre));
        if (it == l_length.end() || !bound || Natural(static_cast<unsigned long>(it->second)) > *bound)
          compr_fail = "prefix of length " + std::to_string(m) + " of a node at level " +
                       std::to_string(level_of(eta));
      }
    run.check(s, "Lcompr", !compr_fail, compr_fail.value_or(""));

    // A description of <p, n> in the domain of L means p is at level n of G.
    std::optional<std::string> prop_fail;
    for (const auto &[w, eta] : l_graph) {
      const Halting *h = u.halting_of(BitString(w));
      if (!h)
        continue;
      auto [p, n] = unpair(h->output);
      const std::size_t len = n.get_ui() + 1 - cfg.n_star;
      if (!present.count({len, p}) && !prop_fail)
        prop_fail = "input " + w + " names label " + p.get_str() + " absent from its level";
    }
    run.check(s, "Lprop", !prop_fail, prop_fail.value_or(""));
  }

  // Let every entry of L become visible, then audit G.
  const Stage flush = std::max<Stage>(cfg.stages + 1, u.max_input_length() + 2);
  u.run_until(flush);
  out.final_stage = u.stage();
  const unsigned long precision = cfg.max_level + 4;
  std::map<unsigned long, std::size_t> per_level;
  for (const auto &eta : out.thin_tree) {
    if (eta.empty())
      continue;
    const unsigned long level = level_of(eta);
    ++per_level[level];
    auto bound = bound_at(level);
    const Complexity k = u.K(encode_tuple(eta));
    run.check(out.final_stage, "thin_node_compressible",
              bound && k && Natural(static_cast<unsigned long>(*k)) <= *bound + out.machine_constant,
              "node at level " + std::to_string(level) + " has K=" + to_string(k));
    auto bad = validate_cauchy_name(CauchyName{space, eta}, precision, cfg.n_star);
    run.check(out.final_stage, "thin_branch_cauchy", bad.empty(), "node at level " + std::to_string(level));
  }
  for (const auto &tau : out.slow_tree) {
    bool ok = true;
    for (std::size_t k = 0; k < tau.size(); ++k) {
      const unsigned long level = cfg.n_star + k;
      ok = ok && qualifies(tau[k], level) && (k == 0 ? tau[k] == cfg.p_tilde : close(tau[k - 1], tau[k], level));
    }
    run.check(out.final_stage, "slow_tree_inside_T", ok);
  }
  Json levels = Json::object();
  for (const auto &[lv, c] : per_level)
    levels[std::to_string(lv)] = c;
  run.final_state() = Json{{"slow_tree_size", out.slow_tree.size()},
                           {"thin_tree_size", out.thin_tree.size()},
                           {"thin_nodes_per_level", std::move(levels)},
                           {"L_entries", u.machine(out.machine_id).entries().size()},
                           {"final_stage", out.final_stage}};
  return out;
}

struct PointTreeWitness {
  unsigned long n_star;
  Natural p_tilde;
  std::size_t complexity;
};

// Brute-force search for a root: least level n >= 2, then least label p, with
// K_s(<p, n>) <= K_s(n) + b and d(x_n, p) <= 2^-n for the given name of x.
inline std::optional<PointTreeWitness> find_point_tree_witness(const UniversalMachine &u, const CauchyName &x,
                                                               std::size_t b, unsigned long n_max,
                                                               unsigned long max_output_bits = 160) {
  std::map<unsigned long, std::map<Natural, std::size_t>> candidates;
  for (const auto &[word, hist] : u.minima()) {
    if (bit_length(word) > max_output_bits)
      continue;
    auto [p, n] = unpair(word);
    if (n < 2 || n > Natural(n_max))
      continue;
    candidates[n.get_ui()][p] = hist.back().length;
  }
  for (const auto &[n, labels] : candidates) {
    const Complexity kn = u.K(Natural(n));
    if (!kn || n >= x.entries.size())
      continue;
    for (const auto &[p, k] : labels)
      if (k <= *kn + b && x.space->distance(x.entries[n], p) <= pow2(-static_cast<long>(n)))
        return PointTreeWitness{n, p, k};
  }
  return std::nullopt;
}

} // namespace randwork
