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
#include "randwork/machines.hpp"
#include "randwork/numeric.hpp"
#include "randwork/run_log.hpp"

namespace randwork {

// Staged finite sets of values indexed by (family member, index), for example U_m of one
// functional or T_n of one requirement.
class TraceFamily {
public:
  using Key = std::pair<std::size_t, std::size_t>;

  bool insert(std::size_t member, std::size_t index, const Natural &value) {
    return traces_[{member, index}].insert(value).second;
  }
  void reset(std::size_t member, std::size_t index, std::set<Natural> values) {
    traces_[{member, index}] = std::move(values);
  }
  std::size_t size(std::size_t member, std::size_t index) const {
    auto it = traces_.find({member, index});
    return it == traces_.end() ? 0 : it->second.size();
  }
  const std::map<Key, std::set<Natural>> &traces() const noexcept { return traces_; }

  Json to_json() const {
    Json out = Json::array();
    for (const auto &[key, values] : traces_) {
      Json vals = Json::array();
      for (const auto &v : values)
        vals.push_back(v.get_str());
      out.push_back(Json{{"member", key.first}, {"index", key.second}, {"values", std::move(vals)}});
    }
    return out;
  }

private:
  std::map<Key, std::set<Natural>> traces_;
};

// Compares x^(1+eps) with y for eps = p/q exactly, as x^(p+q) against y^q.
inline int compare_power(const Natural &x, const Rational &eps, const Natural &y) {
  const unsigned long p = Natural(eps.get_num()).get_ui(), q = Natural(eps.get_den()).get_ui();
  Natural lhs, rhs;
  mpz_pow_ui(lhs.get_mpz_t(), x.get_mpz_t(), p + q);
  mpz_pow_ui(rhs.get_mpz_t(), y.get_mpz_t(), q);
  return cmp(lhs, rhs);
}

// x^(1+eps) > y.
inline bool power_exceeds(const Natural &x, const Rational &eps, const Natural &y) {
  return compare_power(x, eps, y) > 0;
}

// x^(1+eps) >= y.
inline bool power_at_least(const Natural &x, const Rational &eps, const Natural &y) {
  return compare_power(x, eps, y) >= 0;
}

// Pointwise least increasing sequence with delta(n)^(1+eps) > 2^(n+1) * sum_{i<=n} delta(i).
inline std::vector<Natural> delta_sequence(const Rational &eps, std::size_t count) {
  if (eps <= 0)
    throw ContractViolation("epsilon must be positive");
  std::vector<Natural> out;
  Natural sum = 0;
  for (std::size_t n = 0; n < count; ++n) {
    const Natural factor = pow2_natural(n + 1);
    Natural lo = out.empty() ? Natural(1) : Natural(out.back() + 1);
    auto ok = [&](const Natural &d) { return power_exceeds(d, eps, factor * (sum + d)); };
    Natural hi = lo;
    while (!ok(hi))
      hi *= 2;
    while (lo < hi) { // least value that works; the property is monotone in d
      Natural mid = (lo + hi) / 2;
      if (ok(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    out.push_back(lo);
    sum += lo;
  }
  return out;
}

// Stage-indexed embedding of binary strings into binary strings, stored explicitly up to a
// depth and continued by appending the remaining bits below it.
class EmbeddingTree {
public:
  explicit EmbeddingTree(std::size_t depth = 10) : depth_(depth) {
    const std::size_t nodes = (std::size_t{2} << depth) - 1;
    images_.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
      images_.push_back(string_of(Natural(static_cast<unsigned long>(i))));
  }

  std::size_t depth() const noexcept { return depth_; }

  BitString image(const BitString &s) const {
    if (s.size() <= depth_)
      return images_[index_of(s)];
    BitString out = images_[index_of(s.prefix(depth_))];
    for (std::size_t k = depth_; k < s.size(); ++k)
      out.push_back(s[k]);
    return out;
  }

  // Kill the branching between node and its extension source: the subtree above node now
  // carries the images of the subtree above source.
  void collapse(const BitString &node, const BitString &source) {
    if (!node.is_prefix_of(source) || node.size() > depth_)
      throw ContractViolation("collapse needs a node within depth and an extension of it");
    std::vector<std::pair<std::size_t, BitString>> updates;
    std::vector<BitString> level{BitString()};
    while (!level.empty()) {
      std::vector<BitString> next;
      for (const auto &tail : level) {
        updates.emplace_back(index_of(node + tail), image(source + tail));
        if (node.size() + tail.size() < depth_) {
          next.push_back(tail.child(false));
          next.push_back(tail.child(true));
        }
      }
      level = std::move(next);
    }
    for (auto &[idx, img] : updates)
      images_[idx] = std::move(img);
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (code_of(images_[i]) != Natural(static_cast<unsigned long>(i)))
        return false;
    return true;
  }

  // Children's images properly extend the parent's and are incomparable.
  std::optional<std::string> embedding_defect() const {
    for (std::size_t i = 0; 2 * i + 2 < images_.size(); ++i) {
      const BitString &p = images_[i], &a = images_[2 * i + 1], &b = images_[2 * i + 2];
      if (!(p.is_prefix_of(a) && a.size() > p.size() && p.is_prefix_of(b) && b.size() > p.size()))
        return "node " + string_of(Natural(static_cast<unsigned long>(i))).str() + " not extended by its children";
      if (a.is_prefix_of(b) || b.is_prefix_of(a))
        return "children of node " + string_of(Natural(static_cast<unsigned long>(i))).str() + " are comparable";
    }
    return std::nullopt;
  }

  Json to_json(std::size_t max_depth) const {
    Json out = Json::object();
    for (std::size_t i = 0; i < images_.size(); ++i) {
      BitString s = string_of(Natural(static_cast<unsigned long>(i)));
      if (s.size() > max_depth)
        break;
      if (images_[i] != s)
        out[s.str().empty() ? "root" : s.str()] = images_[i].str();
    }
    return out;
  }

private:
  static std::size_t index_of(const BitString &s) { return code_of(s).get_ui(); }

  std::size_t depth_;
  std::vector<BitString> images_; // indexed by length-lex code
};

// Phi_e^X(input) = output for every X extending oracle, from the given stage on.
struct FunctionalRule {
  std::size_t functional;
  BitString oracle;
  std::size_t input;
  Natural output;
  Stage stage;
};

inline std::vector<FunctionalRule> functional_rules_from_json(const Json &j) {
  std::vector<FunctionalRule> out;
  try {
    for (const auto &r : j.at("rules"))
      out.push_back({r.at("functional").get<std::size_t>(), BitString(r.at("oracle").get<std::string>()),
                     r.at("input").get<std::size_t>(), Natural(r.at("output").get<std::string>()),
                     r.at("stage").get<Stage>()});
  } catch (const nlohmann::json::exception &e) {
    throw ScriptError(std::string("malformed functional script: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw ScriptError(std::string("malformed functional script: ") + e.what());
  }
  return out;
}

struct JumpTraceResult {
  ConstructionRun run;
  std::vector<Natural> delta;
  EmbeddingTree tree;
  TraceFamily traces; // member = functional, index = input m
  std::size_t collapses = 0;
};

// Level n of m: delta(n) <= m < delta(n+1).
inline std::optional<std::size_t> delta_level(const std::vector<Natural> &delta, std::size_t m) {
  for (std::size_t n = 0; n + 1 < delta.size(); ++n)
    if (delta[n] <= Natural(static_cast<unsigned long>(m)) && Natural(static_cast<unsigned long>(m)) < delta[n + 1])
      return n;
  return std::nullopt;
}

// Replays the perfect-tree construction for scripted functionals. Requirement e handles
// inputs m at levels n >= e; at most one collapse per stage, least (e, m, node) first.
inline JumpTraceResult build_jump_traceable_tree(const Rational &eps, std::vector<FunctionalRule> rules,
                                                 Stage stages, std::size_t depth = 10) {
  // Scripts must describe functionals: outputs agree on comparable oracles.
  for (std::size_t a = 0; a < rules.size(); ++a)
    for (std::size_t b = a + 1; b < rules.size(); ++b) {
      const auto &x = rules[a], &y = rules[b];
      if (x.functional == y.functional && x.input == y.input && x.output != y.output &&
          (x.oracle.is_prefix_of(y.oracle) || y.oracle.is_prefix_of(x.oracle)))
        throw ScriptError("functional " + std::to_string(x.functional) + " gives two outputs on input " +
                          std::to_string(x.input) + " along one oracle");
    }
  std::sort(rules.begin(), rules.end(), [](const FunctionalRule &x, const FunctionalRule &y) {
    return std::tie(x.functional, x.input, x.stage, x.oracle) < std::tie(y.functional, y.input, y.stage, y.oracle);
  });

  JumpTraceResult out{ConstructionRun("jump-traceable-tree", "constructions", stages), delta_sequence(eps, depth + 2),
                      EmbeddingTree(depth), {}, 0};
  ConstructionRun &run = out.run;
  Natural sum = 0;
  for (std::size_t n = 0; n < out.delta.size(); ++n) {
    sum += out.delta[n];
    run.check(0, "delta_inequality", power_exceeds(out.delta[n], eps, pow2_natural(n + 1) * sum),
              "delta(" + std::to_string(n) + ")");
  }
  Json delta_json = Json::array();
  for (const auto &d : out.delta)
    delta_json.push_back(d.get_str());
  run.log(0, "delta", Json{{"epsilon", to_string(eps)}, {"values", std::move(delta_json)}});

  std::vector<std::pair<const FunctionalRule *, std::size_t>> usable; // rule, level
  for (const auto &r : rules) {
    auto level = delta_level(out.delta, r.input);
    if (r.stage > stages) {
      run.log(stages, "pending", Json{{"functional", r.functional}, {"input", r.input}, {"stage", r.stage}});
      continue;
    }
    if (!level || *level >= depth || *level < r.functional) {
      run.log(0, "ignored", Json{{"functional", r.functional}, {"input", r.input}, {"reason", "level out of range"}});
      continue;
    }
    usable.emplace_back(&r, *level);
  }

  auto nodes_at = [](std::size_t n) {
    std::vector<BitString> out;
    const std::size_t count = std::size_t{1} << n;
    for (std::size_t k = 0; k < count; ++k)
      out.push_back(string_of(Natural(static_cast<unsigned long>(count - 1 + k))));
    return out;
  };
  // Descends from node along images comparable with the oracle; returns the first node
  // whose image extends it.
  auto find_source = [&](const BitString &node, const BitString &oracle) -> std::optional<BitString> {
    BitString x = node;
    for (;;) {
      const BitString img = out.tree.image(x);
      if (oracle.is_prefix_of(img))
        return x;
      if (!img.is_prefix_of(oracle))
        return std::nullopt;
      std::optional<BitString> next;
      for (bool bit : {false, true}) {
        const BitString ci = out.tree.image(x.child(bit));
        if (ci.is_prefix_of(oracle) || oracle.is_prefix_of(ci)) {
          next = x.child(bit);
          break;
        }
      }
      if (!next)
        return std::nullopt;
      x = *next;
    }
  };

  bool dirty = true;
  for (Stage s = 1; s <= stages; ++s) {
    for (const auto &[r, level] : usable)
      dirty = dirty || r->stage == s;
    if (!dirty)
      continue;
    dirty = false;
    bool collapsed = false;
    for (const auto &[r, level] : usable) {
      if (r->stage > s)
        continue;
      for (const auto &node : nodes_at(level)) {
        auto src = find_source(node, r->oracle);
        if (!src)
          continue;
        if (src->size() == node.size()) {
          if (out.traces.insert(r->functional, r->input, r->output))
            run.log(s, "enumerate", Json{{"functional", r->functional}, {"input", r->input},
                                         {"value", r->output.get_str()}, {"node", node.str()}});
          continue;
        }
        if (collapsed)
          continue;
        out.tree.collapse(node, *src);
        collapsed = true;
        dirty = true;
        ++out.collapses;
        out.traces.insert(r->functional, r->input, r->output);
        run.log(s, "collapse", Json{{"functional", r->functional}, {"input", r->input}, {"level", level},
                                    {"node", node.str()}, {"source", src->str()}, {"image", out.tree.image(node).str()},
                                    {"value", r->output.get_str()}});
      }
    }
    if (collapsed) {
      auto defect = out.tree.embedding_defect();
      run.check(s, "embedding", !defect, defect.value_or(""));
    }
    for (const auto &[key, values] : out.traces.traces()) {
      const std::size_t m = key.second;
      const std::size_t n = *delta_level(out.delta, m);
      const Natural bound = out.delta[n] * pow2_natural(n + 1);
      run.check(s, "trace_bound", Natural(static_cast<unsigned long>(values.size())) <= bound,
                "|U_" + std::to_string(m) + "| = " + std::to_string(values.size()));
      run.check(s, "bound_below_power", power_at_least(Natural(static_cast<unsigned long>(m)), eps, bound),
                "m = " + std::to_string(m));
    }
  }
  auto defect = out.tree.embedding_defect();
  run.check(stages, "embedding", !defect, defect.value_or(""));
  run.final_state() = Json{{"collapses", out.collapses},
                           {"identity", out.tree.is_identity()},
                           {"embedding", out.tree.to_json(std::min<std::size_t>(depth, 6))},
                           {"traces", out.traces.to_json()}};
  return out;
}

} // namespace randwork
