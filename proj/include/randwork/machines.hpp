// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "randwork/errors.hpp"
#include "randwork/numeric.hpp"

namespace randwork {

using Stage = std::size_t;

// Stage complexity value; nullopt stands for infinity.
using Complexity = std::optional<std::size_t>;

inline std::string to_string(const Complexity &c) { return c ? std::to_string(*c) : std::string("inf"); }

// c + k, infinite stays infinite.
inline Complexity plus(const Complexity &c, std::size_t k) { return c ? Complexity(*c + k) : std::nullopt; }

struct KCRequest {
  std::size_t length;
  Natural word;
};

struct MachineEntry {
  BitString input;
  Natural output;
  Stage halt;
};

// Graph of one machine, growing by stages. Prefix-free unless built as a plain machine.
class MachineTable {
public:
  MachineTable(std::size_t id, std::string name, bool prefix_free = true)
      : id_(id), name_(std::move(name)), prefix_free_(prefix_free) {
    free_.insert(BitString());
  }

  std::size_t id() const noexcept { return id_; }
  const std::string &name() const noexcept { return name_; }
  // Cost of the coding prefix 0^id 1 in the universal machine.
  std::size_t reserved_constant() const noexcept { return id_ + 1; }
  bool prefix_free() const noexcept { return prefix_free_; }
  const std::vector<MachineEntry> &entries() const noexcept { return entries_; }
  const Rational &weight() const noexcept { return weight_; }

  std::optional<Natural> lookup(const BitString &input) const {
    auto it = by_input_.find(input.str());
    if (it == by_input_.end())
      return std::nullopt;
    return entries_[it->second].output;
  }

  bool can_add(const BitString &input) const {
    if (by_input_.count(input.str()))
      return false;
    if (!prefix_free_)
      return true;
    if (proper_prefixes_.count(input.str()))
      return false;
    for (std::size_t k = 0; k < input.size(); ++k)
      if (by_input_.count(input.str().substr(0, k)))
        return false;
    return true;
  }

  // Direct graph entry; halts (becomes runnable) at the given stage.
  const MachineEntry &add(const BitString &input, Natural output, Stage halt) {
    if (!can_add(input))
      throw ContractViolation(name_ + ": input " + input.str() + " breaks prefix-freeness");
    direct_ = true;
    return insert(input, std::move(output), halt);
  }

  // Kraft-Chaitin: assigns a fresh input of exactly the requested length. Picks the
  // longest free cylinder that fits, leftmost among equals, which keeps free lengths
  // distinct and therefore never fails while the weight allows the request.
  BitString kc_extend(const KCRequest &req, Stage halt) {
    if (direct_)
      throw ContractViolation(name_ + ": Kraft-Chaitin requests on a machine with direct entries");
    if (weight_ + pow2(-static_cast<long>(req.length)) > 1)
      throw BudgetExceeded(name_ + ": request of length " + std::to_string(req.length) + " exceeds weight 1");
    std::optional<BitString> best;
    for (const auto &f : free_) {
      if (f.size() > req.length)
        continue;
      if (!best || f.size() > best->size() || (f.size() == best->size() && f.str() < best->str()))
        best = f;
    }
    if (!best)
      throw BudgetExceeded(name_ + ": no free cylinder of length <= " + std::to_string(req.length));
    free_.erase(*best);
    BitString assigned = *best;
    while (assigned.size() < req.length) {
      free_.insert(assigned.child(true));
      assigned = assigned.child(false);
    }
    insert(assigned, req.word, halt);
    return assigned;
  }

private:
  const MachineEntry &insert(const BitString &input, Natural output, Stage halt) {
    by_input_.emplace(input.str(), entries_.size());
    for (std::size_t k = 0; k < input.size(); ++k)
      proper_prefixes_.insert(input.str().substr(0, k));
    if (prefix_free_)
      weight_ += pow2(-static_cast<long>(input.size()));
    entries_.push_back({input, std::move(output), halt});
    return entries_.back();
  }

  std::size_t id_;
  std::string name_;
  bool prefix_free_;
  bool direct_ = false;
  std::vector<MachineEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_input_;
  std::unordered_set<std::string> proper_prefixes_;
  std::set<BitString> free_;
  Rational weight_ = 0;
};

// One computation of the universal machine.
struct Halting {
  BitString input; // universal input 0^e 1 sigma
  Natural output;
  Stage stage;         // least stage at which it is visible
  std::size_t machine; // e
};

struct StageSnapshot {
  Stage stage;
  std::vector<Halting> new_halts;
  Rational omega;
  Rational kraft_sum;
};

// Universal machine U(0^e 1 sigma) = M_e(sigma) with a single deterministic clock:
// at stage s, machine e < s runs inputs of length < s for s steps. An entry with
// halting time h of machine e on sigma is visible from stage max(e+1, |sigma|+1, h).
// Machine inputs longer than max_input_length never run (desk-scale bound).
class UniversalMachine {
public:
  // Called once per stage before visibility is computed; may add entries halting now.
  using Feeder = std::function<void(UniversalMachine &, Stage)>;
  // Called for every new computation after a stage is computed.
  using Observer = std::function<void(UniversalMachine &, const Halting &)>;

  explicit UniversalMachine(std::size_t max_input_length = 28, bool prefix_free = true)
      : max_input_length_(max_input_length), prefix_free_(prefix_free) {
    omega_history_.push_back(0);
  }

  UniversalMachine(const UniversalMachine &) = delete;
  UniversalMachine &operator=(const UniversalMachine &) = delete;
  UniversalMachine(UniversalMachine &&) = default;
  UniversalMachine &operator=(UniversalMachine &&) = default;

  std::size_t reserve_machine(std::string name) {
    machines_.push_back(std::make_unique<MachineTable>(machines_.size(), std::move(name), prefix_free_));
    return machines_.size() - 1;
  }

  MachineTable &machine(std::size_t id) { return *machines_.at(id); }
  const MachineTable &machine(std::size_t id) const { return *machines_.at(id); }
  std::size_t machine_count() const noexcept { return machines_.size(); }
  std::size_t max_input_length() const noexcept { return max_input_length_; }
  bool prefix_free() const noexcept { return prefix_free_; }

  void add_feeder(std::size_t id, Feeder f) { feeders_.emplace_back(id, std::move(f)); }
  void add_observer(std::size_t id, Observer f) { observers_.emplace_back(id, std::move(f)); }

  const MachineEntry &add_entry(std::size_t id, const BitString &input, Natural output, Stage halt) {
    const auto &e = machine(id).add(input, std::move(output), halt);
    schedule(id, e);
    return e;
  }

  BitString kc_extend(std::size_t id, const KCRequest &req, Stage halt) {
    BitString in = machine(id).kc_extend(req, halt);
    schedule(id, machine(id).entries().back());
    return in;
  }

  // Universal input for machine e on sigma.
  static BitString code_input(std::size_t e, const BitString &sigma) {
    return BitString::repeat(false, e).child(true) + sigma;
  }

  Stage stage() const noexcept { return stage_; }
  const Rational &omega() const noexcept { return omega_history_.back(); }
  Rational omega_at(Stage s) const { return omega_history_.at(std::min(s, stage_)); }
  const std::vector<Rational> &omega_history() const noexcept { return omega_history_; }
  const std::vector<Halting> &domain() const noexcept { return domain_; }

  StageSnapshot run_stage() {
    ++stage_;
    for (auto &[id, f] : feeders_)
      f(*this, stage_);
    std::vector<Halting> fresh;
    while (!pending_.empty() && pending_.begin()->first <= stage_) {
      auto node = pending_.extract(pending_.begin());
      const auto &[e, idx] = node.mapped();
      const MachineEntry &entry = machine(e).entries()[idx];
      fresh.push_back({code_input(e, entry.input), entry.output, stage_, e});
    }
    std::sort(fresh.begin(), fresh.end(), [](const Halting &a, const Halting &b) {
      return std::tie(a.machine, a.input) < std::tie(b.machine, b.input);
    });
    Rational omega = omega_history_.back();
    for (const auto &h : fresh) {
      if (prefix_free_)
        omega += pow2(-static_cast<long>(h.input.size()));
      halting_by_input_.emplace(h.input.str(), domain_.size());
      domain_.push_back(h);
      record_description(domain_.size() - 1);
    }
    omega_history_.push_back(omega);
    for (const auto &h : fresh)
      for (auto &[id, f] : observers_)
        f(*this, h);
    return {stage_, std::move(fresh), omega, omega};
  }

  void run_until(Stage s) {
    while (stage_ < s)
      run_stage();
  }

  // K_s(w) at the current stage.
  Complexity K(const Natural &w) const {
    auto it = best_.find(w);
    if (it == best_.end())
      return std::nullopt;
    return it->second.back().length;
  }

  // K_s(w) at an earlier stage s.
  Complexity K_at(const Natural &w, Stage s) const {
    auto it = best_.find(w);
    if (it == best_.end())
      return std::nullopt;
    Complexity c;
    for (const auto &d : it->second) {
      if (d.stage > s)
        break;
      c = d.length;
    }
    return c;
  }

  // Shortest description of w at the current stage (first found among equals).
  const Halting *shortest_description(const Natural &w) const {
    auto it = best_.find(w);
    if (it == best_.end())
      return nullptr;
    return &domain_[it->second.back().domain_index];
  }

  // Every word with a description, with its current history of minima.
  struct Minimum {
    Stage stage;
    std::size_t length;
    std::size_t domain_index;
  };
  const std::unordered_map<Natural, std::vector<Minimum>, NaturalHash> &minima() const noexcept { return best_; }

  const Halting *halting_of(const BitString &universal_input) const {
    auto it = halting_by_input_.find(universal_input.str());
    return it == halting_by_input_.end() ? nullptr : &domain_[it->second];
  }

  // Words sorted by value, for deterministic sweeps.
  std::vector<Natural> described_words() const {
    std::vector<Natural> out;
    out.reserve(best_.size());
    for (const auto &[w, _] : best_)
      out.push_back(w);
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  void schedule(std::size_t e, const MachineEntry &entry) {
    if (entry.input.size() > max_input_length_)
      return;
    const Stage appear = std::max({static_cast<Stage>(e + 1), static_cast<Stage>(entry.input.size() + 1), entry.halt});
    const std::size_t idx = static_cast<std::size_t>(&entry - machine(e).entries().data());
    pending_.emplace(appear, std::make_pair(e, idx));
  }

  void record_description(std::size_t domain_index) {
    const Halting &h = domain_[domain_index];
    auto &hist = best_[h.output];
    if (hist.empty() || h.input.size() < hist.back().length)
      hist.push_back({h.stage, h.input.size(), domain_index});
  }

  std::size_t max_input_length_;
  bool prefix_free_;
  Stage stage_ = 0;
  std::vector<std::unique_ptr<MachineTable>> machines_;
  std::vector<std::pair<std::size_t, Feeder>> feeders_;
  std::vector<std::pair<std::size_t, Observer>> observers_;
  std::multimap<Stage, std::pair<std::size_t, std::size_t>> pending_;
  std::vector<Halting> domain_;
  std::unordered_map<std::string, std::size_t> halting_by_input_;
  std::unordered_map<Natural, std::vector<Minimum>, NaturalHash> best_;
  std::vector<Rational> omega_history_;
};

inline Complexity K_stage(const UniversalMachine &u, const Natural &w, Stage s) { return u.K_at(w, s); }

// h(r): decode r = <sigma, n, t>; |sigma| if t is the least stage with U_t(sigma) = n, else r.
inline Natural solovay_h(const UniversalMachine &u, const Natural &r) {
  const Triple tr = untriple(r);
  const BitString sigma = string_of(tr.first);
  const Halting *h = u.halting_of(sigma);
  if (h && h->output == tr.second && Natural(static_cast<unsigned long>(h->stage)) == tr.third)
    return Natural(static_cast<unsigned long>(sigma.size()));
  return r;
}

// #{p <= horizon : K_s(<p,n>) <= K_s(n) + b}.
inline std::size_t count_compressible(const UniversalMachine &u, const Natural &n, std::size_t b, Stage s,
                                      std::size_t horizon = std::size_t{1} << 16) {
  const Complexity kn = u.K_at(n, s);
  if (!kn)
    return 0;
  std::size_t count = 0;
  for (std::size_t p = 0; p <= horizon; ++p) {
    const Complexity kp = u.K_at(pair(Natural(static_cast<unsigned long>(p)), n), s);
    if (kp && *kp <= *kn + b)
      ++count;
  }
  return count;
}

} // namespace randwork
