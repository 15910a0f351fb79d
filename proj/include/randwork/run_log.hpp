// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "randwork/machines.hpp"

namespace randwork {

using Json = nlohmann::ordered_json;

// One engine action.
struct Event {
  Stage stage;
  std::string op;
  Json data;
};

// Running tally of one named invariant.
struct InvariantTally {
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::optional<Stage> first_failure;
  std::string first_detail;
  Stage last_checked = 0;
};

// Event log and invariant ledger of one deterministic run.
class ConstructionRun {
public:
  ConstructionRun() = default;
  ConstructionRun(std::string id, std::string module, Stage horizon)
      : id_(std::move(id)), module_(std::move(module)), horizon_(horizon) {}

  const std::string &id() const noexcept { return id_; }
  const std::string &module() const noexcept { return module_; }
  Stage horizon() const noexcept { return horizon_; }
  const std::vector<Event> &events() const noexcept { return events_; }
  const std::map<std::string, InvariantTally> &invariants() const noexcept { return invariants_; }
  Json &final_state() noexcept { return final_state_; }
  const Json &final_state() const noexcept { return final_state_; }
  Json &constants() noexcept { return constants_; }
  const Json &constants() const noexcept { return constants_; }

  void log(Stage s, std::string op, Json data = Json::object()) {
    events_.push_back({s, std::move(op), std::move(data)});
  }

  // Records one evaluation of an invariant; a failure is also logged as an event.
  bool check(Stage s, const std::string &name, bool ok, const std::string &detail = {}) {
    auto &t = invariants_[name];
    ++t.checked;
    t.last_checked = s;
    if (!ok) {
      ++t.failed;
      if (!t.first_failure) {
        t.first_failure = s;
        t.first_detail = detail;
      }
      log(s, "invariant-violation", Json{{"invariant", name}, {"detail", detail}});
    }
    return ok;
  }

  bool passed(const std::string &name) const {
    auto it = invariants_.find(name);
    return it != invariants_.end() && it->second.checked > 0 && it->second.failed == 0;
  }

  bool all_passed() const {
    for (const auto &[name, t] : invariants_)
      if (t.failed > 0)
        return false;
    return true;
  }

  // One JSON object per line: {stage, module, op, data}.
  std::string events_jsonl() const {
    std::ostringstream os;
    for (const auto &e : events_)
      os << Json{{"stage", e.stage}, {"module", module_}, {"op", e.op}, {"data", e.data}}.dump() << "\n";
    return os.str();
  }

  Json invariants_json() const {
    Json out = Json::object();
    for (const auto &[name, t] : invariants_) {
      Json j{{"checked", t.checked}, {"failed", t.failed}, {"last_checked", t.last_checked}};
      if (t.first_failure) {
        j["first_failure"] = *t.first_failure;
        j["detail"] = t.first_detail;
      }
      out[name] = std::move(j);
    }
    return out;
  }

private:
  std::string id_;
  std::string module_;
  Stage horizon_ = 0;
  std::vector<Event> events_;
  std::map<std::string, InvariantTally> invariants_;
  Json final_state_ = Json::object();
  Json constants_ = Json::object();
};

inline std::string natural_json(const Natural &n) { return n.get_str(); }

} // namespace randwork
