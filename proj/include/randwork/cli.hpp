// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "randwork/errors.hpp"
#include "randwork/experiments.hpp"
#include "randwork/run_log.hpp"

namespace randwork {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int violation = 1; // an invariant or contract failed
inline constexpr int usage = 2;     // unknown id, bad flag or parameter, missing artifacts
inline constexpr int script = 3;    // malformed script
inline constexpr int budget = 4;    // resource budget exceeded or other library failure
} // namespace exit_code

inline std::string trim(const std::string &text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

inline std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw UsageError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::pair<std::string, std::string> split_assignment(const std::string &text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || trim(text.substr(0, eq)).empty())
    throw UsageError("expected key=value, got '" + text + "'");
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

// Settings gathered from a config file or from flags; unset fields leave earlier values alone.
struct SpecOverrides {
  std::optional<std::string> id;
  std::optional<Stage> stages;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> script_path;
  std::map<std::string, std::string> params;
};

inline std::uint64_t parse_unsigned(const std::string &key, const std::string &value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-')
      throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw UsageError(key + " expects a nonnegative integer, got '" + value + "'");
  }
}

// Config file: one key = value per line, '#' starts a comment. Keys mirror the flags:
// id, stages, out, seed, script, and param (k=v) or param.k.
inline SpecOverrides parse_config(const std::string &text) {
  SpecOverrides out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty())
      continue;
    try {
      auto [key, value] = split_assignment(body);
      if (key == "id")
        out.id = value;
      else if (key == "stages")
        out.stages = parse_unsigned(key, value);
      else if (key == "out")
        out.out = value;
      else if (key == "seed")
        out.seed = parse_unsigned(key, value);
      else if (key == "script")
        out.script_path = value;
      else if (key == "param")
        out.params.insert_or_assign(split_assignment(value).first, split_assignment(value).second);
      else if (key.rfind("param.", 0) == 0 && key.size() > 6)
        out.params.insert_or_assign(key.substr(6), value);
      else
        throw UsageError("unknown key '" + key + "'");
    } catch (const UsageError &e) {
      throw UsageError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

inline void apply_overrides(ExperimentSpec &spec, const SpecOverrides &o) {
  if (o.id)
    spec.id = *o.id;
  if (o.stages)
    spec.stages = *o.stages;
  if (o.out)
    spec.out_dir = *o.out;
  if (o.seed)
    spec.seed = *o.seed;
  if (o.script_path)
    spec.script = read_text_file(*o.script_path);
  for (const auto &[k, v] : o.params)
    spec.params.insert_or_assign(k, v);
}

inline void print_registry(std::ostream &out) {
  for (const auto &e : experiment_registry()) {
    out << e.id << "  [" << e.module << ", " << e.default_stages << " stages"
        << (e.uses_script ? ", script" : "") << (e.uses_seed ? ", seed" : "") << "]\n    " << e.description << "\n";
    for (const auto &p : e.params)
      out << "    --param " << p.name << "=" << p.default_value << "  " << p.description << "\n";
  }
}

// Human-readable digest of a run directory.
inline int emit_report(const std::filesystem::path &dir, std::ostream &out, std::ostream &err) {
  for (const char *name : {"events.jsonl", "summary.csv", "state.json"})
    if (!std::filesystem::exists(dir / name)) {
      err << "missing artifact " << (dir / name).string() << "\n";
      return exit_code::usage;
    }
  Json state;
  try {
    state = Json::parse(read_text_file(dir / "state.json"));
  } catch (const Json::exception &e) {
    err << "state.json is not valid JSON: " << e.what() << "\n";
    return exit_code::usage;
  }
  out << "experiment " << state.value("id", "?") << " (module " << state.value("module", "?") << "), "
      << state.value("stages", Json(0)).dump() << " stages, seed " << state.value("seed", Json(0)).dump() << "\n";
  const Json invariants = state.value("invariants", Json::object());
  std::size_t failing = 0;
  for (const auto &[name, t] : invariants.items())
    failing += t.value("failed", 0) > 0 ? 1 : 0;
  out << "\ninvariants: " << invariants.size() << " tracked, " << failing << " failing\n";
  for (const auto &[name, t] : invariants.items()) {
    const std::size_t checked = t.value("checked", 0), failed = t.value("failed", 0);
    out << "  " << (failed == 0 ? "PASS " : "FAIL ") << std::left << std::setw(30) << name << std::right
        << std::setw(8) << checked << " checks";
    if (failed > 0)
      out << ", " << failed << " failed, first at stage " << t.value("first_failure", Json(0)).dump() << ": "
          << t.value("detail", "");
    out << "\n";
  }
  std::istringstream events(read_text_file(dir / "events.jsonl"));
  std::string line;
  std::size_t number = 0, shown = 0, total = 0;
  std::ostringstream violations;
  while (std::getline(events, line)) {
    ++number;
    if (line.find("\"invariant-violation\"") == std::string::npos)
      continue;
    const Json e = Json::parse(line);
    if (e.value("op", "") != "invariant-violation")
      continue;
    ++total;
    if (shown++ < 10)
      violations << "  stage " << e.value("stage", Json(0)).dump() << ", module " << e.value("module", "?")
                 << ", op " << e["data"].value("invariant", "?") << ": " << e["data"].value("detail", "")
                 << "  (events.jsonl line " << number << ")\n";
  }
  if (total > 0)
    out << "\nviolations (" << total << "):\n" << violations.str() << (total > shown ? "  ...\n" : "");
  out << "\nconstants:\n";
  const Json constants = state.value("constants", Json::object());
  if (constants.empty())
    out << "  (none)\n";
  for (const auto &[name, v] : constants.items()) {
    if (v.is_object()) {
      for (const auto &[machine, c] : v.items())
        out << "  " << std::left << std::setw(30) << (name + "/" + machine) << std::right << c.dump() << "\n";
    } else {
      out << "  " << std::left << std::setw(30) << name << std::right << v.dump() << "\n";
    }
  }
  const Json stats = state.value("statistics", Json::object());
  out << "\nstage statistics: " << stats.value("events", Json(0)).dump() << " events over stages "
      << stats.value("first_stage", Json(0)).dump() << ".." << stats.value("last_stage", Json(0)).dump() << "\n";
  const Json ops = stats.value("ops", Json::object());
  for (const auto &[op, n] : ops.items())
    out << "  " << std::left << std::setw(30) << op << std::right << n.dump() << "\n";
  return exit_code::ok;
}

// Runs one spec, writes its artifacts, and maps failures to exit codes.
inline int execute(const ExperimentSpec &spec, bool write, std::ostream &out, std::ostream &err) {
  try {
    const ConstructionRun run = run_experiment(spec);
    const std::filesystem::path dir = spec.out_dir.empty() ? std::filesystem::path("runs") / spec.id : std::filesystem::path(spec.out_dir);
    if (write)
      write_artifacts(dir, render_artifacts(spec, run));
    std::size_t checks = 0, failed = 0;
    for (const auto &[name, t] : run.invariants()) {
      checks += t.checked;
      failed += t.failed;
    }
    out << spec.id << ": " << run.invariants().size() << " invariants, " << checks << " checks, " << failed
        << " failed" << (write ? ", artifacts in " + dir.string() : std::string()) << "\n";
    if (run.all_passed())
      return exit_code::ok;
    for (const auto &[name, t] : run.invariants())
      if (t.failed > 0) {
        err << "invariant " << name << " failed at stage " << *t.first_failure << ": " << t.first_detail;
        if (auto line = first_violation_line(run); line && write)
          err << " (see " << (dir / "events.jsonl").string() << ":" << *line << ")";
        err << "\n";
        break;
      }
    return exit_code::violation;
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const ScriptError &e) {
    err << "script error: " << e.what() << "\n";
    return exit_code::script;
  } catch (const ContractViolation &e) {
    err << "contract violation: " << e.what() << "\n";
    return exit_code::violation;
  } catch (const BudgetExceeded &e) {
    err << "budget exceeded: " << e.what() << "\n";
    return exit_code::budget;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return exit_code::budget;
  }
}

inline int cli_main(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
  CLI::App app{"Desk-scale experiments on algorithmic randomness and K-triviality", "randwork"};
  app.require_subcommand(1);

  SpecOverrides flags;
  std::string id, config, report_dir;
  std::vector<std::string> params;
  std::optional<Stage> stages;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir, script;
  auto add_spec_options = [&](CLI::App *sub) {
    sub->add_option("id", id, "experiment id (see list)");
    sub->add_option("--config", config, "key = value file; flags override it");
    sub->add_option("--stages", stages, "stage horizon");
    sub->add_option("--out", out_dir, "output directory (default runs/<id>)");
    sub->add_option("--param", params, "experiment parameter k=v (repeatable)");
    sub->add_option("--script", script, "JSON script file");
    sub->add_option("--seed", seed, "seed for generated inputs");
  };
  CLI::App *run_cmd = app.add_subcommand("run", "run an experiment and write events.jsonl, summary.csv, state.json");
  add_spec_options(run_cmd);
  CLI::App *validate_cmd = app.add_subcommand("validate", "check an experiment spec without running it");
  add_spec_options(validate_cmd);
  CLI::App *list_cmd = app.add_subcommand("list", "list registered experiments and their parameters");
  CLI::App *report_cmd = app.add_subcommand("report", "summarize the artifacts of a run directory");
  report_cmd->add_option("dir", report_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return exit_code::usage;
  }

  if (list_cmd->parsed()) {
    print_registry(out);
    return exit_code::ok;
  }
  if (report_cmd->parsed())
    return emit_report(report_dir, out, err);

  ExperimentSpec spec;
  try {
    if (!config.empty())
      apply_overrides(spec, parse_config(read_text_file(config)));
    if (!id.empty())
      flags.id = id;
    flags.stages = stages;
    flags.seed = seed;
    flags.out = out_dir;
    flags.script_path = script;
    for (const auto &p : params) {
      auto [k, v] = split_assignment(p);
      flags.params.insert_or_assign(k, v);
    }
    apply_overrides(spec, flags);
    if (spec.id.empty())
      throw UsageError("no experiment id given");
    if (validate_cmd->parsed()) {
      validate_experiment(spec);
      out << spec.id << ": valid\n";
      return exit_code::ok;
    }
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const ScriptError &e) {
    err << "script error: " << e.what() << "\n";
    return exit_code::script;
  }
  return execute(spec, true, out, err);
}

} // namespace randwork
