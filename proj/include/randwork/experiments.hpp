// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "randwork/constructions.hpp"
#include "randwork/derivative.hpp"
#include "randwork/desk.hpp"
#include "randwork/errors.hpp"
#include "randwork/machines.hpp"
#include "randwork/martingale.hpp"
#include "randwork/metric.hpp"
#include "randwork/numeric.hpp"
#include "randwork/pi_class.hpp"
#include "randwork/random_tests.hpp"
#include "randwork/run_log.hpp"
#include "randwork/triviality.hpp"

namespace randwork {

// A fully serializable request for one registered pipeline.
struct ExperimentSpec {
  std::string id;
  std::optional<Stage> stages;               // falls back to the experiment's default
  std::map<std::string, std::string> params; // typed by the experiment's declaration
  std::string script;                        // JSON script text; empty selects the built-in fixture
  std::uint64_t seed = 1;                    // only feeds scripted-input generation
  std::string out_dir;
};

enum class ParamKind { integer, rational, text };

struct ParamInfo {
  std::string name;
  ParamKind kind;
  std::string default_value;
  std::string description;
};

// Typed view of a spec's parameters against one experiment's declaration.
class ParamReader {
public:
  ParamReader(const std::vector<ParamInfo> &declared, const std::map<std::string, std::string> &given) {
    for (const auto &p : declared)
      values_[p.name] = p.default_value;
    for (const auto &[k, v] : given) {
      if (!values_.count(k))
        throw UsageError("unknown parameter '" + k + "'");
      values_[k] = v;
    }
  }

  const std::string &text(const std::string &name) const { return values_.at(name); }

  long integer(const std::string &name) const {
    const std::string &v = text(name);
    try {
      std::size_t used = 0;
      const long out = std::stol(v, &used);
      if (used != v.size())
        throw std::invalid_argument(v);
      return out;
    } catch (const std::exception &) {
      throw UsageError("parameter '" + name + "' expects an integer, got '" + v + "'");
    }
  }

  std::size_t count(const std::string &name) const {
    const long v = integer(name);
    if (v < 0)
      throw UsageError("parameter '" + name + "' must be nonnegative");
    return static_cast<std::size_t>(v);
  }

  Rational rational(const std::string &name) const {
    try {
      return parse_rational(text(name));
    } catch (const std::exception &) {
      throw UsageError("parameter '" + name + "' expects a rational, got '" + text(name) + "'");
    }
  }

  bool flag(const std::string &name) const {
    const std::string &v = text(name);
    if (v == "true" || v == "1")
      return true;
    if (v == "false" || v == "0")
      return false;
    throw UsageError("parameter '" + name + "' expects true or false, got '" + v + "'");
  }

  const std::map<std::string, std::string> &values() const noexcept { return values_; }

private:
  std::map<std::string, std::string> values_;
};

struct ExperimentContext {
  const ExperimentSpec &spec;
  Stage stages;
  ParamReader params;
};

struct ExperimentInfo {
  std::string id;
  std::string module;
  std::string description;
  Stage default_stages;
  std::vector<ParamInfo> params;
  bool uses_script = false;
  bool uses_seed = false;
  std::function<ConstructionRun(const ExperimentContext &)> run;
};

namespace detail {

inline Json parse_script(const std::string &text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception &e) {
    throw ScriptError(std::string("script is not valid JSON: ") + e.what());
  }
}

inline std::string rational_json(const Rational &q) { return to_string(q); }

// Every reserved machine with its coding constant.
inline void record_machine_constants(ConstructionRun &run, const UniversalMachine &u) {
  Json table = Json::object();
  for (std::size_t id = 0; id < u.machine_count(); ++id)
    table[u.machine(id).name()] = u.machine(id).reserved_constant();
  run.constants()["machines"] = std::move(table);
}

// ------------------------------------------------------------- machines

inline ConstructionRun kraft_omega_audit(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "machines", cx.stages);
  UniversalMachine u(cx.params.count("max_input_length"));
  DeskOptions opt;
  opt.max_input_length = u.max_input_length();
  install_desk_machines(u, opt);
  run.check(0, "registered_machines", u.machine_count() >= 5,
            std::to_string(u.machine_count()) + " machines registered");
  std::set<std::string> domain;
  Rational kraft = 0, previous = 0;
  for (Stage s = 1; s <= cx.stages; ++s) {
    const StageSnapshot snap = u.run_stage();
    bool prefix_free = true;
    for (const auto &h : snap.new_halts) {
      const std::string in = h.input.str();
      for (std::size_t k = 0; k <= in.size() && prefix_free; ++k)
        prefix_free = !domain.count(in.substr(0, k));
      auto it = domain.lower_bound(in);
      if (prefix_free && it != domain.end() && it->compare(0, in.size(), in) == 0)
        prefix_free = false;
      domain.insert(in);
      kraft += pow2(-static_cast<long>(h.input.size()));
    }
    run.check(s, "domain_prefix_free", prefix_free);
    run.check(s, "kraft_at_most_one", kraft <= 1, to_string(kraft));
    run.check(s, "omega_equals_domain_weight", kraft == snap.omega, to_string(snap.omega));
    run.check(s, "omega_nondecreasing", snap.omega >= previous);
    if (!snap.new_halts.empty())
      run.log(s, "stage", Json{{"new_halts", snap.new_halts.size()}, {"omega", rational_json(snap.omega)}});
    previous = snap.omega;
  }
  record_machine_constants(run, u);
  run.final_state() = Json{{"domain_size", domain.size()}, {"omega", rational_json(u.omega())}};
  return run;
}

inline ConstructionRun solovay_function_audit(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "machines", cx.stages);
  const std::string registry = cx.params.text("registry");
  if (registry != "desk" && registry != "empty")
    throw UsageError("registry must be desk or empty");
  UniversalMachine u;
  std::optional<std::size_t> aux;
  if (registry == "desk")
    aux = install_desk_machines(u).solovay;
  u.run_until(cx.stages);
  const Stage s = cx.stages;
  const std::size_t r_max = cx.params.count("r_max");
  const std::size_t c_m = aux ? u.machine(*aux).reserved_constant() : 0;
  std::optional<long> measured;
  std::size_t finite = 0;
  for (std::size_t r = 0; r <= r_max; ++r) {
    const Natural rn(static_cast<unsigned long>(r));
    const Complexity k = u.K_at(rn, s);
    if (!k)
      continue;
    ++finite;
    const Natural h = solovay_h(u, rn);
    run.check(s, "complexity_below_h", Natural(static_cast<unsigned long>(*k)) <= h + c_m,
              "r = " + std::to_string(r));
    if (h.fits_ulong_p()) {
      const long gap = static_cast<long>(*k) - static_cast<long>(h.get_ui());
      if (!measured || gap > *measured)
        measured = gap;
    }
  }
  // Equality pattern: r = <sigma, n, t> with sigma a shortest description of n has h(r) = K(n).
  std::size_t pattern = 0, settled = 0;
  for (const Natural &n : u.described_words()) {
    const Halting *d = u.shortest_description(n);
    const Complexity kn = u.K_at(n, s);
    if (!d || !kn)
      continue;
    const Natural r = triple(code_of(d->input), n, Natural(static_cast<unsigned long>(d->stage)));
    if (solovay_h(u, r) == Natural(static_cast<unsigned long>(*kn)))
      ++pattern;
    // The auxiliary copy of d exists once its own universal input fits under the cap, and
    // it is visible from stage max(aux + 1, |input| + 1, halt + 1).
    const bool copied = aux && d->input.size() + *aux + 1 <= u.max_input_length();
    if (copied && std::max<Stage>({*aux + 1, d->input.size() + 1, d->stage + 1}) <= s) {
      ++settled;
      const Complexity kr = u.K_at(r, s);
      run.check(s, "pattern_compressible", kr && *kr <= *kn + c_m, "n = " + n.get_str());
    }
  }
  if (finite == 0)
    run.log(s, "vacuous", Json{{"reason", "no finite complexity values"}});
  else
    run.check(s, "equality_pattern_count", pattern >= cx.params.count("min_pattern"), std::to_string(pattern));
  run.log(s, "audit", Json{{"finite", finite}, {"pattern", pattern}, {"settled_patterns", settled}});
  record_machine_constants(run, u);
  if (aux)
    run.constants()["c_M"] = c_m;
  run.constants()["measured_gap"] = measured ? Json(*measured) : Json(nullptr);
  run.final_state() = Json{{"registry", registry}, {"finite_values", finite}, {"pattern_count", pattern}};
  return run;
}

// ----------------------------------------------------------- martingales

inline void audit_martingale(ConstructionRun &run, Stage s, const std::string &name, const Martingale &m) {
  const auto unfair = m.fairness_violations();
  const auto negative = m.negative_nodes();
  run.check(s, "fairness", unfair.empty(), unfair.empty() ? name : name + " at '" + unfair.front().str() + "'");
  run.check(s, "nonnegative", negative.empty(),
            negative.empty() ? name : name + " at '" + negative.front().str() + "'");
  run.log(s, "martingale", Json{{"name", name}, {"nodes", m.values().size()}, {"doublings", m.doublings().size()}});
}

// Slope 3 on the left half and 0 on the right half: the first bet doubles on "0".
inline FunctionOracle case_one_fixture() {
  return piecewise_linear({{Rational(0), Rational(0)}, {Rational(1, 2), Rational(3, 2)}, {Rational(1), Rational(3, 2)}},
                          "case-one");
}

inline ConstructionRun martingale_suite(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "martingale", cx.stages);
  const std::size_t depth = cx.params.count("depth");
  const unsigned long precision = cx.params.count("precision");
  const Rational shift(1, 3);
  struct Fixture {
    std::string name;
    FunctionOracle f;
  };
  const std::vector<Fixture> fixtures{{"identity", identity_function()},
                                      {"square", square_function()},
                                      {"bent", piecewise_linear({{Rational(0), Rational(0)},
                                                                 {Rational(1, 3), Rational(1, 9)},
                                                                 {Rational(1), Rational(1)}},
                                                                "bent")},
                                      {"case-one", case_one_fixture()}};
  Stage s = 0;
  for (const auto &fx : fixtures) {
    const Martingale plain = slope_martingale_table(fx.f, 0, depth, precision);
    audit_martingale(run, s, fx.name + "/slope", plain);
    audit_martingale(run, s, fx.name + "/shifted", slope_martingale_table(fx.f, shift, depth, precision));
    if (fx.name == "identity") {
      const bool constant = std::all_of(plain.values().begin(), plain.values().end(),
                                        [](const auto &kv) { return kv.second == 1; });
      run.check(s, "identity_slope_constant_one", constant);
    }
    ++s;
  }
  const DebtFreeResult converted = debt_free_convert(case_one_fixture(), BitString(), depth);
  audit_martingale(run, s, "case-one/debt-free", converted.martingale);
  run.check(s, "case_one_doubles_once", converted.martingale.doublings().size() == 1,
            std::to_string(converted.martingale.doublings().size()) + " doublings");
  const CapitalTrace trace = capital_trace(converted.martingale, BitString("0"));
  run.check(s, "case_one_trace", trace.values.size() == 2 && trace.doublings == 1 &&
                                     trace.values[1].second == 2 * trace.values[0].second);
  run.log(s, "debt-free", Json{{"case1", converted.case1_count}, {"case2", converted.case2_count}});
  run.final_state() = Json{{"depth", depth}, {"fixtures", fixtures.size()}};
  return run;
}

inline ConstructionRun denjoy_martingale(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "derivative", cx.stages);
  const std::size_t count = cx.params.count("scales");
  std::vector<Rational> scales;
  for (std::size_t k = 1; k <= count; ++k)
    scales.push_back(pow2(-static_cast<long>(k)));
  struct Probe {
    std::string name;
    FunctionOracle f;
    Rational z;
    DenjoyTrend expected;
  };
  const std::vector<Probe> probes{
      {"identity", identity_function(), Rational(1, 3), DenjoyTrend::converging},
      {"square", square_function(), Rational(1, 3), DenjoyTrend::converging},
      {"oscillator", oscillator_function(Rational(1, 2), static_cast<unsigned>(count + DenjoyConfig{}.extra_resolution + 2)),
       Rational(1, 2),
       DenjoyTrend::two_sided_diverging}};
  Stage s = 0;
  for (const auto &p : probes) {
    const DenjoyReport rep = denjoy_probe(p.f, p.z, scales);
    Json windows = Json::array();
    for (std::size_t k = 0; k < rep.bounds.size(); ++k)
      windows.push_back(Json{{"scale", rational_json(rep.scales[k])},
                             {"grid", rep.resolutions[k]},
                             {"lo", rational_json(rep.bounds[k].lo)},
                             {"hi", rational_json(rep.bounds[k].hi)}});
    run.log(s, "probe", Json{{"function", p.name}, {"z", rational_json(p.z)}, {"trend", to_string(rep.trend)},
                             {"estimate", rational_json(rep.estimate)}, {"windows", std::move(windows)}});
    run.check(s, "expected_trend", rep.trend == p.expected, p.name + " gave " + to_string(rep.trend));
    for (const auto &b : rep.bounds)
      run.check(s, "window_ordered", b.lo <= b.hi, p.name);
    ++s;
  }
  const DebtFreeResult converted = debt_free_convert(case_one_fixture(), BitString(), cx.params.count("depth"));
  audit_martingale(run, s, "case-one/debt-free", converted.martingale);
  const CapitalTrace trace = capital_trace(converted.martingale, BitString("0"));
  run.log(s, "capital-trace", Json{{"path", "0"},
                                   {"doublings", trace.doublings},
                                   {"maximum", rational_json(trace.maximum)},
                                   {"oscillation", rational_json(trace.oscillation)}});
  run.final_state() = Json{{"probes", probes.size()}, {"scales", count}};
  return run;
}

// --------------------------------------------------------- random tests

// Nondecreasing staircases with total rise at most 1, drawn from the seed.
inline std::vector<std::vector<std::tuple<Rational, Rational, Rational>>> random_staircases(std::size_t count,
                                                                                           std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::vector<std::tuple<Rational, Rational, Rational>>> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t steps = 1 + gen() % 4;
    std::vector<unsigned long> weights;
    unsigned long total = 0;
    for (std::size_t k = 0; k < steps; ++k) {
      weights.push_back(1 + gen() % 8);
      total += weights.back();
    }
    const Rational rise(static_cast<long>(1 + gen() % 16), 16);
    std::vector<std::tuple<Rational, Rational, Rational>> stair;
    for (std::size_t k = 0; k < steps; ++k) {
      const Rational width(static_cast<long>(1 + gen() % 64), 1024);
      const Rational left(static_cast<long>(gen() % 960), 1024);
      stair.emplace_back(left, width, rise * Rational(static_cast<long>(weights[k]), static_cast<long>(total)));
    }
    out.push_back(std::move(stair));
  }
  return out;
}

inline ConstructionRun bv_test(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "tests", cx.stages);
  const std::size_t count = cx.params.count("functions");
  const long r_max = cx.params.integer("r_max");
  const std::size_t n_max = cx.params.count("n_max");
  const auto stairs = random_staircases(count, cx.spec.seed);
  for (std::size_t i = 0; i < stairs.size(); ++i) {
    const FunctionOracle f = staircase_function(stairs[i], "staircase-" + std::to_string(i));
    for (long r = 0; r <= r_max; ++r) {
      const BVTestResult t = bv_ml_test(f, r, n_max);
      run.check(static_cast<Stage>(i), "measure_bound", t.measure <= pow2(-r),
                f.name + " r = " + std::to_string(r) + " measure " + to_string(t.measure));
      run.log(static_cast<Stage>(i), "level",
              Json{{"function", f.name}, {"r", r}, {"generators", t.generators.size()},
                   {"measure", rational_json(t.measure)}, {"variation", rational_json(t.sampled_variation)}});
    }
  }
  run.final_state() = Json{{"functions", count}, {"seed", cx.spec.seed}};
  return run;
}

// Five closed sets with staged removals.
inline std::vector<PiClass> porosity_fixtures() {
  std::vector<PiClass> out;
  out.emplace_back("whole-interval");
  out.push_back(middle_thirds_class(5));
  PiClass cylinders("cylinders");
  cylinders.remove_cylinder(BitString("01"), 0).remove_cylinder(BitString("101"), 1).remove_cylinder(
      BitString("1101"), 2);
  cylinders.remove_cylinder(BitString("00110"), 3);
  out.push_back(std::move(cylinders));
  PiClass dyadic("dyadic-holes");
  for (long k = 0; k < 8; ++k)
    dyadic.remove_interval(Rational(4 * k + 1, 32), Rational(4 * k + 3, 32), static_cast<std::size_t>(k));
  out.push_back(std::move(dyadic));
  PiClass split("zero-and-right-half");
  split.remove_interval(Rational(0), Rational(1, 2), 0);
  out.push_back(std::move(split));
  return out;
}

inline ConstructionRun porosity_test(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "tests", cx.stages);
  const std::size_t c = cx.params.count("c");
  const std::size_t n_max = cx.params.count("n_max");
  const std::size_t max_length = cx.params.count("max_length");
  for (const PiClass &C : porosity_fixtures()) {
    const Stage last = std::min<Stage>(cx.stages, C.final_stage() + 1);
    std::optional<PorosityRun> previous;
    for (Stage t = 0; t <= last; ++t) {
      PorosityRun pr = porosity_levels(C, c, n_max, t, max_length);
      run.check(t, "node_bound", pr.node_violations.empty(),
                pr.node_violations.empty() ? C.name() : C.name() + " at '" + pr.node_violations.front().sigma.str() + "'");
      run.check(t, "level_bound", pr.level_violations.empty(), C.name());
      for (std::size_t n = 0; n < pr.levels.size(); ++n) {
        const Rational brute = brute_force_class_measure(C, pr.levels[n].antichain, t, max_length);
        run.check(t, "brute_force_agrees", brute == pr.levels[n].class_measure,
                  C.name() + " n = " + std::to_string(n));
      }
      if (previous)
        run.check(t, "nested_union", nested_union_holds(*previous, pr), C.name());
      run.log(t, "levels", Json{{"class", C.name()},
                                {"generators", pr.levels.back().antichain.size()},
                                {"measure", rational_json(pr.levels.back().class_measure)},
                                {"bound", rational_json(pr.levels.back().bound)}});
      previous = std::move(pr);
    }
  }
  run.final_state() = Json{{"classes", porosity_fixtures().size()}, {"c", c}, {"n_max", n_max}};
  return run;
}

inline ConstructionRun omega_difference(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "tests", cx.stages);
  const std::size_t n_max = cx.params.count("n_max");
  const long inject = cx.params.integer("inject_violation_stage");
  UniversalMachine u;
  install_desk_machines(u);
  u.run_until(cx.stages);
  for (Stage s = 0; s <= cx.stages; ++s) {
    if (s > 0 && u.omega_at(s) == u.omega_at(s - 1) && static_cast<long>(s) != inject)
      continue;
    Json measures = Json::array();
    for (std::size_t n = 0; n <= n_max; ++n) {
      OmegaDifferenceProbe p = difference_test_omega(u, n, s);
      if (static_cast<long>(s) == inject && n == n_max)
        p.measure += pow2(1 - static_cast<long>(n)); // fault-injection fixture
      run.check(s, "measure_bound", p.measure <= pow2(-static_cast<long>(n)),
                "n = " + std::to_string(n) + " measure " + to_string(p.measure));
      const bool tie = p.index && Rational(*p.index + 1) * pow2(-static_cast<long>(n)) == p.alpha;
      run.check(s, "omega_inside", p.omega_inside,
                "n = " + std::to_string(n) + (tie ? " (Omega_s is the right endpoint of U_n)" : ""));
      measures.push_back(rational_json(p.measure));
    }
    run.log(s, "probe", Json{{"omega", rational_json(u.omega_at(s))}, {"measures", std::move(measures)}});
  }
  record_machine_constants(run, u);
  run.final_state() = Json{{"omega", rational_json(u.omega())}, {"n_max", n_max}};
  return run;
}

inline ConstructionRun omega_cost_ledger(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "tests", cx.stages);
  UniversalMachine u;
  install_desk_machines(u);
  u.run_until(cx.stages);
  const SolovayTestLedger led = omega_change_test(u);
  for (const auto &iv : led.intervals) {
    run.check(iv.stage, "interval_contains_omega", iv.contains_omega, "position " + std::to_string(iv.position));
    run.log(iv.stage, "interval", Json{{"position", iv.position},
                                       {"left", rational_json(iv.left)},
                                       {"right", rational_json(iv.right)},
                                       {"later_hits", iv.later_hits}});
  }
  for (const auto &[i, flips] : led.flips)
    run.check(cx.stages, "position_weight",
              led.position_weight.at(i) == Rational(static_cast<long>(flips)) * pow2(-static_cast<long>(i) - 1),
              "position " + std::to_string(i));
  record_machine_constants(run, u);
  run.final_state() = Json{{"intervals", led.intervals.size()}, {"total_weight", rational_json(led.total_weight)}};
  return run;
}

// ---------------------------------------------------------- constructions

inline ConstructionRun weakly_ktrivial(const ExperimentContext &cx) {
  const std::size_t tracked = cx.params.count("tracked");
  if (!cx.spec.script.empty())
    return build_weakly_ktrivial(scripted_descriptions_from_json(parse_script(cx.spec.script)), cx.stages, tracked)
        .run;
  UniversalMachine u;
  install_desk_machines(u);
  ConstructionRun run = build_weakly_ktrivial(u, cx.stages, tracked).run;
  Json built = run.constants();
  record_machine_constants(run, u);
  run.constants().update(built);
  return run;
}

inline ConstructionRun wtt_chain(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "constructions", cx.stages);
  const BitString oracle(cx.params.text("oracle"));
  const std::size_t k_max = cx.params.count("k_max");
  const WttChain chain = build_wtt_weakly_ktrivial(oracle, k_max);
  for (std::size_t k = 0; k < chain.steps.size(); ++k) {
    const auto &st = chain.steps[k];
    run.log(static_cast<Stage>(k), "add", Json{{"element", natural_json(st.added)}, {"bit", st.bit}});
  }
  const BitString recovered = recover_oracle(chain);
  run.check(static_cast<Stage>(chain.steps.size()), "oracle_recovered", recovered == oracle.prefix(recovered.size()),
            recovered.str());
  run.check(static_cast<Stage>(chain.steps.size()), "index_exceeds_max", chain.index_exceeds_max);
  run.final_state() = Json{{"oracle", oracle.str()}, {"recovered", recovered.str()}, {"steps", chain.steps.size()}};
  return run;
}

inline const char *default_jump_script() {
  return R"({"rules": [
    {"functional": 0, "oracle": "1011", "input": 7, "output": "3", "stage": 2},
    {"functional": 0, "oracle": "0110", "input": 7, "output": "5", "stage": 40},
    {"functional": 1, "oracle": "10110", "input": 9, "output": "1", "stage": 5},
    {"functional": 1, "oracle": "011011", "input": 12, "output": "4", "stage": 120},
    {"functional": 2, "oracle": "", "input": 15, "output": "2", "stage": 9},
    {"functional": 2, "oracle": "10110100", "input": 20, "output": "6", "stage": 300}
  ]})";
}

inline ConstructionRun jump_traceable_tree(const ExperimentContext &cx) {
  const Json script = parse_script(cx.spec.script.empty() ? default_jump_script() : cx.spec.script);
  auto r = build_jump_traceable_tree(cx.params.rational("eps"), functional_rules_from_json(script), cx.stages,
                                     cx.params.count("depth"));
  return std::move(r.run);
}

inline ConstructionRun ktrivial_point_trees(const ExperimentContext &cx) {
  const SpacePtr space = space_by_name(cx.params.text("space"));
  UniversalMachine u;
  if (cx.params.text("registry") == "desk") {
    install_desk_machines(u);
  } else if (cx.params.text("registry") == "tree-labels") {
    const std::size_t id = u.reserve_machine("tree-labels");
    u.add_feeder(id, [id](UniversalMachine &m, Stage s) {
      const unsigned long n = s - 1;
      const BitString base = prefix_code(Natural(n));
      if (base.size() + 1 > m.max_input_length())
        return;
      for (bool r : {false, true})
        m.add_entry(id, base.child(r), pair(tree_point(n, r), Natural(n)), s);
    });
  } else {
    throw UsageError("registry must be desk or tree-labels");
  }
  PointTreeConfig cfg;
  cfg.b = cx.params.count("b");
  cfg.n_star = cx.params.count("n_star");
  cfg.p_tilde = Natural(cx.params.text("p_tilde"));
  cfg.stages = cx.stages;
  ConstructionRun run = build_ktrivial_point_trees(u, space, cfg).run;
  Json built = run.constants();
  record_machine_constants(run, u);
  run.constants().update(built);
  return run;
}

inline const char *default_blr_script() {
  return R"({"r_requirements": 3,
    "convergences": [
      {"e": 0, "n": 1, "stage": 2, "value": 1},
      {"e": 1, "n": 2, "stage": 4, "value": 2},
      {"e": 0, "n": 2, "stage": 6, "value": 1}
    ],
    "phi": [
      {"i": 0, "input": -1, "stage": 3, "value": 1},
      {"i": 2, "input": 0, "stage": 9, "value": 0}
    ],
    "gamma": [
      {"e": 0, "n": 1, "oracle": "", "from": 8, "value": 1},
      {"e": 1, "n": 2, "oracle": "0", "from": 11, "value": 1},
      {"e": 0, "n": 2, "oracle": "1", "from": 14, "value": 2}
    ]})";
}

inline ConstructionRun blr_class(const ExperimentContext &cx) {
  const Json script = parse_script(cx.spec.script.empty() ? default_blr_script() : cx.spec.script);
  auto r = build_blr_pi_class(blr_script_from_json(script), cx.stages);
  return std::move(r.run);
}

// ------------------------------------------------------------- triviality

inline CauchyName constant_unit_name(const Rational &x, std::size_t entries) {
  CauchyName out{unit_interval(), {}};
  for (std::size_t k = 0; k < entries; ++k)
    out.entries.push_back(unit_index(x));
  return out;
}

inline ConstructionRun triviality_suite(const ExperimentContext &cx) {
  ConstructionRun run(cx.spec.id, "triviality", cx.stages);
  const std::size_t b_max = cx.params.count("b_max");
  const unsigned long n_max = cx.params.count("n_max");
  const Stage every = std::max<std::size_t>(1, cx.params.count("probe_every"));
  UniversalMachine u;
  install_desk_machines(u);
  const std::size_t zeros = install_image_machine(u, "zero-prefixes", [](const Natural &n) -> std::optional<Natural> {
    if (n > 64)
      return std::nullopt;
    return encode_tuple(std::vector<Natural>(n.get_ui(), Natural(0)));
  });
  const CauchyName third = constant_unit_name(Rational(1, 3), 24);
  const CauchyName zero_seq = cantor_name(BitString::repeat(false, 24));
  const std::vector<Natural> zero_function(12, Natural(0));
  for (Stage s = every; s <= cx.stages; s += every) {
    u.run_until(s);
    const StageIndex index = stage_index(u, s);
    const CountBoundReport cb = count_bound_constant(u, 0, n_max, s);
    run.log(s, "count-constant", Json{{"c0", cb.constant ? Json(*cb.constant) : Json(nullptr)}});
    if (cb.constant)
      for (unsigned long n = 0; n <= n_max; ++n)
        for (std::size_t b = 0; b <= b_max; ++b) {
          const Rational cap = pow2(static_cast<long>(b) + *cb.constant);
          const std::size_t count = count_compressible(u, Natural(n), b, s, 4096);
          run.check(s, "count_bound", Rational(static_cast<long>(count)) <= cap,
                    "n = " + std::to_string(n) + " b = " + std::to_string(b) + " count " + std::to_string(count));
          const LocalWitnessReport w = locally_ktrivial_witness(u, third, n, b, s, ScaleMode::dyadic, &index);
          run.check(s, "witness_candidates_bound", Rational(static_cast<long>(w.candidates)) <= cap);
        }
    for (std::size_t b = 0; b <= b_max; ++b)
      for (const SpacePtr &space : {unit_interval(), cantor_space()}) {
        const DescriptionTestReport d = description_ml_test(u, space, b, s);
        run.check(s, "description_weight", d.holds,
                  space->name() + " b = " + std::to_string(b) + " weight " + to_string(d.weight));
        run.check(s, "description_measure", d.measure <= d.weight, space->name());
        run.log(s, "description-test", Json{{"space", space->name()}, {"b", b}, {"balls", d.balls.size()},
                                            {"weight", rational_json(d.weight)}, {"bound", rational_json(d.bound)}});
      }
    const LipschitzReport id_rep =
        lipschitz_transfer_check(u, identity_map(unit_interval()), third, 1, n_max, s, 4096, b_max);
    const LipschitzReport ce_rep = lipschitz_transfer_check(u, cantor_embed_map(6), zero_seq, 1, n_max + 6, s, 4096);
    for (const auto &[name, rep] : {std::pair<std::string, const LipschitzReport &>{"identity", id_rep},
                                    std::pair<std::string, const LipschitzReport &>{"cantor-embed", ce_rep}})
      for (const auto &row : rep.rows) {
        run.check(s, "lipschitz_margin", row.status != "fail", name + " n = " + std::to_string(row.n));
        run.log(s, "lipschitz", Json{{"map", name}, {"n", row.n}, {"status", row.status},
                                     {"margin", row.margin ? Json(*row.margin) : Json(nullptr)}});
      }
    if (s >= 2) {
      const TrivialityReport zt = ktrivial_check(u, zero_function, zeros + 1, s, s - 1, "zero-function");
      run.check(s, "zero_function_trivial", zt.pass);
    }
    run.constants()["c0"] = cb.constant ? Json(*cb.constant) : Json(nullptr);
  }
  record_machine_constants(run, u);
  run.constants()["c_L"] = u.machine_count() + 1;
  run.final_state() = Json{{"omega", rational_json(u.omega())}, {"machines", u.machine_count()}};
  return run;
}

} // namespace detail

inline const std::vector<ExperimentInfo> &experiment_registry() {
  static const std::vector<ExperimentInfo> registry{
      {"kraft-omega-audit", "machines", "Kraft sum and halting probability of the desk registry, stage by stage",
       1000, {{"max_input_length", ParamKind::integer, "28", "longest machine input that runs"}}, false, false,
       detail::kraft_omega_audit},
      {"solovay-function-audit", "machines", "complexity against the Solovay function and its equality pattern", 5200,
       {{"r_max", ParamKind::integer, "5000", "largest argument audited"},
        {"min_pattern", ParamKind::integer, "10", "required number of equality-pattern witnesses"},
        {"registry", ParamKind::text, "desk", "desk or empty"}},
       false, false, detail::solovay_function_audit},
      {"martingale-suite", "martingale", "fairness and nonnegativity of slope and debt-free martingales", 1,
       {{"depth", ParamKind::integer, "12", "table depth"}, {"precision", ParamKind::integer, "8", "oracle precision offset"}}, false, false,
       detail::martingale_suite},
      {"denjoy-martingale", "derivative", "slope windows, trend diagnostics and the doubling martingale", 1,
       {{"scales", ParamKind::integer, "8", "number of dyadic scales probed"}, {"depth", ParamKind::integer, "12", "martingale depth"}}, false, false,
       detail::denjoy_martingale},
      {"bv-test", "tests", "measure of the steep-slope test for random staircases", 1,
       {{"functions", ParamKind::integer, "20", "number of staircases"}, {"r_max", ParamKind::integer, "8", "largest slope exponent"},
        {"n_max", ParamKind::integer, "12", "string length"}},
       false, true, detail::bv_test},
      {"porosity-test", "tests", "difference test built from porosity on five closed sets", 16,
       {{"c", ParamKind::integer, "2", "porosity constant"}, {"n_max", ParamKind::integer, "6", "deepest level"}, {"max_length", ParamKind::integer, "12", "search length"}},
       false, false, detail::porosity_test},
      {"omega-difference", "tests", "difference test capturing the halting probability", 500,
       {{"n_max", ParamKind::integer, "20", "deepest level"},
        {"inject_violation_stage", ParamKind::integer, "-1", "stage at which a measure violation is injected (testing only)"}},
       false, false, detail::omega_difference},
      {"omega-cost-ledger", "tests", "Solovay test enumerated from changes of the halting probability", 500, {},
       false, false, detail::omega_cost_ledger},
      {"weakly-ktrivial", "constructions", "weakly K-trivial set that is not K-trivial", 2000,
       {{"tracked", ParamKind::integer, "48", "markers tracked for the move bound"}}, true, false, detail::weakly_ktrivial},
      {"wtt-weakly-ktrivial", "constructions", "weakly K-trivial set coding an oracle by wtt reduction", 1,
       {{"oracle", ParamKind::text, "000", "oracle bits"}, {"k_max", ParamKind::integer, "2", "number of checkpoints"}}, false, false, detail::wtt_chain},
      {"jump-traceable-tree", "constructions", "perfect tree of reals with small jump traces", 1000,
       {{"eps", ParamKind::rational, "1", "exponent slack"}, {"depth", ParamKind::integer, "10", "explicit tree depth"}}, true, false,
       detail::jump_traceable_tree},
      {"ktrivial-point-trees", "constructions", "slow and thin trees of a locally K-trivial point", 500,
       {{"space", ParamKind::text, "tree", "metric space"},
        {"registry", ParamKind::text, "tree-labels", "desk or tree-labels"},
        {"b", ParamKind::integer, "6", "compression slack"},
        {"n_star", ParamKind::integer, "2", "root level"},
        {"p_tilde", ParamKind::text, "4", "root special point"}},
       false, false, detail::ktrivial_point_trees},
      {"blr-class", "constructions", "closed class whose members have bounded-size traces", 30, {}, true, false,
       detail::blr_class},
      {"triviality-suite", "triviality", "counting bound, description test and Lipschitz transfer", 400,
       {{"b_max", ParamKind::integer, "3", "largest slack"}, {"n_max", ParamKind::integer, "8", "deepest scale"}, {"probe_every", ParamKind::integer, "100", "probe spacing"}},
       false, false, detail::triviality_suite},
  };
  return registry;
}

inline const ExperimentInfo *find_experiment(const std::string &id) {
  for (const auto &e : experiment_registry())
    if (e.id == id)
      return &e;
  return nullptr;
}

// Checks the id and parameter types without running anything.
inline ParamReader validate_experiment(const ExperimentSpec &spec) {
  const ExperimentInfo *info = find_experiment(spec.id);
  if (!info)
    throw UsageError("unknown experiment '" + spec.id + "'");
  if (!spec.script.empty() && !info->uses_script)
    throw UsageError("experiment '" + spec.id + "' takes no script");
  ParamReader params(info->params, spec.params);
  for (const auto &p : info->params) {
    if (p.kind == ParamKind::integer)
      params.integer(p.name);
    else if (p.kind == ParamKind::rational)
      params.rational(p.name);
  }
  if (!spec.script.empty())
    detail::parse_script(spec.script);
  return params;
}

inline ConstructionRun run_experiment(const ExperimentSpec &spec) {
  ParamReader params = validate_experiment(spec);
  const ExperimentInfo &info = *find_experiment(spec.id);
  const ExperimentContext cx{spec, spec.stages.value_or(info.default_stages), std::move(params)};
  return info.run(cx);
}

// ---------------------------------------------------------------- artifacts

struct Artifacts {
  std::string events;
  std::string summary;
  std::string state;
};

inline std::string csv_field(const std::string &text) {
  if (text.find_first_of(",\"\n") == std::string::npos)
    return text;
  std::string out = "\"";
  for (char ch : text)
    out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline Json stage_statistics(const ConstructionRun &run) {
  Json ops = Json::object();
  std::map<std::string, std::size_t> counts;
  Stage first = 0, last = 0;
  bool any = false;
  for (const auto &e : run.events()) {
    ++counts[e.op];
    first = any ? std::min(first, e.stage) : e.stage;
    last = any ? std::max(last, e.stage) : e.stage;
    any = true;
  }
  for (const auto &[op, n] : counts)
    ops[op] = n;
  return Json{{"events", run.events().size()}, {"first_stage", first}, {"last_stage", last}, {"ops", std::move(ops)}};
}

inline Artifacts render_artifacts(const ExperimentSpec &spec, const ConstructionRun &run) {
  Artifacts out;
  out.events = run.events_jsonl();
  std::ostringstream csv;
  csv << "invariant,checked,failed,first_failure_stage,status,detail\n";
  for (const auto &[name, t] : run.invariants())
    csv << csv_field(name) << "," << t.checked << "," << t.failed << ","
        << (t.first_failure ? std::to_string(*t.first_failure) : std::string()) << ","
        << (t.failed == 0 ? "pass" : "fail") << "," << csv_field(t.first_detail) << "\n";
  out.summary = csv.str();
  const ExperimentInfo *info = find_experiment(spec.id);
  Json params = Json::object();
  if (info) {
    const ParamReader reader(info->params, spec.params);
    for (const auto &[k, v] : reader.values())
      params[k] = v;
  }
  Json state{{"id", spec.id},
             {"module", run.module()},
             {"stages", run.horizon()},
             {"seed", spec.seed},
             {"params", std::move(params)},
             {"scripted", !spec.script.empty()},
             {"passed", run.all_passed()},
             {"constants", run.constants()},
             {"invariants", run.invariants_json()},
             {"statistics", stage_statistics(run)},
             {"final_state", run.final_state()}};
  out.state = state.dump(2) + "\n";
  return out;
}

inline void write_artifacts(const std::filesystem::path &dir, const Artifacts &a) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char *name, const std::string &text) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os)
      throw Error("cannot write " + (dir / name).string());
    os << text;
  };
  put("events.jsonl", a.events);
  put("summary.csv", a.summary);
  put("state.json", a.state);
}

// 1-based line of the first invariant violation in events.jsonl.
inline std::optional<std::size_t> first_violation_line(const ConstructionRun &run) {
  for (std::size_t i = 0; i < run.events().size(); ++i)
    if (run.events()[i].op == "invariant-violation")
      return i + 1;
  return std::nullopt;
}

} // namespace randwork
