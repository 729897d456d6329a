#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "holpower/model.hpp"
#include "holpower/policies.hpp"

namespace holpower {

using ordered_json = nlohmann::ordered_json;

/// Config error carrying the path of the offending field.
struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct SimSettings {
  long replications = 1000;
  std::uint64_t base_seed = 1;
  long max_slots = 0;  ///< 0 picks the default cap of 100 * B * D
  std::optional<int> initial_interference;  ///< 0-based; empty means stationary draw
};

struct SweepSettings {
  std::string parameter;  ///< "K" | "alpha" | "Cd"
  std::vector<double> values;
};

/// One experiment: a system, a controller, simulation settings and an
/// optional one-parameter sweep.
struct Scenario {
  std::string name;
  SystemSpec spec;
  PolicyConfig policy;
  SimSettings sim;
  std::optional<SweepSettings> sweep;
};

namespace cfg {

inline const ordered_json& require(const ordered_json& j, const char* key,
                                   const std::string& path) {
  if (!j.is_object()) throw ScenarioError("expected an object at " + path);
  auto it = j.find(key);
  if (it == j.end()) throw ScenarioError("missing field " + path + "." + key);
  return *it;
}

inline double as_number(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError("expected a number at " + path);
  return j.get<double>();
}

inline long as_integer(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ScenarioError("expected an integer at " + path);
  return j.get<long>();
}

inline std::string as_string(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) throw ScenarioError("expected a string at " + path);
  return j.get<std::string>();
}

inline std::vector<double> as_number_array(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) throw ScenarioError("expected an array at " + path);
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back(as_number(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

inline CostCurve parse_cost_curve(const ordered_json& j, const std::string& path) {
  CostCurve c;
  const std::string kind = as_string(require(j, "kind", path), path + ".kind");
  if (kind == "linear") {
    c.form = CostForm::linear;
    c.slope = as_number(require(j, "slope", path), path + ".slope");
  } else if (kind == "table") {
    c.form = CostForm::table;
    c.values = as_number_array(require(j, "values", path), path + ".values");
  } else {
    throw ScenarioError("unknown cost kind '" + kind + "' at " + path + ".kind");
  }
  return c;
}

inline SuccessFunction parse_success(const ordered_json& j, const std::string& path) {
  SuccessFunction s;
  const std::string family = as_string(require(j, "family", path), path + ".family");
  if (family == "ratio") {
    s.family = SuccessFamily::ratio;
  } else if (family == "exponential") {
    s.family = SuccessFamily::exponential;
    s.scale = as_number(require(j, "scale", path), path + ".scale");
  } else if (family == "sigmoidal") {
    s.family = SuccessFamily::sigmoidal;
    s.beta0 = as_number(require(j, "beta0", path), path + ".beta0");
    s.beta1 = as_number(require(j, "beta1", path), path + ".beta1");
    s.beta2 = as_number(require(j, "beta2", path), path + ".beta2");
  } else {
    throw ScenarioError("unknown success family '" + family + "' at " + path + ".family");
  }
  return s;
}

}  // namespace cfg

inline void validate_scenario(const Scenario& sc);

inline Scenario parse_scenario(const ordered_json& j) {
  Scenario sc;
  sc.name = cfg::as_string(cfg::require(j, "name", "$"), "$.name");

  const auto& js = cfg::require(j, "spec", "$");
  sc.spec.B = cfg::as_integer(cfg::require(js, "B", "$.spec"), "$.spec.B");
  sc.spec.D = static_cast<int>(cfg::as_integer(cfg::require(js, "D", "$.spec"), "$.spec.D"));
  sc.spec.powers.levels =
      cfg::as_number_array(cfg::require(js, "powers", "$.spec"), "$.spec.powers");

  const auto& jc = cfg::require(js, "costs", "$.spec");
  sc.spec.costs.power_cost =
      cfg::parse_cost_curve(cfg::require(jc, "power", "$.spec.costs"), "$.spec.costs.power");
  sc.spec.costs.backlog_cost =
      cfg::parse_cost_curve(cfg::require(jc, "backlog", "$.spec.costs"), "$.spec.costs.backlog");
  sc.spec.costs.drop_cost =
      cfg::as_number(cfg::require(jc, "drop", "$.spec.costs"), "$.spec.costs.drop");

  sc.spec.success =
      cfg::parse_success(cfg::require(js, "success", "$.spec"), "$.spec.success");

  const auto& ji = cfg::require(js, "interference", "$.spec");
  sc.spec.interference.levels =
      cfg::as_number_array(cfg::require(ji, "levels", "$.spec.interference"),
                           "$.spec.interference.levels");
  const auto& jt = cfg::require(ji, "transition", "$.spec.interference");
  if (!jt.is_array())
    throw ScenarioError("expected an array at $.spec.interference.transition");
  sc.spec.interference.transition.clear();
  for (std::size_t r = 0; r < jt.size(); ++r)
    sc.spec.interference.transition.push_back(cfg::as_number_array(
        jt[r], "$.spec.interference.transition[" + std::to_string(r) + "]"));
  sc.spec.interference.subslots_per_slot = static_cast<int>(
      cfg::as_integer(cfg::require(ji, "subslots_per_slot", "$.spec.interference"),
                      "$.spec.interference.subslots_per_slot"));

  sc.spec.arrival_prob =
      cfg::as_number(cfg::require(js, "arrival_prob", "$.spec"), "$.spec.arrival_prob");

  const auto& jp = cfg::require(j, "policy", "$");
  sc.policy.kind = cfg::as_string(cfg::require(jp, "kind", "$.policy"), "$.policy.kind");
  if (jp.contains("alpha")) sc.policy.alpha = cfg::as_number(jp["alpha"], "$.policy.alpha");
  if (jp.contains("k_slope"))
    sc.policy.k_slope = cfg::as_number(jp["k_slope"], "$.policy.k_slope");
  if (jp.contains("i_ref")) sc.policy.i_ref = cfg::as_number(jp["i_ref"], "$.policy.i_ref");
  if (jp.contains("p_change"))
    sc.policy.p_change = cfg::as_number(jp["p_change"], "$.policy.p_change");

  const auto& jm = cfg::require(j, "sim", "$");
  sc.sim.replications =
      cfg::as_integer(cfg::require(jm, "replications", "$.sim"), "$.sim.replications");
  sc.sim.base_seed = static_cast<std::uint64_t>(
      cfg::as_integer(cfg::require(jm, "base_seed", "$.sim"), "$.sim.base_seed"));
  sc.sim.max_slots = cfg::as_integer(cfg::require(jm, "max_slots", "$.sim"), "$.sim.max_slots");
  const auto& jinit = cfg::require(jm, "initial_interference", "$.sim");
  if (jinit.is_string()) {
    if (jinit.get<std::string>() != "stationary")
      throw ScenarioError(
          "$.sim.initial_interference must be \"stationary\" or a 1-based state index");
    sc.sim.initial_interference.reset();
  } else {
    const long one_based = cfg::as_integer(jinit, "$.sim.initial_interference");
    sc.sim.initial_interference = static_cast<int>(one_based - 1);
  }

  if (j.contains("sweep") && !j["sweep"].is_null()) {
    const auto& jw = j["sweep"];
    SweepSettings sw;
    sw.parameter = cfg::as_string(cfg::require(jw, "parameter", "$.sweep"), "$.sweep.parameter");
    sw.values = cfg::as_number_array(cfg::require(jw, "values", "$.sweep"), "$.sweep.values");
    sc.sweep = std::move(sw);
  }

  validate_scenario(sc);
  return sc;
}

inline void validate_scenario(const Scenario& sc) {
  sc.spec.validate();
  if (sc.sim.replications < 1) throw ScenarioError("$.sim.replications must be at least 1");
  if (sc.sim.max_slots < 0) throw ScenarioError("$.sim.max_slots must be non-negative");
  if (sc.sim.initial_interference &&
      (*sc.sim.initial_interference < 0 ||
       *sc.sim.initial_interference >= static_cast<int>(sc.spec.interference.size())))
    throw ScenarioError("$.sim.initial_interference is outside the chain's state range");
  static const std::vector<std::string> kinds = {"min", "max", "table", "avg", "slbpc1", "slbpc2"};
  if (std::find(kinds.begin(), kinds.end(), sc.policy.kind) == kinds.end())
    throw ScenarioError("unknown policy kind '" + sc.policy.kind + "' at $.policy.kind");
  if (sc.policy.alpha < 0.0 || sc.policy.alpha > 1.0)
    throw ScenarioError("$.policy.alpha must lie in [0, 1]");
  if (sc.sweep) {
    if (sc.sweep->values.empty()) throw ScenarioError("$.sweep.values must be non-empty");
    const std::string& p = sc.sweep->parameter;
    if (p == "K") {
      if (sc.spec.costs.power_cost.form != CostForm::linear)
        throw ScenarioError("sweeping K requires a linear power cost");
    } else if (p == "alpha") {
      if (sc.policy.kind != "avg")
        throw ScenarioError("sweeping alpha requires the avg policy");
      for (double v : sc.sweep->values)
        if (v < 0.0 || v > 1.0) throw ScenarioError("$.sweep.values: alpha must lie in [0, 1]");
    } else if (p == "Cd") {
      for (double v : sc.sweep->values)
        if (v < 0.0) throw ScenarioError("$.sweep.values: Cd must be non-negative");
    } else {
      throw ScenarioError("unknown sweep parameter '" + p + "' (expected K, alpha or Cd)");
    }
  }
}

inline Scenario parse_scenario(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline ordered_json scenario_to_json(const Scenario& sc) {
  ordered_json j;
  j["name"] = sc.name;
  ordered_json js;
  js["B"] = sc.spec.B;
  js["D"] = sc.spec.D;
  js["powers"] = sc.spec.powers.levels;
  ordered_json jc;
  auto curve = [](const CostCurve& c) {
    ordered_json o;
    if (c.form == CostForm::linear) {
      o["kind"] = "linear";
      o["slope"] = c.slope;
    } else {
      o["kind"] = "table";
      o["values"] = c.values;
    }
    return o;
  };
  jc["power"] = curve(sc.spec.costs.power_cost);
  jc["backlog"] = curve(sc.spec.costs.backlog_cost);
  jc["drop"] = sc.spec.costs.drop_cost;
  js["costs"] = jc;
  ordered_json jsf;
  switch (sc.spec.success.family) {
    case SuccessFamily::ratio:
      jsf["family"] = "ratio";
      break;
    case SuccessFamily::exponential:
      jsf["family"] = "exponential";
      jsf["scale"] = sc.spec.success.scale;
      break;
    case SuccessFamily::sigmoidal:
      jsf["family"] = "sigmoidal";
      jsf["beta0"] = sc.spec.success.beta0;
      jsf["beta1"] = sc.spec.success.beta1;
      jsf["beta2"] = sc.spec.success.beta2;
      break;
  }
  js["success"] = jsf;
  ordered_json ji;
  ji["levels"] = sc.spec.interference.levels;
  ji["transition"] = sc.spec.interference.transition;
  ji["subslots_per_slot"] = sc.spec.interference.subslots_per_slot;
  js["interference"] = ji;
  js["arrival_prob"] = sc.spec.arrival_prob;
  j["spec"] = js;

  ordered_json jp;
  jp["kind"] = sc.policy.kind;
  if (sc.policy.kind == "avg") jp["alpha"] = sc.policy.alpha;
  if (sc.policy.kind == "slbpc1" || sc.policy.kind == "slbpc2") {
    jp["k_slope"] = sc.policy.k_slope;
    if (sc.policy.i_ref) jp["i_ref"] = *sc.policy.i_ref;
    if (sc.policy.p_change) jp["p_change"] = *sc.policy.p_change;
  }
  j["policy"] = jp;

  ordered_json jm;
  jm["replications"] = sc.sim.replications;
  jm["base_seed"] = sc.sim.base_seed;
  jm["max_slots"] = sc.sim.max_slots;
  if (sc.sim.initial_interference)
    jm["initial_interference"] = *sc.sim.initial_interference + 1;
  else
    jm["initial_interference"] = "stationary";
  j["sim"] = jm;

  if (sc.sweep) {
    ordered_json jw;
    jw["parameter"] = sc.sweep->parameter;
    jw["values"] = sc.sweep->values;
    j["sweep"] = jw;
  }
  return j;
}

/// Applies one value of the scenario's sweep parameter. K rewrites the linear
/// power-cost slope and, for the slbpc controllers, their assumed price.
inline Scenario apply_sweep_value(const Scenario& base, const std::string& parameter,
                                  double value) {
  Scenario sc = base;
  if (parameter == "K") {
    if (sc.spec.costs.power_cost.form != CostForm::linear)
      throw ScenarioError("sweeping K requires a linear power cost");
    sc.spec.costs.power_cost.slope = value;
    if (sc.policy.kind == "slbpc1" || sc.policy.kind == "slbpc2") sc.policy.k_slope = value;
  } else if (parameter == "alpha") {
    sc.policy.alpha = value;
  } else if (parameter == "Cd") {
    sc.spec.costs.drop_cost = value;
  } else {
    throw ScenarioError("unknown sweep parameter '" + parameter + "'");
  }
  return sc;
}

/// Seed precedence: command-line flag, then environment, then the config.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag_seed,
                                  const char* env_value, std::uint64_t file_seed) {
  if (flag_seed) return *flag_seed;
  if (env_value != nullptr && *env_value != '\0') {
    try {
      return std::stoull(env_value);
    } catch (const std::exception&) {
      throw ScenarioError(std::string("HOLPOWER_SEED is not a valid unsigned integer: ") +
                          env_value);
    }
  }
  return file_seed;
}

}  // namespace holpower
