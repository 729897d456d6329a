#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "holpower/scenario.hpp"

namespace holpower {

/// A built-in scenario, embedded verbatim so runs are reproducible without
/// external files. kCannedConfigVersion bumps whenever any embedded text
/// changes.
struct CannedScenario {
  const char* name;
  const char* summary;
  const char* json_text;
};

inline constexpr int kCannedConfigVersion = 1;

inline const std::vector<CannedScenario>& canned_scenarios() {
  static const std::vector<CannedScenario> all = {
      {"illustrative-cd1",
       "single-state channel, low drop penalty; optimal power backs off as the deadline nears",
       R"json({
  "name": "illustrative-cd1",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [2.0, 4.0, 6.0],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 1.0},
    "interference": {
      "levels": [2.0],
      "transition": [[1.0]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "table"},
  "sim": {"replications": 2000, "base_seed": 4101, "max_slots": 0, "initial_interference": 1}
})json"},

      {"illustrative-cd10",
       "single-state channel, moderate drop penalty; the deadline response flips direction "
       "partway up the backlog range",
       R"json({
  "name": "illustrative-cd10",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [2.0, 4.0, 6.0],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 10.0
    },
    "success": {"family": "exponential", "scale": 1.0},
    "interference": {
      "levels": [2.0],
      "transition": [[1.0]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "table"},
  "sim": {"replications": 2000, "base_seed": 4101, "max_slots": 0, "initial_interference": 1}
})json"},

      {"illustrative-cd100",
       "single-state channel, high drop penalty; optimal power rises as the deadline nears",
       R"json({
  "name": "illustrative-cd100",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [2.0, 4.0, 6.0],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 100.0
    },
    "success": {"family": "exponential", "scale": 1.0},
    "interference": {
      "levels": [2.0],
      "transition": [[1.0]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "table"},
  "sim": {"replications": 2000, "base_seed": 4101, "max_slots": 0, "initial_interference": 1}
})json"},

      {"sigmoid-envelope-demo",
       "single-state sigmoidal channel; exercises the concave-envelope construction",
       R"json({
  "name": "sigmoid-envelope-demo",
  "spec": {
    "B": 10,
    "D": 3,
    "powers": [0.5, 1.0, 2.0, 4.0],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 5.0
    },
    "success": {"family": "sigmoidal", "beta0": 1.0, "beta1": 0.5, "beta2": 2.0},
    "interference": {
      "levels": [1.0],
      "transition": [[1.0]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "table"},
  "sim": {"replications": 2000, "base_seed": 3301, "max_slots": 0, "initial_interference": 1}
})json"},

      {"slow-fading-dp",
       "two-state channel mixing slowly; solved table policy swept over the power price",
       R"json({
  "name": "slow-fading-dp",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.9, 0.1], [0.1, 0.9]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "table"},
  "sim": {"replications": 2000, "base_seed": 51000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"slow-fading-min",
       "two-state channel mixing slowly; always-minimum-power benchmark",
       R"json({
  "name": "slow-fading-min",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.9, 0.1], [0.1, 0.9]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "min"},
  "sim": {"replications": 2000, "base_seed": 51000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"slow-fading-max",
       "two-state channel mixing slowly; always-maximum-power benchmark",
       R"json({
  "name": "slow-fading-max",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.9, 0.1], [0.1, 0.9]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "max"},
  "sim": {"replications": 2000, "base_seed": 51000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"slow-fading-slbpc1",
       "two-state channel mixing slowly; backlog-only heuristic controller",
       R"json({
  "name": "slow-fading-slbpc1",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.9, 0.1], [0.1, 0.9]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "slbpc1", "k_slope": 1.0},
  "sim": {"replications": 2000, "base_seed": 51000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"slow-fading-slbpc2",
       "two-state channel mixing slowly; drifting heuristic controller",
       R"json({
  "name": "slow-fading-slbpc2",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.9, 0.1], [0.1, 0.9]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "slbpc2", "k_slope": 1.0},
  "sim": {"replications": 2000, "base_seed": 51000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"fast-fading-dp",
       "two-state channel mixing fast; solved table policy swept over the power price",
       R"json({
  "name": "fast-fading-dp",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.1, 0.9], [0.9, 0.1]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "table"},
  "sim": {"replications": 2000, "base_seed": 91000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"fast-fading-min",
       "two-state channel mixing fast; always-minimum-power benchmark",
       R"json({
  "name": "fast-fading-min",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.1, 0.9], [0.9, 0.1]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "min"},
  "sim": {"replications": 2000, "base_seed": 91000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"fast-fading-max",
       "two-state channel mixing fast; always-maximum-power benchmark",
       R"json({
  "name": "fast-fading-max",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.1, 0.9], [0.9, 0.1]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "max"},
  "sim": {"replications": 2000, "base_seed": 91000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"fast-fading-slbpc1",
       "two-state channel mixing fast; backlog-only heuristic controller",
       R"json({
  "name": "fast-fading-slbpc1",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.1, 0.9], [0.9, 0.1]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "slbpc1", "k_slope": 1.0},
  "sim": {"replications": 2000, "base_seed": 91000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"fast-fading-slbpc2",
       "two-state channel mixing fast; drifting heuristic controller",
       R"json({
  "name": "fast-fading-slbpc2",
  "spec": {
    "B": 20,
    "D": 5,
    "powers": [0.1, 0.2, 0.4, 0.8],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 2.0},
    "interference": {
      "levels": [1.0, 2.0],
      "transition": [[0.1, 0.9], [0.9, 0.1]],
      "subslots_per_slot": 1
    },
    "arrival_prob": 0.0
  },
  "policy": {"kind": "slbpc2", "k_slope": 1.0},
  "sim": {"replications": 2000, "base_seed": 91000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.001, 0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0, 1000.0, 10000.0]}
})json"},

      {"detailed-slbpc1",
       "two-timescale channel with arrivals; backlog-only heuristic swept over its power price",
       R"json({
  "name": "detailed-slbpc1",
  "spec": {
    "B": 100,
    "D": 3,
    "powers": [0.5, 1.0, 2.0, 4.0, 8.0],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 1.0},
    "interference": {
      "levels": [8.0, 16.0],
      "transition": [[0.1, 0.9], [0.9, 0.1]],
      "subslots_per_slot": 2
    },
    "arrival_prob": 0.1
  },
  "policy": {"kind": "slbpc1", "k_slope": 1.0},
  "sim": {"replications": 10000, "base_seed": 72000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.5, 1.0, 2.0, 3.0, 4.0, 4.75, 5.75, 6.5, 7.5, 8.5, 10.0, 12.0]}
})json"},

      {"detailed-slbpc2",
       "two-timescale channel with arrivals; drifting heuristic swept over its power price",
       R"json({
  "name": "detailed-slbpc2",
  "spec": {
    "B": 100,
    "D": 3,
    "powers": [0.5, 1.0, 2.0, 4.0, 8.0],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 1.0},
    "interference": {
      "levels": [8.0, 16.0],
      "transition": [[0.1, 0.9], [0.9, 0.1]],
      "subslots_per_slot": 2
    },
    "arrival_prob": 0.1
  },
  "policy": {"kind": "slbpc2", "k_slope": 1.0},
  "sim": {"replications": 10000, "base_seed": 72000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "K", "values": [0.5, 1.0, 2.0, 3.0, 4.0, 4.75, 5.75, 6.5, 7.5, 8.5, 9.0, 10.0, 11.0, 12.0, 16.0]}
})json"},

      {"detailed-avg",
       "two-timescale channel with arrivals; min/max coin-flip benchmark swept over alpha",
       R"json({
  "name": "detailed-avg",
  "spec": {
    "B": 100,
    "D": 3,
    "powers": [0.5, 1.0, 2.0, 4.0, 8.0],
    "costs": {
      "power": {"kind": "linear", "slope": 1.0},
      "backlog": {"kind": "linear", "slope": 1.0},
      "drop": 1.0
    },
    "success": {"family": "exponential", "scale": 1.0},
    "interference": {
      "levels": [8.0, 16.0],
      "transition": [[0.1, 0.9], [0.9, 0.1]],
      "subslots_per_slot": 2
    },
    "arrival_prob": 0.1
  },
  "policy": {"kind": "avg", "alpha": 0.5},
  "sim": {"replications": 10000, "base_seed": 72000, "max_slots": 0, "initial_interference": "stationary"},
  "sweep": {"parameter": "alpha", "values": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]}
})json"},
  };
  return all;
}

inline Scenario load_canned(const std::string& name) {
  for (const auto& c : canned_scenarios())
    if (name == c.name) return parse_scenario(std::string(c.json_text));
  throw ScenarioError("unknown canned scenario: " + name);
}

}  // namespace holpower
