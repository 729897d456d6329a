#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "holpower/analytics.hpp"
#include "holpower/canned.hpp"
#include "holpower/dp.hpp"
#include "holpower/oracle.hpp"
#include "holpower/scenario.hpp"
#include "holpower/simulate.hpp"

namespace holpower {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  std::string detail;
};

namespace verify {

inline CheckResult value_table_shape(const std::string& tag, const ValueTable& v) {
  CheckResult r{tag + ": value table shape", true, 0.0, ""};
  double worst = 0.0;
  for (int d = 1; d <= v.D; ++d)
    for (int i = 0; i < v.I; ++i) worst = std::max(worst, std::abs(v.at(0, d, i)));
  for (long b = 1; b <= v.B; ++b)
    for (int d = 1; d <= v.D; ++d)
      for (int i = 0; i < v.I; ++i) {
        if (v.at(b, d, i) < 0.0) worst = std::max(worst, -v.at(b, d, i));
        // cost-to-go grows with the amount of work left
        const double gap = v.at(b - 1, d, i) - v.at(b, d, i);
        if (gap > worst) worst = gap;
      }
  r.measured = worst;
  r.pass = worst <= 1e-9;
  r.detail = "terminal zeros, non-negativity, monotone growth in b";
  return r;
}

inline CheckResult bellman_exactness(const std::string& tag, const SystemSpec& spec) {
  auto [v, pol] = solve(spec);
  (void)pol;
  CheckResult r{tag + ": one-sweep optimality residual", true, bellman_residual(spec, v), ""};
  r.pass = r.measured <= 1e-9;
  return r;
}

inline CheckResult dp_vs_brute_force(std::uint64_t meta_seed, int instances) {
  std::mt19937_64 rng(meta_seed);
  double worst = 0.0;
  for (int n = 0; n < instances; ++n) {
    const SystemSpec spec = random_tiny_spec(rng);
    const auto [v, pol] = solve(spec);
    (void)pol;
    const auto best = brute_force_values(spec);
    const int I = static_cast<int>(spec.interference.size());
    for (int i = 0; i < I; ++i) {
      const double ref =
          best[(static_cast<std::size_t>(spec.B - 1) * spec.D + (spec.D - 1)) * I +
               static_cast<std::size_t>(i)];
      worst = std::max(worst, std::abs(v.at(spec.B, spec.D, i) - ref));
    }
  }
  CheckResult r{"solver vs exhaustive policy enumeration", worst <= 1e-9, worst,
                std::to_string(instances) + " random tiny instances"};
  return r;
}

inline CheckResult value_increment_identity(const std::string& tag, const SystemSpec& spec) {
  const auto [v, pol] = solve(spec);
  (void)pol;
  const SigmaTable st = build_sigma(spec);
  CheckResult r{tag + ": value-increment identity", true, check_value_increments(spec, v, st), ""};
  r.pass = r.measured <= 1e-9;
  return r;
}

inline CheckResult semi_analytic_agreement(const std::string& tag, const SystemSpec& spec) {
  const auto [v, pol] = solve(spec);
  const SigmaTable st = build_sigma(spec);
  const PolicyTable ana = semi_analytic_policy(st, spec);
  long mismatches = 0;
  for (long b = 1; b <= spec.B; ++b)
    for (int d = 1; d <= spec.D; ++d)
      if (ana.index_at(b, d, 0) != pol.index_at(b, d, 0)) ++mismatches;
  CheckResult r{tag + ": semi-analytic policy equals solved policy", mismatches == 0,
                static_cast<double>(mismatches), "power choices compared state by state"};
  return r;
}

/// Monotonicity of the chosen power: non-decreasing in the backlog at every
/// deadline, and along the deadline axis non-decreasing when tb0(b) >= 0,
/// non-increasing when tb0(b) <= 0. Returns the violation count.
inline long policy_shape_violations(const SystemSpec& spec, const PolicyTable& pol,
                                    const SigmaTable& st) {
  long violations = 0;
  for (int d = 1; d <= spec.D; ++d)
    for (long b = 2; b <= spec.B; ++b)
      if (pol.index_at(b, d, 0) < pol.index_at(b - 1, d, 0)) ++violations;
  for (long b = 1; b <= spec.B; ++b) {
    const double t0 = st.tb0(b);
    for (int d = 2; d <= spec.D; ++d) {
      const int lo = pol.index_at(b, d - 1, 0);
      const int hi = pol.index_at(b, d, 0);
      if (t0 >= 0.0 && hi < lo) ++violations;
      if (t0 <= 0.0 && hi > lo) ++violations;
    }
  }
  return violations;
}

inline CheckResult policy_monotonicity(const std::string& tag, const SystemSpec& spec) {
  const auto [v, pol] = solve(spec);
  (void)v;
  const SigmaTable st = build_sigma(spec);
  const long violations = policy_shape_violations(spec, pol, st);
  CheckResult r{tag + ": policy monotone in backlog and deadline", violations == 0,
                static_cast<double>(violations), ""};
  return r;
}

inline CheckResult sigma_shape(const std::string& tag, const SystemSpec& spec) {
  const SigmaTable st = build_sigma(spec);
  double worst = 0.0;
  for (long b = 1; b <= spec.B; ++b) {
    if (std::abs(st.sigma(b, 0)) > worst) worst = std::abs(st.sigma(b, 0));
    for (int d = 1; d <= spec.D; ++d) {
      // the running sums must reproduce the one-step operator exactly
      const double rec = t_operator(spec, st.fixed_level, b, st.sigma(b, d - 1));
      worst = std::max(worst, std::abs(rec - st.sigma(b, d)));
      if (b > 1) worst = std::max(worst, st.sigma(b - 1, d) - st.sigma(b, d));
      const double t0 = st.tb0(b);
      if (t0 >= 0.0) {
        worst = std::max(worst, st.sigma(b, d - 1) - st.sigma(b, d));
        worst = std::max(worst, -st.sigma(b, d));
      }
      if (t0 <= 0.0) {
        worst = std::max(worst, st.sigma(b, d) - st.sigma(b, d - 1));
        worst = std::max(worst, st.sigma(b, d));
      }
    }
  }
  CheckResult r{tag + ": sigma recursion and monotone shape", worst <= 1e-12, worst, ""};
  return r;
}

inline CheckResult sigma_bounds_containment(const std::string& tag, const SystemSpec& spec) {
  const SigmaTable st = build_sigma(spec);
  const SigmaBounds sb = sigma_bounds(st, spec);
  double worst_slack = 0.0;
  for (long b = 1; b <= spec.B; ++b)
    for (int d = 1; d <= spec.D; ++d) {
      worst_slack = std::max(worst_slack, sb.lower_at(b, d) - st.sigma(b, d));
      worst_slack = std::max(worst_slack, st.sigma(b, d) - sb.upper_at(b, d));
    }
  CheckResult r{tag + ": case-matched envelopes contain sigma", worst_slack <= 1e-9, worst_slack,
                ""};
  return r;
}

inline CheckResult operator_monotonicity(const std::string& tag, const SystemSpec& spec,
                                         std::uint64_t seed, int pairs = 200) {
  std::mt19937_64 rng(seed);
  const double level = spec.interference.levels.front();
  double worst = 0.0;
  for (int n = 0; n < pairs; ++n) {
    const long b = 1 + static_cast<long>(uniform01(rng) * static_cast<double>(spec.B));
    double x = (uniform01(rng) - 0.5) * 200.0;
    double y = (uniform01(rng) - 0.5) * 200.0;
    if (x < y) std::swap(x, y);
    worst = std::max(worst, t_operator(spec, level, b, y) - t_operator(spec, level, b, x));
  }
  CheckResult r{tag + ": one-step operator is monotone", worst <= 1e-9, worst,
                std::to_string(pairs) + " random ordered pairs"};
  return r;
}

inline CheckResult envelope_quality(const std::string& tag, const SuccessFunction& s,
                                    double i_level, int grid = 10000) {
  const ConcaveEnvelope env = concave_envelope(s, i_level);
  const double tangency =
      std::abs(s.derivative(env.p_star, i_level) * env.p_star -
               (s(env.p_star, i_level) - s(0.0, i_level)));
  const double p_max = std::max(4.0 * env.p_star, env.p_star + 5.0 * i_level);
  double worst_gap = 0.0;       // envelope must majorize the curve
  double worst_concavity = 0.0; // midpoint test on the envelope itself
  double prev2 = env(0.0), prev1 = env(p_max / grid);
  for (int k = 0; k <= grid; ++k) {
    const double p = p_max * static_cast<double>(k) / static_cast<double>(grid);
    const double e = env(p);
    worst_gap = std::max(worst_gap, s(p, i_level) - e);
    if (k >= 2) {
      worst_concavity = std::max(worst_concavity, prev2 + e - 2.0 * prev1);
      prev2 = prev1;
      prev1 = e;
    }
  }
  const double measured = std::max({tangency, worst_gap, worst_concavity});
  std::ostringstream detail;
  detail << "tangency " << tangency << ", gap " << worst_gap << ", concavity " << worst_concavity;
  CheckResult r{tag + ": concave envelope majorizes and stays concave",
                tangency <= 1e-10 && worst_gap <= 1e-9 && worst_concavity <= 1e-9, measured,
                detail.str()};
  return r;
}

inline CheckResult simulation_consistency(const std::string& tag, const SystemSpec& spec,
                                          long replications, std::uint64_t seed, int jobs = 1) {
  const auto [v, pol] = solve(spec);
  const double z = validate_against_dp(spec, v, pol, replications, seed, 0, jobs);
  CheckResult r{tag + ": simulated mean cost matches the exact value", std::abs(z) <= 3.0, z,
                "z-score over " + std::to_string(replications) + " replications"};
  return r;
}

}  // namespace verify

/// Full invariant suite for one scenario (base spec plus every sweep point).
inline std::vector<CheckResult> verify_scenario(const Scenario& sc, int jobs = 1) {
  std::vector<CheckResult> out;
  std::vector<SystemSpec> specs;
  std::vector<std::string> tags;
  if (sc.sweep) {
    for (double value : sc.sweep->values) {
      specs.push_back(apply_sweep_value(sc, sc.sweep->parameter, value).spec);
      std::ostringstream t;
      t << sc.name << "[" << sc.sweep->parameter << "=" << value << "]";
      tags.push_back(t.str());
    }
  } else {
    specs.push_back(sc.spec);
    tags.push_back(sc.name);
  }
  bool sim_checked = false;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const SystemSpec& spec = specs[k];
    const std::string& tag = tags[k];
    if (spec.arrival_prob == 0.0) {
      out.push_back(verify::bellman_exactness(tag, spec));
      auto [v, pol] = solve(spec);
      (void)pol;
      out.push_back(verify::value_table_shape(tag, v));
      if (spec.interference.size() == 1) {
        out.push_back(verify::value_increment_identity(tag, spec));
        out.push_back(verify::semi_analytic_agreement(tag, spec));
        out.push_back(verify::policy_monotonicity(tag, spec));
        out.push_back(verify::sigma_shape(tag, spec));
        out.push_back(verify::sigma_bounds_containment(tag, spec));
      } else {
        // backlog monotonicity of the chosen power is proven only for a
        // single-state chain; with several states it is reported, not gated
        long observed = 0;
        for (int i = 0; i < v.I; ++i)
          for (int d = 1; d <= spec.D; ++d)
            for (long b = 2; b <= spec.B; ++b)
              if (pol.index_at(b, d, i) < pol.index_at(b - 1, d, i)) ++observed;
        out.push_back(CheckResult{tag + ": policy backlog monotonicity (observed, not gated)",
                                  true, static_cast<double>(observed),
                                  "violation count across interference states"});
      }
      if (!sim_checked && spec.interference.subslots_per_slot == 1) {
        const long reps = std::min<long>(sc.sim.replications, 2000);
        out.push_back(verify::simulation_consistency(tag, spec, reps, sc.sim.base_seed, jobs));
        sim_checked = true;
      }
    }
  }
  return out;
}

/// Scenario-independent checks: the enumeration oracle family, the
/// fixed-interference structural family, and the envelope suite.
inline std::vector<CheckResult> verify_global() {
  std::vector<CheckResult> out;
  out.push_back(verify::dp_vs_brute_force(424242, 50));

  std::mt19937_64 rng(171717);
  long agreement_mismatch = 0, shape_violations = 0;
  double bound_slack = 0.0, recursion_err = 0.0;
  const int n_instances = 100;
  for (int n = 0; n < n_instances; ++n) {
    const SystemSpec spec = random_fixed_interference_spec(rng);
    const auto [v, pol] = solve(spec);
    (void)v;
    const SigmaTable st = build_sigma(spec);
    const PolicyTable ana = semi_analytic_policy(st, spec);
    for (long b = 1; b <= spec.B; ++b)
      for (int d = 1; d <= spec.D; ++d)
        if (ana.index_at(b, d, 0) != pol.index_at(b, d, 0)) ++agreement_mismatch;
    shape_violations += verify::policy_shape_violations(spec, pol, st);
    const SigmaBounds sb = sigma_bounds(st, spec);
    for (long b = 1; b <= spec.B; ++b)
      for (int d = 1; d <= spec.D; ++d) {
        bound_slack = std::max(bound_slack, sb.lower_at(b, d) - st.sigma(b, d));
        bound_slack = std::max(bound_slack, st.sigma(b, d) - sb.upper_at(b, d));
        recursion_err = std::max(
            recursion_err,
            std::abs(t_operator(spec, st.fixed_level, b, st.sigma(b, d - 1)) - st.sigma(b, d)));
      }
  }
  out.push_back(CheckResult{"fixed-interference family: semi-analytic agreement",
                            agreement_mismatch == 0, static_cast<double>(agreement_mismatch),
                            std::to_string(n_instances) + " random instances"});
  out.push_back(CheckResult{"fixed-interference family: policy monotone shape",
                            shape_violations == 0, static_cast<double>(shape_violations),
                            std::to_string(n_instances) + " random instances"});
  out.push_back(CheckResult{"fixed-interference family: sigma bounds containment",
                            bound_slack <= 1e-9, bound_slack,
                            std::to_string(n_instances) + " random instances"});
  out.push_back(CheckResult{"fixed-interference family: sigma recursion",
                            recursion_err <= 1e-12, recursion_err,
                            std::to_string(n_instances) + " random instances"});

  const struct {
    double b0, b1, b2, level;
  } sigmoids[] = {{1.0, 0.5, 2.0, 1.0}, {0.8, 0.3, 3.0, 2.0}, {2.0, 0.6, 1.5, 1.0}};
  for (const auto& g : sigmoids) {
    SuccessFunction s;
    s.family = SuccessFamily::sigmoidal;
    s.beta0 = g.b0;
    s.beta1 = g.b1;
    s.beta2 = g.b2;
    std::ostringstream t;
    t << "sigmoid(b0=" << g.b0 << ",b1=" << g.b1 << ",b2=" << g.b2 << ",i=" << g.level << ")";
    out.push_back(verify::envelope_quality(t.str(), s, g.level));
  }
  return out;
}

}  // namespace holpower
