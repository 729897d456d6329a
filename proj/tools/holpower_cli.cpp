// Command-line front end: solves instances, runs seeded Monte Carlo batches,
// dumps the semi-analytic tables and envelopes, and runs the verification
// suite. All numeric output is CSV with a fixed column order.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "holpower/holpower.hpp"

namespace fs = std::filesystem;
using namespace holpower;

namespace {

struct CommonOptions {
  std::string scenario_path;
  std::string canned_name;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<long> replications;
  int jobs = 1;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  auto* sc = cmd->add_option("--scenario", opt.scenario_path, "path to a scenario JSON file");
  auto* ca = cmd->add_option("--canned", opt.canned_name, "name of a built-in scenario");
  sc->excludes(ca);
  cmd->add_option("--out", opt.out_dir, "output directory (created if missing)");
  cmd->add_option("--seed", opt.seed, "override the base seed (flag beats HOLPOWER_SEED beats file)");
  cmd->add_option("--replications", opt.replications, "override the replication count");
  cmd->add_option("--jobs", opt.jobs, "worker threads for batches")->check(CLI::PositiveNumber);
  cmd->add_flag("--verbose", opt.verbose, "extra logging; simulate also writes per-slot event logs");
}

Scenario load_input(const CommonOptions& opt) {
  if (opt.scenario_path.empty() == opt.canned_name.empty())
    throw ScenarioError("give exactly one of --scenario or --canned");
  Scenario sc = opt.scenario_path.empty() ? load_canned(opt.canned_name)
                                          : load_scenario_file(opt.scenario_path);
  sc.sim.base_seed = resolve_seed(opt.seed, std::getenv("HOLPOWER_SEED"), sc.sim.base_seed);
  if (opt.replications) sc.sim.replications = *opt.replications;
  return sc;
}

std::ofstream open_out(const CommonOptions& opt, const std::string& filename) {
  fs::create_directories(opt.out_dir);
  const fs::path p = fs::path(opt.out_dir) / filename;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + p.string());
  return out;
}

std::string sweep_suffix(std::size_t idx, std::size_t total) {
  if (total <= 1) return "";
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%03zu", idx);
  return buf;
}

/// Expands the scenario into its sweep points (or just itself), sorted by
/// sweep value so output ordering never depends on config order.
std::vector<std::pair<std::optional<double>, Scenario>> expand_sweep(const Scenario& sc) {
  std::vector<std::pair<std::optional<double>, Scenario>> out;
  if (!sc.sweep) {
    out.emplace_back(std::nullopt, sc);
    return out;
  }
  std::vector<double> values = sc.sweep->values;
  std::sort(values.begin(), values.end());
  for (double v : values)
    out.emplace_back(v, apply_sweep_value(sc, sc.sweep->parameter, v));
  return out;
}

int cmd_solve(const CommonOptions& opt) {
  const Scenario sc = load_input(opt);
  const auto points = expand_sweep(sc);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Scenario& point = points[k].second;
    if (point.spec.arrival_prob != 0.0) {
      std::cerr << "error: solve requires arrival_prob = 0 (scenario '" << point.name << "')\n";
      return 2;
    }
    const auto [values, policy] = solve(point.spec);
    const std::string suffix = sweep_suffix(k, points.size());
    {
      auto out = open_out(opt, "values" + suffix + ".csv");
      write_value_table_csv(out, values);
    }
    {
      auto out = open_out(opt, "policy" + suffix + ".csv");
      write_policy_table_csv(out, policy);
    }
    std::cout << point.name;
    if (points[k].first) std::cout << " [" << sc.sweep->parameter << "=" << *points[k].first << "]";
    std::cout << " start-state cost-to-go:";
    for (int i = 0; i < values.I; ++i)
      std::cout << " J(B,D," << (i + 1) << ")=" << fmt12(values.at(point.spec.B, point.spec.D, i));
    std::cout << '\n';
  }
  return 0;
}

int cmd_simulate(const CommonOptions& opt) {
  const Scenario sc = load_input(opt);
  const auto points = expand_sweep(sc);
  auto out = open_out(opt, "report.csv");
  write_report_header(out);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Scenario& point = points[k].second;
    ValueTable values;
    PolicyTable policy;
    const PolicyTable* table = nullptr;
    if (point.policy.kind == "table") {
      if (point.spec.arrival_prob != 0.0) {
        std::cerr << "error: the table policy needs a solvable spec (arrival_prob = 0)\n";
        return 2;
      }
      std::tie(values, policy) = solve(point.spec);
      table = &policy;
    }
    const SimReport rep =
        run_batch(point.spec, point.policy, table, point.sim.replications, point.sim.base_seed,
                  point.sim.max_slots, point.sim.initial_interference, opt.jobs);
    write_report_row(out, sc.name, point.policy.kind,
                     sc.sweep ? sc.sweep->parameter : std::string(),
                     points[k].first ? fmt12(*points[k].first) : std::string(), rep);
    if (opt.verbose) {
      // re-run replication 0 with logging; same streams, so same trajectory
      SimStreams streams = make_streams(point.sim.base_seed, 0);
      int init = 0;
      if (point.sim.initial_interference) {
        init = *point.sim.initial_interference;
      } else {
        const auto pi = point.spec.interference.stationary();
        const double u = uniform01(streams.chain);
        double acc = 0.0;
        init = static_cast<int>(pi.size()) - 1;
        for (std::size_t i = 0; i < pi.size(); ++i) {
          acc += pi[i];
          if (u < acc) {
            init = static_cast<int>(i);
            break;
          }
        }
      }
      auto policy_inst = make_policy(point.policy, point.spec, table);
      std::vector<SlotEvent> log;
      run_trajectory(point.spec, *policy_inst, streams,
                     effective_max_slots(point.spec, point.sim.max_slots), init, &log);
      auto tlog = open_out(opt, "trajectory" + sweep_suffix(k, points.size()) + ".csv");
      write_trajectory_log_csv(tlog, log);
      std::cout << "point " << (k + 1) << "/" << points.size() << " done: mean cost "
                << fmt12(rep.mean_total_cost) << ", drop fraction " << fmt12(rep.drop_fraction)
                << '\n';
    }
  }
  std::cout << "wrote " << (fs::path(opt.out_dir) / "report.csv").string() << '\n';
  return 0;
}

int cmd_sigma(const CommonOptions& opt) {
  const Scenario sc = load_input(opt);
  const double level = *std::min_element(sc.spec.interference.levels.begin(),
                                         sc.spec.interference.levels.end());
  const SigmaTable st = build_sigma(sc.spec, level);
  const SigmaBounds sb = sigma_bounds(st, sc.spec);
  auto out = open_out(opt, "sigma.csv");
  write_sigma_csv(out, st, sb);
  long first_nonneg = -1;
  for (long b = 1; b <= st.B; ++b)
    if (st.tb0(b) >= 0.0) {
      first_nonneg = b;
      break;
    }
  std::cout << sc.name << " at level " << fmt12(level) << ": ";
  if (first_nonneg == 1)
    std::cout << "power rises along the deadline axis at every backlog\n";
  else if (first_nonneg == -1)
    std::cout << "power falls along the deadline axis at every backlog\n";
  else
    std::cout << "deadline response flips direction at backlog " << first_nonneg << '\n';
  return 0;
}

int cmd_envelope(const CommonOptions& opt) {
  const Scenario sc = load_input(opt);
  if (sc.spec.success.family != SuccessFamily::sigmoidal) {
    std::cerr << "error: envelope needs a sigmoidal success function\n";
    return 2;
  }
  const double level = *std::min_element(sc.spec.interference.levels.begin(),
                                         sc.spec.interference.levels.end());
  const ConcaveEnvelope env = concave_envelope(sc.spec.success, level);
  auto out = open_out(opt, "envelope.csv");
  write_envelope_csv(out, env, 400, std::max(4.0 * env.p_star, env.p_star + 5.0 * level));
  std::cout << sc.name << ": tangency at p=" << fmt12(env.p_star)
            << ", linear-segment slope " << fmt12(env.k_ccv) << '\n';
  return 0;
}

int cmd_verify(const CommonOptions& opt, bool all_canned) {
  std::vector<Scenario> scenarios;
  if (all_canned) {
    for (const auto& c : canned_scenarios()) scenarios.push_back(load_canned(c.name));
  } else {
    scenarios.push_back(load_input(opt));
  }
  std::vector<CheckResult> results;
  for (const auto& sc : scenarios) {
    auto rs = verify_scenario(sc, opt.jobs);
    results.insert(results.end(), rs.begin(), rs.end());
  }
  auto global = verify_global();
  results.insert(results.end(), global.begin(), global.end());

  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  measured=" << fmt12(r.measured);
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << '\n';
    if (!r.pass) ++failures;
  }
  std::cout << results.size() << " checks, " << failures << " failed\n";
  return failures == 0 ? 0 : 1;
}

int cmd_list() {
  std::cout << "built-in scenarios (config version " << kCannedConfigVersion << "):\n";
  for (const auto& c : canned_scenarios())
    std::cout << "  " << c.name << "\n      " << c.summary << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transmit power control toolkit: exact solver, semi-analytic tables, "
               "heuristic controllers and seeded Monte Carlo evaluation"};
  app.require_subcommand(1);

  CommonOptions solve_opt, sim_opt, sigma_opt, env_opt, verify_opt;
  bool all_canned = false;

  auto* c_solve = app.add_subcommand("solve", "solve a scenario and export value/policy tables");
  add_common(c_solve, solve_opt);
  auto* c_sim = app.add_subcommand("simulate", "run a seeded Monte Carlo batch and export a report");
  add_common(c_sim, sim_opt);
  auto* c_verify = app.add_subcommand("verify", "run the invariant suite");
  add_common(c_verify, verify_opt);
  c_verify->add_flag("--all-canned", all_canned, "verify every built-in scenario");
  auto* c_sigma = app.add_subcommand("sigma", "export the fixed-interference tables");
  add_common(c_sigma, sigma_opt);
  auto* c_env = app.add_subcommand("envelope", "export concave-envelope samples");
  add_common(c_env, env_opt);
  app.add_subcommand("list", "list built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_solve->parsed()) return cmd_solve(solve_opt);
    if (c_sim->parsed()) return cmd_simulate(sim_opt);
    if (c_verify->parsed()) return cmd_verify(verify_opt, all_canned);
    if (c_sigma->parsed()) return cmd_sigma(sigma_opt);
    if (c_env->parsed()) return cmd_envelope(env_opt);
    return cmd_list();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
