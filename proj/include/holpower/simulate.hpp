#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "holpower/dp.hpp"
#include "holpower/model.hpp"
#include "holpower/policies.hpp"
#include "holpower/rng.hpp"

namespace holpower {

/// Outcome of one simulated trajectory, from the initial backlog until the
/// buffer empties or the slot cap fires.
struct TrajectoryRecord {
  double total_cost = 0.0;
  long slots = 0;
  long packets_departed = 0;  ///< successes plus drops
  long packets_dropped = 0;
  double total_power = 0.0;
  bool truncated = false;
};

/// One row of the optional per-slot event log.
struct SlotEvent {
  long slot = 0;
  long backlog = 0;
  int residual_deadline = 0;
  int interference_observed = 0;  ///< 0-based state index as seen by the policy
  double power = 0.0;
  bool success = false;
  bool arrival = false;
  double cost = 0.0;
};

inline long effective_max_slots(const SystemSpec& spec, long configured) {
  return configured > 0 ? configured : 100L * spec.B * spec.D;
}

/// Runs one trajectory under the given controller.
///
/// Per slot: the policy sees the first sub-slot interference and picks a
/// power; the chain then ticks through the remaining sub-slots and the
/// transmission succeeds with the success probability evaluated at the worst
/// (largest) sub-slot level; the stage cost and packet transition apply; an
/// arrival may join the queue; finally the chain ticks into the next slot.
/// Stream usage per slot is fixed: one policy draw, one channel draw, one
/// arrival draw, and subslots_per_slot chain draws.
inline TrajectoryRecord run_trajectory(const SystemSpec& spec, Policy& policy,
                                       SimStreams& streams, long max_slots,
                                       int initial_interference,
                                       std::vector<SlotEvent>* log = nullptr) {
  const int subslots = spec.interference.subslots_per_slot;
  policy.reset();
  TrajectoryRecord rec;
  State st{spec.B, spec.D, initial_interference};
  while (st.backlog > 0 && rec.slots < max_slots) {
    const Observation obs{st.backlog, st.residual_deadline, st.interference_index};
    const double u_policy = uniform01(streams.policy);
    const double p = policy.decide(obs, u_policy);
    const std::size_t a = spec.powers.index_of(p);

    int sub_state = st.interference_index;
    double worst_level = spec.interference.levels[static_cast<std::size_t>(sub_state)];
    for (int k = 1; k < subslots; ++k) {
      sub_state = spec.interference.step(sub_state, uniform01(streams.chain));
      worst_level =
          std::max(worst_level, spec.interference.levels[static_cast<std::size_t>(sub_state)]);
    }
    const double s = spec.success(p, worst_level);
    const bool success = uniform01(streams.channel) < s;

    const double g = stage_cost(spec, st, a, success);
    rec.total_cost += g;
    rec.total_power += p;
    if (success) {
      ++rec.packets_departed;
    } else if (st.residual_deadline == 1) {
      ++rec.packets_departed;
      ++rec.packets_dropped;
    }

    const bool arrival = uniform01(streams.arrival) < spec.arrival_prob;
    const int next_i = spec.interference.step(sub_state, uniform01(streams.chain));
    if (log != nullptr)
      log->push_back(SlotEvent{rec.slots, st.backlog, st.residual_deadline,
                               st.interference_index, p, success, arrival, g});
    st = step(spec, st, success, next_i);
    if (arrival) ++st.backlog;
    ++rec.slots;
  }
  rec.truncated = st.backlog > 0;
  return rec;
}

/// Aggregated batch metrics. Ratio metrics (drop fraction, power per packet)
/// pool numerators and denominators over all replications; their standard
/// errors come from the usual ratio-estimator linearization. Completion time
/// averages skip truncated replications, which are counted separately.
struct SimReport {
  long replications = 0;
  double mean_total_cost = 0.0;
  double stderr_total_cost = 0.0;
  double drop_fraction = 0.0;
  double drop_fraction_se = 0.0;
  double avg_power_per_packet = 0.0;
  double avg_power_per_packet_se = 0.0;
  double mean_completion_slots = 0.0;
  double mean_completion_slots_se = 0.0;
  double per_replication_drop_mean = 0.0;
  double per_replication_drop_se = 0.0;
  long truncated = 0;
  long total_departed = 0;
  long total_dropped = 0;
  double total_power = 0.0;
};

namespace detail {

inline double ratio_se(const std::vector<TrajectoryRecord>& recs, double ratio,
                       double num(const TrajectoryRecord&)) {
  const std::size_t n = recs.size();
  if (n < 2) return 0.0;
  double xbar = 0.0;
  for (const auto& r : recs) xbar += static_cast<double>(r.packets_departed);
  xbar /= static_cast<double>(n);
  if (xbar == 0.0) return 0.0;
  double ss = 0.0;
  for (const auto& r : recs) {
    const double e = num(r) - ratio * static_cast<double>(r.packets_departed);
    ss += e * e;
  }
  const double var = ss / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n)) / xbar;
}

}  // namespace detail

inline SimReport summarize(const std::vector<TrajectoryRecord>& recs) {
  SimReport rep;
  rep.replications = static_cast<long>(recs.size());
  if (recs.empty()) return rep;

  double sum_cost = 0.0;
  long completed = 0;
  double sum_slots = 0.0;
  for (const auto& r : recs) {
    sum_cost += r.total_cost;
    rep.total_departed += r.packets_departed;
    rep.total_dropped += r.packets_dropped;
    rep.total_power += r.total_power;
    if (r.truncated) {
      ++rep.truncated;
    } else {
      ++completed;
      sum_slots += static_cast<double>(r.slots);
    }
  }
  const double n = static_cast<double>(recs.size());
  rep.mean_total_cost = sum_cost / n;
  if (recs.size() > 1) {
    double ss = 0.0;
    for (const auto& r : recs) {
      const double e = r.total_cost - rep.mean_total_cost;
      ss += e * e;
    }
    rep.stderr_total_cost = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }

  if (rep.total_departed > 0) {
    rep.drop_fraction =
        static_cast<double>(rep.total_dropped) / static_cast<double>(rep.total_departed);
    rep.avg_power_per_packet = rep.total_power / static_cast<double>(rep.total_departed);
    rep.drop_fraction_se = detail::ratio_se(recs, rep.drop_fraction, [](const TrajectoryRecord& r) {
      return static_cast<double>(r.packets_dropped);
    });
    rep.avg_power_per_packet_se = detail::ratio_se(
        recs, rep.avg_power_per_packet, [](const TrajectoryRecord& r) { return r.total_power; });
  }

  long with_departures = 0;
  double drop_mean = 0.0;
  for (const auto& r : recs)
    if (r.packets_departed > 0) {
      ++with_departures;
      drop_mean +=
          static_cast<double>(r.packets_dropped) / static_cast<double>(r.packets_departed);
    }
  if (with_departures > 0) {
    drop_mean /= static_cast<double>(with_departures);
    rep.per_replication_drop_mean = drop_mean;
    if (with_departures > 1) {
      double ss = 0.0;
      for (const auto& r : recs)
        if (r.packets_departed > 0) {
          const double e = static_cast<double>(r.packets_dropped) /
                               static_cast<double>(r.packets_departed) -
                           drop_mean;
          ss += e * e;
        }
      rep.per_replication_drop_se = std::sqrt(ss / static_cast<double>(with_departures - 1)) /
                                    std::sqrt(static_cast<double>(with_departures));
    }
  }

  if (completed > 0) {
    rep.mean_completion_slots = sum_slots / static_cast<double>(completed);
    if (completed > 1) {
      double ss = 0.0;
      for (const auto& r : recs)
        if (!r.truncated) {
          const double e = static_cast<double>(r.slots) - rep.mean_completion_slots;
          ss += e * e;
        }
      rep.mean_completion_slots_se = std::sqrt(ss / static_cast<double>(completed - 1)) /
                                     std::sqrt(static_cast<double>(completed));
    }
  } else {
    rep.mean_completion_slots = std::numeric_limits<double>::quiet_NaN();
    rep.mean_completion_slots_se = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

/// Runs independent replications and aggregates them. Replication r derives
/// its streams from (base_seed, r), so results do not depend on the number of
/// worker threads: records land in a per-replication slot and are reduced in
/// index order afterwards.
inline SimReport run_batch(const SystemSpec& spec, const PolicyConfig& policy_cfg,
                           const PolicyTable* table, long replications, std::uint64_t base_seed,
                           long max_slots_cfg = 0,
                           std::optional<int> pinned_initial = std::nullopt, int jobs = 1,
                           std::vector<TrajectoryRecord>* raw = nullptr) {
  if (replications < 1) throw std::invalid_argument("run_batch: replications must be >= 1");
  spec.validate();
  const long max_slots = effective_max_slots(spec, max_slots_cfg);
  std::vector<double> stationary_cdf;
  if (!pinned_initial) {
    const auto pi = spec.interference.stationary();
    stationary_cdf.resize(pi.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      acc += pi[i];
      stationary_cdf[i] = acc;
    }
  } else if (*pinned_initial < 0 ||
             *pinned_initial >= static_cast<int>(spec.interference.size())) {
    throw std::invalid_argument("run_batch: initial interference state out of range");
  }

  std::vector<TrajectoryRecord> recs(static_cast<std::size_t>(replications));
  auto worker = [&](long lo, long hi) {
    for (long r = lo; r < hi; ++r) {
      SimStreams streams = make_streams(base_seed, static_cast<std::uint64_t>(r));
      int init;
      if (pinned_initial) {
        init = *pinned_initial;
      } else {
        const double u = uniform01(streams.chain);
        init = static_cast<int>(stationary_cdf.size()) - 1;
        for (std::size_t i = 0; i < stationary_cdf.size(); ++i)
          if (u < stationary_cdf[i]) {
            init = static_cast<int>(i);
            break;
          }
      }
      auto policy = make_policy(policy_cfg, spec, table);
      recs[static_cast<std::size_t>(r)] =
          run_trajectory(spec, *policy, streams, max_slots, init);
    }
  };

  if (jobs <= 1 || replications < 2) {
    worker(0, replications);
  } else {
    const int n_threads = std::min<long>(jobs, replications);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    const long chunk = (replications + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const long lo = t * chunk;
      const long hi = std::min(replications, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  if (raw != nullptr) *raw = recs;
  return summarize(recs);
}

/// Statistical consistency of the simulator against the exact solution:
/// simulates the solved policy from (B, D, i0) and returns the studentized
/// gap between the simulated mean cost and J(B, D, i0). Magnitudes above 3
/// flag an inconsistency. A zero-variance batch yields 0 when the mean
/// matches exactly and +/-inf otherwise.
inline double validate_against_dp(const SystemSpec& spec, const ValueTable& values,
                                  const PolicyTable& policy, long replications,
                                  std::uint64_t base_seed, int initial_interference = 0,
                                  int jobs = 1) {
  if (spec.arrival_prob != 0.0)
    throw std::invalid_argument("validate_against_dp: needs arrival_prob = 0");
  if (spec.interference.subslots_per_slot != 1)
    throw std::invalid_argument("validate_against_dp: needs subslots_per_slot = 1");
  PolicyConfig cfg;
  cfg.kind = "table";
  const SimReport rep = run_batch(spec, cfg, &policy, replications, base_seed, 0,
                                  initial_interference, jobs);
  const double target = values.at(spec.B, spec.D, initial_interference);
  const double diff = rep.mean_total_cost - target;
  if (rep.stderr_total_cost == 0.0) {
    if (std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(target))) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
  }
  return diff / rep.stderr_total_cost;
}

}  // namespace holpower
