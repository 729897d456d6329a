#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "holpower/model.hpp"
#include "holpower/rng.hpp"

namespace holpower {

/// Exhaustive policy enumeration for tiny instances. Independent of the
/// solver: it evaluates every stationary deterministic policy by exact
/// expectation (the per-policy recursion has no minimization in it) and keeps
/// the per-state minimum. Feasible only when |powers|^(B*D*I) is small.
inline std::vector<double> brute_force_values(const SystemSpec& spec) {
  spec.validate();
  if (spec.arrival_prob != 0.0)
    throw std::invalid_argument("brute_force_values: needs arrival_prob = 0");
  const long B = spec.B;
  const int D = spec.D;
  const int I = static_cast<int>(spec.interference.size());
  const std::size_t n_states = static_cast<std::size_t>(B) * D * I;
  const std::size_t n_actions = spec.powers.size();
  if (n_states > 12)
    throw std::invalid_argument("brute_force_values: instance too large to enumerate");

  double n_policies = 1.0;
  for (std::size_t k = 0; k < n_states; ++k) {
    n_policies *= static_cast<double>(n_actions);
    if (n_policies > 2e6) throw std::invalid_argument("brute_force_values: too many policies");
  }

  auto sidx = [&](long b, int d, int i) {
    return (static_cast<std::size_t>(b - 1) * D + static_cast<std::size_t>(d - 1)) * I +
           static_cast<std::size_t>(i);
  };

  std::vector<double> best(n_states, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> assignment(n_states, 0);
  std::vector<double> j(n_states, 0.0);

  for (;;) {
    // Expected total cost of this fixed policy, by the same triangular
    // dependency order the dynamics induce (no optimization involved).
    for (long b = 1; b <= B; ++b) {
      for (int d = 1; d <= D; ++d) {
        for (int i = 0; i < I; ++i) {
          const std::size_t a = assignment[sidx(b, d, i)];
          const double p = spec.powers[a];
          const double s = spec.success(p, spec.interference.levels[static_cast<std::size_t>(i)]);
          const auto& row = spec.interference.transition[static_cast<std::size_t>(i)];
          double w_done = 0.0, w_retry = 0.0;
          for (int jj = 0; jj < I; ++jj) {
            const double jdone = b == 1 ? 0.0 : j[sidx(b - 1, D, jj)];
            w_done += row[static_cast<std::size_t>(jj)] * jdone;
            if (d > 1) w_retry += row[static_cast<std::size_t>(jj)] * j[sidx(b, d - 1, jj)];
          }
          double val = spec.costs.backlog(b) + spec.costs.power(p, a);
          if (d == 1)
            val += w_done + (1.0 - s) * spec.costs.drop_cost;
          else
            val += s * w_done + (1.0 - s) * w_retry;
          j[sidx(b, d, i)] = val;
        }
      }
    }
    for (std::size_t k = 0; k < n_states; ++k) best[k] = std::min(best[k], j[k]);

    // next policy in lexicographic order
    std::size_t pos = 0;
    while (pos < n_states) {
      if (++assignment[pos] < n_actions) break;
      assignment[pos] = 0;
      ++pos;
    }
    if (pos == n_states) break;
  }
  return best;
}

inline double brute_force_value_at(const SystemSpec& spec, long b, int d, int i) {
  const auto best = brute_force_values(spec);
  const int D = spec.D;
  const int I = static_cast<int>(spec.interference.size());
  return best[(static_cast<std::size_t>(b - 1) * D + static_cast<std::size_t>(d - 1)) * I +
              static_cast<std::size_t>(i)];
}

// --- randomized instance families -----------------------------------------

namespace detail {

inline double urange(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline PowerSet random_powers(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> lv(n);
  double p = urange(rng, 0.0, 1.5);
  for (std::size_t k = 0; k < n; ++k) {
    lv[k] = p;
    p += urange(rng, 0.2, 2.5);
  }
  return PowerSet{lv};
}

inline CostCurve random_cost_curve(std::mt19937_64& rng, std::size_t table_len) {
  CostCurve c;
  if (uniform01(rng) < 0.5) {
    c.form = CostForm::linear;
    c.slope = urange(rng, 0.0, 3.0);
  } else {
    c.form = CostForm::table;
    c.values.resize(table_len);
    double v = urange(rng, 0.0, 1.0);
    for (std::size_t k = 0; k < table_len; ++k) {
      c.values[k] = v;
      v += urange(rng, 0.0, 2.0);
    }
  }
  return c;
}

inline SuccessFunction random_success(std::mt19937_64& rng, bool allow_sigmoid) {
  SuccessFunction s;
  const double pick = uniform01(rng);
  if (pick < 0.45) {
    s.family = SuccessFamily::ratio;
  } else if (pick < 0.9 || !allow_sigmoid) {
    s.family = SuccessFamily::exponential;
    s.scale = urange(rng, 0.4, 3.0);
  } else {
    s.family = SuccessFamily::sigmoidal;
    s.beta1 = urange(rng, 0.0, 0.6);
    s.beta0 = urange(rng, 0.5, 2.0);
    s.beta2 = urange(rng, 1.0, 3.0);
  }
  return s;
}

inline InterferenceChain random_chain(std::mt19937_64& rng, std::size_t n) {
  InterferenceChain c;
  c.levels.resize(n);
  for (auto& v : c.levels) v = urange(rng, 0.4, 4.0);
  c.transition.assign(n, std::vector<double>(n, 0.0));
  for (auto& row : c.transition) {
    double sum = 0.0;
    for (auto& x : row) {
      x = urange(rng, 0.05, 1.0);
      sum += x;
    }
    for (auto& x : row) x /= sum;
  }
  c.subslots_per_slot = 1;
  return c;
}

}  // namespace detail

/// Instance small enough for exhaustive policy enumeration:
/// B*D*I <= 8 and at most 3 power levels.
inline SystemSpec random_tiny_spec(std::mt19937_64& rng) {
  static const std::vector<std::array<int, 3>> shapes = [] {
    std::vector<std::array<int, 3>> v;
    for (int b = 1; b <= 8; ++b)
      for (int d = 1; d <= 8; ++d)
        for (int i = 1; i <= 4; ++i)
          if (b * d * i <= 8) v.push_back({b, d, i});
    return v;
  }();
  const auto& shape = shapes[static_cast<std::size_t>(uniform01(rng) * shapes.size())];
  SystemSpec spec;
  spec.B = shape[0];
  spec.D = shape[1];
  const std::size_t n_actions = 1 + static_cast<std::size_t>(uniform01(rng) * 3.0) % 3;
  spec.powers = detail::random_powers(rng, n_actions);
  spec.costs.power_cost = detail::random_cost_curve(rng, n_actions);
  spec.costs.backlog_cost = detail::random_cost_curve(rng, static_cast<std::size_t>(spec.B));
  spec.costs.drop_cost = detail::urange(rng, 0.0, 20.0);
  spec.success = detail::random_success(rng, false);
  spec.interference = detail::random_chain(rng, static_cast<std::size_t>(shape[2]));
  spec.arrival_prob = 0.0;
  return spec;
}

/// Fixed-interference instance for the structural property family.
inline SystemSpec random_fixed_interference_spec(std::mt19937_64& rng) {
  SystemSpec spec;
  spec.B = 2 + static_cast<long>(uniform01(rng) * 11.0);
  spec.D = 1 + static_cast<int>(uniform01(rng) * 6.0);
  const std::size_t n_actions = 1 + static_cast<std::size_t>(uniform01(rng) * 5.0) % 5;
  spec.powers = detail::random_powers(rng, n_actions);
  spec.costs.power_cost = detail::random_cost_curve(rng, n_actions);
  spec.costs.backlog_cost = detail::random_cost_curve(rng, static_cast<std::size_t>(spec.B));
  spec.costs.drop_cost = detail::urange(rng, 0.0, 40.0);
  spec.success = detail::random_success(rng, true);
  spec.interference = detail::random_chain(rng, 1);
  spec.arrival_prob = 0.0;
  return spec;
}

}  // namespace holpower
