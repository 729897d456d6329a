#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "holpower/model.hpp"

namespace holpower {

/// Two action objectives within this absolute distance count as tied, and the
/// tie resolves to the smaller power.
inline constexpr double kTieTolerance = 1e-12;

/// Expected cost-to-go J(b, d, i), stored densely for b in 0..B (the b = 0
/// plane is identically zero), d in 1..D, i in 0..I-1.
struct ValueTable {
  long B = 0;
  int D = 0;
  int I = 0;
  std::vector<double> values;

  ValueTable() = default;
  ValueTable(long b, int d, int i)
      : B(b), D(d), I(i), values(static_cast<std::size_t>(b + 1) * d * i, 0.0) {}

  double at(long b, int d, int i) const { return values[offset(b, d, i)]; }
  double& at(long b, int d, int i) { return values[offset(b, d, i)]; }

  std::size_t offset(long b, int d, int i) const {
    if (b < 0 || b > B || d < 1 || d > D || i < 0 || i >= I)
      throw std::out_of_range("ValueTable: state out of range");
    return (static_cast<std::size_t>(b) * D + static_cast<std::size_t>(d - 1)) * I +
           static_cast<std::size_t>(i);
  }
};

/// Chosen power per non-terminal state (b in 1..B, d in 1..D, i in 0..I-1),
/// as an index into the power set plus a copy of the levels.
struct PolicyTable {
  long B = 0;
  int D = 0;
  int I = 0;
  std::vector<int> action;
  std::vector<double> power_levels;

  PolicyTable() = default;
  PolicyTable(long b, int d, int i, std::vector<double> levels)
      : B(b), D(d), I(i), action(static_cast<std::size_t>(b) * d * i, 0),
        power_levels(std::move(levels)) {}

  int index_at(long b, int d, int i) const { return action[offset(b, d, i)]; }
  int& index_at(long b, int d, int i) { return action[offset(b, d, i)]; }
  double power_at(long b, int d, int i) const {
    return power_levels[static_cast<std::size_t>(index_at(b, d, i))];
  }

  std::size_t offset(long b, int d, int i) const {
    if (b < 1 || b > B || d < 1 || d > D || i < 0 || i >= I)
      throw std::out_of_range("PolicyTable: state out of range");
    return (static_cast<std::size_t>(b - 1) * D + static_cast<std::size_t>(d - 1)) * I +
           static_cast<std::size_t>(i);
  }
};

namespace detail {

/// One-step lookahead value of taking power index a at state (b, d, i),
/// reading continuation values from v. Used by the solver, the greedy policy
/// extraction and the residual check, so all three see identical arithmetic.
inline double action_value(const SystemSpec& spec, const ValueTable& v, long b, int d, int i,
                           std::size_t a) {
  const double p = spec.powers[a];
  const double s = spec.success(p, spec.interference.levels[static_cast<std::size_t>(i)]);
  const auto& row = spec.interference.transition[static_cast<std::size_t>(i)];
  double w_done = 0.0;  // E_j J(b-1, D, j)
  for (int j = 0; j < v.I; ++j) w_done += row[static_cast<std::size_t>(j)] * v.at(b - 1, spec.D, j);
  const double base = spec.costs.backlog(b) + spec.costs.power(p, a);
  if (d == 1) return base + w_done + (1.0 - s) * spec.costs.drop_cost;
  double w_retry = 0.0;  // E_j J(b, d-1, j)
  for (int j = 0; j < v.I; ++j) w_retry += row[static_cast<std::size_t>(j)] * v.at(b, d - 1, j);
  return base + s * w_done + (1.0 - s) * w_retry;
}

/// Minimum value and the smallest index whose value is within kTieTolerance
/// of it. Values are evaluated once per action.
template <typename F>
std::pair<double, std::size_t> min_smallest_tie(std::size_t n, F&& f) {
  std::vector<double> vals(n);
  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    vals[a] = f(a);
    if (vals[a] < vmin) vmin = vals[a];
  }
  for (std::size_t a = 0; a < n; ++a)
    if (vals[a] <= vmin + kTieTolerance) return {vmin, a};
  return {vmin, 0};  // unreachable
}

}  // namespace detail

/// Exact cost-to-go and optimal policy by one backward sweep.
///
/// The recursion is triangular: states at backlog b with deadline 1 depend
/// only on backlog b - 1, and (b, d) depends on (b, d - 1) and b - 1, so a
/// single pass over b = 1..B, d = 1..D solves the fixed point exactly with no
/// iteration. Ties in the minimization resolve to the smallest power.
inline std::pair<ValueTable, PolicyTable> solve(const SystemSpec& spec) {
  spec.validate();
  if (spec.arrival_prob != 0.0)
    throw std::invalid_argument("solve: the state space is finite only without arrivals");
  const int I = static_cast<int>(spec.interference.size());
  ValueTable v(spec.B, spec.D, I);
  PolicyTable pol(spec.B, spec.D, I, spec.powers.levels);
  for (long b = 1; b <= spec.B; ++b) {
    for (int d = 1; d <= spec.D; ++d) {
      for (int i = 0; i < I; ++i) {
        auto [vmin, a] = detail::min_smallest_tie(
            spec.powers.size(),
            [&](std::size_t k) { return detail::action_value(spec, v, b, d, i, k); });
        v.at(b, d, i) = vmin;
        pol.index_at(b, d, i) = static_cast<int>(a);
      }
    }
  }
  return {std::move(v), std::move(pol)};
}

/// Largest absolute one-step lookahead residual over all states, including
/// the terminal plane (whose values must be zero). Zero, up to rounding, iff
/// v solves the optimality recursion.
inline double bellman_residual(const SystemSpec& spec, const ValueTable& v) {
  const int I = static_cast<int>(spec.interference.size());
  if (v.B != spec.B || v.D != spec.D || v.I != I)
    throw std::invalid_argument("bellman_residual: table dimensions do not match the spec");
  double worst = 0.0;
  for (int d = 1; d <= spec.D; ++d)
    for (int i = 0; i < I; ++i) worst = std::max(worst, std::abs(v.at(0, d, i)));
  for (long b = 1; b <= spec.B; ++b) {
    for (int d = 1; d <= spec.D; ++d) {
      for (int i = 0; i < I; ++i) {
        auto [vmin, a] = detail::min_smallest_tie(
            spec.powers.size(),
            [&](std::size_t k) { return detail::action_value(spec, v, b, d, i, k); });
        (void)a;
        worst = std::max(worst, std::abs(vmin - v.at(b, d, i)));
      }
    }
  }
  return worst;
}

/// Smallest-power greedy policy extracted from a value table.
inline PolicyTable greedy_policy(const SystemSpec& spec, const ValueTable& v) {
  const int I = static_cast<int>(spec.interference.size());
  if (v.B != spec.B || v.D != spec.D || v.I != I)
    throw std::invalid_argument("greedy_policy: table dimensions do not match the spec");
  PolicyTable pol(spec.B, spec.D, I, spec.powers.levels);
  for (long b = 1; b <= spec.B; ++b)
    for (int d = 1; d <= spec.D; ++d)
      for (int i = 0; i < I; ++i) {
        auto [vmin, a] = detail::min_smallest_tie(
            spec.powers.size(),
            [&](std::size_t k) { return detail::action_value(spec, v, b, d, i, k); });
        (void)vmin;
        pol.index_at(b, d, i) = static_cast<int>(a);
      }
  return pol;
}

}  // namespace holpower
