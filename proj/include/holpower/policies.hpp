#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "holpower/analytics.hpp"
#include "holpower/dp.hpp"
#include "holpower/model.hpp"

namespace holpower {

/// What a controller can see at decision time: the instantaneous backlog, the
/// head-of-line packet's remaining attempts, and the first observed
/// interference state of the slot.
struct Observation {
  long backlog = 0;
  int residual_deadline = 1;
  int interference_index = 0;
};

/// Unified decision interface. decide() receives one uniform draw in [0, 1)
/// per decision point; deterministic controllers ignore it, so every
/// controller consumes exactly one draw per slot from the caller's stream.
class Policy {
 public:
  virtual ~Policy() = default;

  /// Power for this slot; always a member of the power set.
  virtual double decide(const Observation& obs, double u) = 0;

  /// Called once before each trajectory; clears per-packet controller state.
  virtual void reset() {}
};

/// Declarative policy selection, as it appears in scenario configs.
struct PolicyConfig {
  std::string kind = "min";  ///< min | max | table | avg | slbpc1 | slbpc2
  double alpha = 0.5;        ///< avg: probability of transmitting at min power
  double k_slope = 1.0;      ///< slbpc: assumed linear power price
  std::optional<double> i_ref;     ///< slbpc: reference level; default lowest chain level
  std::optional<double> p_change;  ///< slbpc2: drift probability; default 1 / (2D)
};

namespace detail {

/// Member of the power set nearest to x; exact midpoints go to the smaller.
inline std::size_t nearest_power_index(const PowerSet& powers, double x) {
  std::size_t best = 0;
  double best_dist = std::abs(powers[0] - x);
  for (std::size_t k = 1; k < powers.size(); ++k) {
    const double dist = std::abs(powers[k] - x);
    if (dist < best_dist) {
      best_dist = dist;
      best = k;
    }
  }
  return best;
}

/// min over the power set of k_slope * p - s(p, i_ref) * drop_cost: the
/// backlog-free part of the deadline trend for a linear power price.
inline double trend_offset(const SystemSpec& spec, double k_slope, double i_level) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < spec.powers.size(); ++a) {
    const double p = spec.powers[a];
    m = std::min(m, k_slope * p - spec.success(p, i_level) * spec.costs.drop_cost);
  }
  return m;
}

}  // namespace detail

/// Backlog-only heuristic power: the continuous one-step-lookahead minimizer
/// evaluated at the reference interference, snapped to the nearest member of
/// the power set. Needs no deadline or interference knowledge.
inline double slbpc1_power(long b, const SystemSpec& spec, double k_slope, double i_ref,
                           const ConcaveEnvelope* env = nullptr) {
  if (b < 1) throw std::invalid_argument("slbpc1_power: backlog must be at least 1");
  const double m = detail::trend_offset(spec, k_slope, i_ref);
  const double weight = spec.costs.drop_cost + spec.costs.backlog(b) + m;
  const double g = continuous_power(spec.success, i_ref, k_slope, weight, env);
  return spec.powers[detail::nearest_power_index(spec.powers, g)];
}

class MinPolicy final : public Policy {
 public:
  explicit MinPolicy(const SystemSpec& spec) : p_(spec.powers.min_power()) {}
  double decide(const Observation&, double) override { return p_; }

 private:
  double p_;
};

class MaxPolicy final : public Policy {
 public:
  explicit MaxPolicy(const SystemSpec& spec) : p_(spec.powers.max_power()) {}
  double decide(const Observation&, double) override { return p_; }

 private:
  double p_;
};

/// Bernoulli mixture of the extremes, redrawn every slot: min power with
/// probability alpha, max power otherwise.
class AvgPolicy final : public Policy {
 public:
  AvgPolicy(const SystemSpec& spec, double alpha)
      : pmin_(spec.powers.min_power()), pmax_(spec.powers.max_power()), alpha_(alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("avg: alpha must lie in [0, 1]");
  }
  double decide(const Observation&, double u) override { return u < alpha_ ? pmin_ : pmax_; }

 private:
  double pmin_, pmax_;
  double alpha_;
};

/// Table lookup of a solved policy. Backlogs above the solved range clamp to
/// the top row; anything else out of range is a caller bug and throws.
class TablePolicy final : public Policy {
 public:
  explicit TablePolicy(const PolicyTable* table) : table_(table) {
    if (table_ == nullptr) throw std::invalid_argument("table policy needs a solved table");
  }
  double decide(const Observation& obs, double) override {
    const long b = std::min(obs.backlog, table_->B);
    return table_->power_at(b, obs.residual_deadline, obs.interference_index);
  }

 private:
  const PolicyTable* table_;
};

class Slbpc1Policy final : public Policy {
 public:
  Slbpc1Policy(const SystemSpec& spec, double k_slope, double i_ref)
      : spec_(&spec), k_slope_(k_slope), i_ref_(i_ref) {
    if (!(k_slope > 0.0)) throw std::invalid_argument("slbpc1: k_slope must be > 0");
    if (spec.success.family == SuccessFamily::sigmoidal)
      env_ = concave_envelope(spec.success, i_ref);
  }
  double decide(const Observation& obs, double) override {
    return slbpc1_power(obs.backlog, *spec_, k_slope_, i_ref_, env_ ? &*env_ : nullptr);
  }

 private:
  const SystemSpec* spec_;
  double k_slope_, i_ref_;
  std::optional<ConcaveEnvelope> env_;
};

/// Refinement of the backlog-only heuristic: each new head-of-line packet
/// starts at the backlog-driven level, then every failed attempt drifts the
/// level one step up or down with probability p_change, in the direction of
/// the deadline trend's sign at the observed interference level (zero counts
/// as positive). The walk saturates at the ends of the power set.
class Slbpc2Policy final : public Policy {
 public:
  Slbpc2Policy(const SystemSpec& spec, double k_slope, double i_ref, double p_change)
      : spec_(&spec), k_slope_(k_slope), i_ref_(i_ref), p_change_(p_change) {
    if (!(k_slope > 0.0)) throw std::invalid_argument("slbpc2: k_slope must be > 0");
    if (p_change < 0.0 || p_change > 1.0)
      throw std::invalid_argument("slbpc2: p_change must lie in [0, 1]");
    if (spec.success.family == SuccessFamily::sigmoidal)
      env_ = concave_envelope(spec.success, i_ref);
    trend_by_level_.reserve(spec.interference.size());
    for (double level : spec.interference.levels)
      trend_by_level_.push_back(detail::trend_offset(spec, k_slope, level));
  }

  double decide(const Observation& obs, double u) override {
    if (obs.residual_deadline == spec_->D || current_ < 0) {
      // A packet reaches the head of the line with a full deadline exactly
      // once; sample the backlog now and restart the walk from its level.
      const double g = slbpc1_power(obs.backlog, *spec_, k_slope_, i_ref_,
                                    env_ ? &*env_ : nullptr);
      current_ = static_cast<int>(spec_->powers.index_of(g));
      return spec_->powers[static_cast<std::size_t>(current_)];
    }
    // Reaching here means the previous attempt of this packet failed.
    const double f =
        spec_->costs.backlog(obs.backlog) +
        trend_by_level_[static_cast<std::size_t>(obs.interference_index)];
    const int dir = f >= 0.0 ? +1 : -1;
    if (u < p_change_) {
      const int next = current_ + dir;
      if (next >= 0 && next < static_cast<int>(spec_->powers.size())) current_ = next;
    }
    return spec_->powers[static_cast<std::size_t>(current_)];
  }

  void reset() override { current_ = -1; }

  int current_index() const { return current_; }

 private:
  const SystemSpec* spec_;
  double k_slope_, i_ref_, p_change_;
  std::optional<ConcaveEnvelope> env_;
  std::vector<double> trend_by_level_;
  int current_ = -1;
};

/// Instantiates the controller named by the config. Table policies borrow the
/// solved table, which must outlive them.
inline std::unique_ptr<Policy> make_policy(const PolicyConfig& cfg, const SystemSpec& spec,
                                           const PolicyTable* table = nullptr) {
  const double i_ref = cfg.i_ref.value_or(
      *std::min_element(spec.interference.levels.begin(), spec.interference.levels.end()));
  if (cfg.kind == "min") return std::make_unique<MinPolicy>(spec);
  if (cfg.kind == "max") return std::make_unique<MaxPolicy>(spec);
  if (cfg.kind == "avg") return std::make_unique<AvgPolicy>(spec, cfg.alpha);
  if (cfg.kind == "table") return std::make_unique<TablePolicy>(table);
  if (cfg.kind == "slbpc1") return std::make_unique<Slbpc1Policy>(spec, cfg.k_slope, i_ref);
  if (cfg.kind == "slbpc2")
    return std::make_unique<Slbpc2Policy>(spec, cfg.k_slope, i_ref,
                                          cfg.p_change.value_or(1.0 / (2.0 * spec.D)));
  throw std::invalid_argument("unknown policy kind: " + cfg.kind);
}

}  // namespace holpower
