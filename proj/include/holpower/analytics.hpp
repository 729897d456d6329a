#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "holpower/dp.hpp"
#include "holpower/model.hpp"

namespace holpower {

namespace detail {

/// min over the power set of C_p(p) - s(p, i) * weight, with the shared
/// smallest-power tie-break. Returns {value, index}.
inline std::pair<double, std::size_t> best_response(const SystemSpec& spec, double i_level,
                                                    double weight) {
  return min_smallest_tie(spec.powers.size(), [&](std::size_t a) {
    const double p = spec.powers[a];
    return spec.costs.power(p, a) - spec.success(p, i_level) * weight;
  });
}

}  // namespace detail

/// Semi-analytic quantities for a fixed interference level: the per-deadline
/// value increments delta(b, d), their running sums sigma(b, d), and the
/// zero-input operator values tb0(b) whose sign separates backlogs where the
/// optimal power rises toward the deadline from those where it falls.
struct SigmaTable {
  long B = 0;
  int D = 0;
  double fixed_level = 1.0;
  std::vector<double> delta_;  ///< (b, d) for b in 1..B, d in 1..D
  std::vector<double> sigma_;  ///< (b, d) for b in 1..B, d in 0..D
  std::vector<double> tb0_;    ///< b in 1..B

  double delta(long b, int d) const { return delta_[idx(b, d, D, 1)]; }
  double sigma(long b, int d) const { return sigma_[idx(b, d, D + 1, 0)]; }
  double tb0(long b) const { return tb0_[static_cast<std::size_t>(b - 1)]; }

 private:
  std::size_t idx(long b, int d, int width, int dmin) const {
    if (b < 1 || b > B || d < dmin || d > D) throw std::out_of_range("SigmaTable: out of range");
    return static_cast<std::size_t>(b - 1) * width + static_cast<std::size_t>(d - dmin);
  }
  friend SigmaTable build_sigma(const SystemSpec&, double);
};

/// The one-deadline-step operator T_b(x) = x + C_b(b) + min_p {C_p(p) -
/// s(p, i)(C_d + x)}; sigma(b, d) = T_b(sigma(b, d - 1)) with sigma(b, 0) = 0.
inline double t_operator(const SystemSpec& spec, double i_level, long b, double x) {
  return x + spec.costs.backlog(b) +
         detail::best_response(spec, i_level, spec.costs.drop_cost + x).first;
}

inline SigmaTable build_sigma(const SystemSpec& spec, double i_level) {
  spec.validate();
  if (!(i_level > 0.0)) throw std::invalid_argument("build_sigma: interference level must be > 0");
  SigmaTable st;
  st.B = spec.B;
  st.D = spec.D;
  st.fixed_level = i_level;
  st.delta_.assign(static_cast<std::size_t>(spec.B) * spec.D, 0.0);
  st.sigma_.assign(static_cast<std::size_t>(spec.B) * (spec.D + 1), 0.0);
  st.tb0_.assign(static_cast<std::size_t>(spec.B), 0.0);
  const double m = detail::best_response(spec, i_level, spec.costs.drop_cost).first;
  for (long b = 1; b <= spec.B; ++b) {
    st.tb0_[static_cast<std::size_t>(b - 1)] = spec.costs.backlog(b) + m;
    double sigma = 0.0;
    for (int d = 1; d <= spec.D; ++d) {
      const double delta =
          spec.costs.backlog(b) +
          detail::best_response(spec, i_level, spec.costs.drop_cost + sigma).first;
      sigma += delta;
      st.delta_[st.idx(b, d, spec.D, 1)] = delta;
      st.sigma_[st.idx(b, d, spec.D + 1, 0)] = sigma;
    }
  }
  return st;
}

/// Convenience overload for specs with a single interference state.
inline SigmaTable build_sigma(const SystemSpec& spec) {
  if (spec.interference.size() != 1)
    throw std::invalid_argument("build_sigma: designate a level when the chain has several states");
  return build_sigma(spec, spec.interference.levels.front());
}

/// Optimal policy written without the cost-to-go: the smallest minimizer of
/// C_p(p) - s(p, i)(C_d + sigma(b, d - 1)) at every (b, d). Single
/// interference state.
inline PolicyTable semi_analytic_policy(const SigmaTable& st, const SystemSpec& spec) {
  if (st.B != spec.B || st.D != spec.D)
    throw std::invalid_argument("semi_analytic_policy: table dimensions do not match the spec");
  PolicyTable pol(spec.B, spec.D, 1, spec.powers.levels);
  for (long b = 1; b <= spec.B; ++b)
    for (int d = 1; d <= spec.D; ++d) {
      const double weight = spec.costs.drop_cost + (d > 1 ? st.sigma(b, d - 1) : 0.0);
      pol.index_at(b, d, 0) = static_cast<int>(detail::best_response(spec, st.fixed_level, weight).second);
    }
  return pol;
}

/// Largest absolute violation of the value-increment identities
///   J(b, 1) = C_d + J(b - 1, D) + delta(b, 1)
///   J(b, d) = J(b, d - 1) + delta(b, d)       for d > 1
/// over all states of a single-interference-state instance.
inline double check_value_increments(const SystemSpec& spec, const ValueTable& v, const SigmaTable& st) {
  if (spec.interference.size() != 1)
    throw std::invalid_argument("check_value_increments: needs a single interference state");
  if (v.B != spec.B || v.D != spec.D || v.I != 1 || st.B != spec.B || st.D != spec.D)
    throw std::invalid_argument("check_value_increments: table dimensions do not match the spec");
  double worst = 0.0;
  for (long b = 1; b <= spec.B; ++b) {
    worst = std::max(worst, std::abs(v.at(b, 1, 0) - (spec.costs.drop_cost +
                                                      v.at(b - 1, spec.D, 0) + st.delta(b, 1))));
    for (int d = 2; d <= spec.D; ++d)
      worst = std::max(worst, std::abs(v.at(b, d, 0) - (v.at(b, d - 1, 0) + st.delta(b, d))));
  }
  return worst;
}

/// Case-matched affine-in-C_b(b) envelopes around sigma(b, d). The case is
/// picked by the sign of tb0(b); when it is exactly zero sigma is identically
/// zero and the bounds collapse.
struct SigmaBounds {
  double m = 0.0, M = 0.0;
  double s_min = 0.0, s_max = 0.0;
  long B = 0;
  int D = 0;
  std::vector<double> lower, upper;  ///< (b, d) for b in 1..B, d in 1..D

  double lower_at(long b, int d) const { return lower[idx(b, d)]; }
  double upper_at(long b, int d) const { return upper[idx(b, d)]; }

  std::size_t idx(long b, int d) const {
    if (b < 1 || b > B || d < 1 || d > D) throw std::out_of_range("SigmaBounds: out of range");
    return static_cast<std::size_t>(b - 1) * D + static_cast<std::size_t>(d - 1);
  }
};

/// sum_{k=0}^{d-1} q^k, accumulated term by term (valid at q = 1).
inline double partial_geom(double q, int d) {
  double sum = 0.0, term = 1.0;
  for (int k = 0; k < d; ++k) {
    sum += term;
    term *= q;
  }
  return sum;
}

inline SigmaBounds sigma_bounds(const SigmaTable& st, const SystemSpec& spec) {
  SigmaBounds sb;
  sb.B = st.B;
  sb.D = st.D;
  sb.lower.assign(static_cast<std::size_t>(st.B) * st.D, 0.0);
  sb.upper.assign(static_cast<std::size_t>(st.B) * st.D, 0.0);
  double m = std::numeric_limits<double>::infinity();
  double M = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < spec.powers.size(); ++a) {
    const double p = spec.powers[a];
    const double r =
        spec.costs.power(p, a) - spec.success(p, st.fixed_level) * spec.costs.drop_cost;
    m = std::min(m, r);
    M = std::max(M, r);
  }
  sb.m = m;
  sb.M = M;
  sb.s_min = spec.success(spec.powers.min_power(), st.fixed_level);
  sb.s_max = spec.success(spec.powers.max_power(), st.fixed_level);
  for (long b = 1; b <= st.B; ++b) {
    const double cb = spec.costs.backlog(b);
    const double t0 = st.tb0(b);
    for (int d = 1; d <= st.D; ++d) {
      const std::size_t k = sb.idx(b, d);
      if (t0 > 0.0) {
        sb.lower[k] = (cb + m) * partial_geom(1.0 - sb.s_max, d);
        sb.upper[k] = (cb + M) * partial_geom(1.0 - sb.s_min, d);
      } else if (t0 < 0.0) {
        sb.lower[k] = (cb + m) * partial_geom(1.0 - sb.s_min, d);
        sb.upper[k] = (cb + M) * partial_geom(1.0 - sb.s_max, d);
      } else {
        sb.lower[k] = 0.0;
        sb.upper[k] = 0.0;
      }
    }
  }
  return sb;
}

/// Smallest concave majorant of a proper sigmoidal success curve at a fixed
/// interference level: linear with slope k_ccv from (0, s(0, i)) up to the
/// tangency point p_star, then the curve itself.
struct ConcaveEnvelope {
  double p_star = 0.0;
  double k_ccv = 0.0;
  double s0 = 0.0;
  double i_level = 1.0;
  SuccessFunction base;

  double operator()(double p) const {
    return p < p_star ? k_ccv * p + s0 : base(p, i_level);
  }

  double derivative(double p) const {
    return p < p_star ? k_ccv : base.derivative(p, i_level);
  }
};

/// Finds the tangency point by bisection on the residual
///   r(p) = s'(p, i) * p - (s(p, i) - s(0, i)),
/// which is positive on the convex stretch and crosses zero once beyond it.
inline ConcaveEnvelope concave_envelope(const SuccessFunction& s, double i_level) {
  if (s.family != SuccessFamily::sigmoidal)
    throw std::invalid_argument("concave_envelope: success function must be sigmoidal");
  s.validate();
  const double s0 = s(0.0, i_level);
  auto residual = [&](double p) { return s.derivative(p, i_level) * p - (s(p, i_level) - s0); };

  // The family's inflection point is explicit: s'' changes sign where
  // exp(-beta0 p / i + beta1) = 2 / beta2. A curve with no convex stretch
  // (inflection at or below zero) has a degenerate envelope and is rejected.
  const double p_infl = (s.beta1 + std::log(s.beta2 / 2.0)) * i_level / s.beta0;
  if (!(p_infl > 0.0) || !(residual(std::max(p_infl, 1e-9)) > 0.0))
    throw std::runtime_error("concave_envelope: curve is not convex near zero (malformed sigmoid)");
  // The residual rises on the convex stretch and falls beyond it, so the
  // tangency root sits right of the inflection; bracket it there.
  double lo = std::max(p_infl, 1e-9);
  double hi = std::max(1.0, 2.0 * lo);
  int grow = 0;
  while (residual(hi) > 0.0) {
    hi *= 2.0;
    if (++grow > 200)
      throw std::runtime_error("concave_envelope: tangency root not bracketed (malformed sigmoid)");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (std::abs(r) <= 1e-10) break;
    if (r > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  ConcaveEnvelope env;
  env.p_star = mid;
  env.k_ccv = s.derivative(mid, i_level);
  env.s0 = s0;
  env.i_level = i_level;
  env.base = s;
  return env;
}

/// Continuous-power minimizer of k_slope * p - s(p, i_ref) * weight over
/// p >= 0. Concave families solve the stationarity condition in closed form;
/// sigmoidal ones use the concave envelope's derivative, which makes the
/// condition sufficient without changing the minimum. A non-positive weight,
/// or one too small to beat the power price, clamps to zero.
inline double continuous_power(const SuccessFunction& s, double i_ref, double k_slope,
                               double weight, const ConcaveEnvelope* env = nullptr) {
  if (!(k_slope > 0.0)) throw std::invalid_argument("continuous_power: k_slope must be > 0");
  if (!(i_ref > 0.0)) throw std::invalid_argument("continuous_power: i_ref must be > 0");
  if (weight <= 0.0) return 0.0;
  switch (s.family) {
    case SuccessFamily::exponential: {
      const double ci = s.scale * i_ref;
      const double arg = weight / (k_slope * ci);
      return arg <= 1.0 ? 0.0 : ci * std::log(arg);
    }
    case SuccessFamily::ratio: {
      const double g = std::sqrt(i_ref * weight / k_slope) - i_ref;
      return g > 0.0 ? g : 0.0;
    }
    case SuccessFamily::sigmoidal: {
      ConcaveEnvelope local;
      if (env == nullptr) {
        local = concave_envelope(s, i_ref);
        env = &local;
      }
      const double target = k_slope / weight;
      if (target >= env->k_ccv) return 0.0;
      // s' decreases monotonically past the tangency point; bracket and bisect.
      double lo = env->p_star;
      double hi = std::max(1.0, 2.0 * env->p_star);
      int grow = 0;
      while (s.derivative(hi, i_ref) > target) {
        hi *= 2.0;
        if (++grow > 200)
          throw std::runtime_error("continuous_power: stationarity root not bracketed");
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (s.derivative(mid, i_ref) > target)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

/// Continuous relaxation of the semi-analytic minimizer at (b, d), using
/// sigma(b, d - 1) from the table. Requires a linear power cost.
inline double gamma(const SigmaTable& st, const SystemSpec& spec, long b, int d, double i_ref,
                    double k_slope) {
  if (spec.costs.power_cost.form != CostForm::linear)
    throw std::invalid_argument("gamma: power cost must be linear");
  if (b < 1 || b > st.B || d < 1 || d > st.D) throw std::out_of_range("gamma: (b, d) out of range");
  const double sigma_prev = d > 1 ? st.sigma(b, d - 1) : 0.0;
  return continuous_power(spec.success, i_ref, k_slope, spec.costs.drop_cost + sigma_prev);
}

}  // namespace holpower
