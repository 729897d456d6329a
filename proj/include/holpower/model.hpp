#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace holpower {

/// Finite set of transmit power levels, stored strictly ascending.
struct PowerSet {
  std::vector<double> levels;

  std::size_t size() const { return levels.size(); }
  double operator[](std::size_t k) const { return levels[k]; }
  double min_power() const { return levels.front(); }
  double max_power() const { return levels.back(); }

  /// Index of an exact member of the set; throws if p is not a member.
  std::size_t index_of(double p) const {
    auto it = std::lower_bound(levels.begin(), levels.end(), p);
    if (it == levels.end() || *it != p)
      throw std::invalid_argument("power " + std::to_string(p) +
                                  " is not a member of the power set");
    return static_cast<std::size_t>(it - levels.begin());
  }

  void validate() const {
    if (levels.empty()) throw std::invalid_argument("power set must be non-empty");
    if (levels.front() < 0.0)
      throw std::invalid_argument("power levels must be non-negative");
    for (std::size_t k = 1; k < levels.size(); ++k)
      if (!(levels[k] > levels[k - 1]))
        throw std::invalid_argument("power levels must be strictly ascending");
  }
};

enum class CostForm { linear, table };

/// A declarable cost curve: slope * x, or an explicit non-decreasing table.
struct CostCurve {
  CostForm form = CostForm::linear;
  double slope = 1.0;
  std::vector<double> values;
};

struct CostModel {
  CostCurve power_cost;    ///< table entries align with the power set
  CostCurve backlog_cost;  ///< table entries cover backlogs 1..n; beyond n clamps to the last entry
  double drop_cost = 0.0;

  double power(double p, std::size_t power_index) const {
    if (power_cost.form == CostForm::linear) return power_cost.slope * p;
    return power_cost.values[power_index];
  }

  double backlog(long b) const {
    if (b <= 0) return 0.0;
    if (backlog_cost.form == CostForm::linear)
      return backlog_cost.slope * static_cast<double>(b);
    const auto& t = backlog_cost.values;
    const std::size_t k = static_cast<std::size_t>(b - 1);
    return k < t.size() ? t[k] : t.back();
  }
};

enum class SuccessFamily { ratio, exponential, sigmoidal };

/// Transmission success probability s(p, i): non-decreasing in the power p,
/// valued in [0, 1] for every interference level i > 0.
///
///   ratio        s = p / (p + i)
///   exponential  s = 1 - exp(-p / (scale * i))
///   sigmoidal    s = (1 - exp(-beta0 * p / i + beta1) / 2) ^ beta2
struct SuccessFunction {
  SuccessFamily family = SuccessFamily::exponential;
  double scale = 1.0;                          ///< exponential only
  double beta0 = 1.0, beta1 = 0.0, beta2 = 1.0;  ///< sigmoidal only

  double operator()(double p, double i) const {
    switch (family) {
      case SuccessFamily::ratio: return p / (p + i);
      case SuccessFamily::exponential: return 1.0 - std::exp(-p / (scale * i));
      case SuccessFamily::sigmoidal: return std::pow(sigmoid_base(p, i), beta2);
    }
    return 0.0;
  }

  /// ds/dp at fixed interference; each family ships its closed form.
  double derivative(double p, double i) const {
    switch (family) {
      case SuccessFamily::ratio: return i / ((p + i) * (p + i));
      case SuccessFamily::exponential: return std::exp(-p / (scale * i)) / (scale * i);
      case SuccessFamily::sigmoidal:
        return beta2 * std::pow(sigmoid_base(p, i), beta2 - 1.0) * 0.5 * (beta0 / i) *
               std::exp(-beta0 * p / i + beta1);
    }
    return 0.0;
  }

  void validate() const {
    switch (family) {
      case SuccessFamily::ratio: break;
      case SuccessFamily::exponential:
        if (!(scale > 0.0))
          throw std::invalid_argument("exponential success function needs scale > 0");
        break;
      case SuccessFamily::sigmoidal:
        if (!(beta0 > 0.0) || beta1 < 0.0 || !(beta2 > 0.0))
          throw std::invalid_argument(
              "sigmoidal success function needs beta0 > 0, beta1 >= 0, beta2 > 0");
        // s(0, i) = (1 - exp(beta1)/2)^beta2 must be a probability.
        if (0.5 * std::exp(beta1) > 1.0)
          throw std::invalid_argument(
              "sigmoidal success function needs beta1 <= ln 2, otherwise s(0, i) < 0");
        break;
    }
  }

 private:
  double sigmoid_base(double p, double i) const {
    return 1.0 - 0.5 * std::exp(-beta0 * p / i + beta1);
  }
};

inline double success_prob(const SuccessFunction& s, double p, double i) { return s(p, i); }

/// Finite-state Markov interference process over positive physical levels.
/// subslots_per_slot > 1 makes the chain tick faster than the power updates;
/// the transmitter observes only the first sub-slot value of each time slot.
struct InterferenceChain {
  std::vector<double> levels;
  std::vector<std::vector<double>> transition;  ///< row-stochastic, levels.size() square
  int subslots_per_slot = 1;

  std::size_t size() const { return levels.size(); }

  /// Next state by CDF inversion of row `from` against a uniform draw.
  int step(int from, double u) const {
    const auto& row = transition[static_cast<std::size_t>(from)];
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < row.size(); ++j) {
      acc += row[j];
      if (u < acc) return static_cast<int>(j);
    }
    return static_cast<int>(row.size()) - 1;
  }

  /// Stationary distribution, by direct Gaussian elimination on P' x = x
  /// with the normalization sum(x) = 1 replacing the last equation.
  std::vector<double> stationary() const {
    const std::size_t n = levels.size();
    if (n == 1) return {1.0};
    // Rows 0..n-2: sum_i pi_i (P[i][j] - delta_ij) = 0; row n-1: sum_i pi_i = 1.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t j = 0; j + 1 < n; ++j) {
      for (std::size_t i = 0; i < n; ++i)
        a[j][i] = transition[i][j] - (i == j ? 1.0 : 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) a[n - 1][i] = 1.0;
    a[n - 1][n] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
      std::swap(a[col], a[pivot]);
      if (a[col][col] == 0.0)
        throw std::runtime_error("interference chain has no unique stationary distribution");
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = a[r][col] / a[col][col];
        for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
      }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
    return pi;
  }

  void validate() const {
    if (levels.empty()) throw std::invalid_argument("interference chain needs at least one level");
    for (double v : levels)
      if (!(v > 0.0)) throw std::invalid_argument("interference levels must be strictly positive");
    if (transition.size() != levels.size())
      throw std::invalid_argument("transition matrix must be square with one row per level");
    for (std::size_t i = 0; i < transition.size(); ++i) {
      const auto& row = transition[i];
      if (row.size() != levels.size())
        throw std::invalid_argument("transition row " + std::to_string(i + 1) + " has wrong length");
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0 || p > 1.0)
          throw std::invalid_argument("transition probabilities must lie in [0, 1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("transition row " + std::to_string(i + 1) +
                                    " sums to " + std::to_string(sum) + ", expected 1");
    }
    if (subslots_per_slot < 1)
      throw std::invalid_argument("subslots_per_slot must be a positive integer");
  }
};

/// A complete problem instance.
struct SystemSpec {
  long B = 1;  ///< initial backlog
  int D = 1;   ///< attempts allowed per head-of-line packet
  PowerSet powers;
  CostModel costs;
  SuccessFunction success;
  InterferenceChain interference;
  double arrival_prob = 0.0;

  void validate() const {
    if (B < 1) throw std::invalid_argument("B must be at least 1");
    if (D < 1) throw std::invalid_argument("D must be at least 1");
    powers.validate();
    success.validate();
    interference.validate();
    if (arrival_prob < 0.0 || arrival_prob > 1.0)
      throw std::invalid_argument("arrival_prob must lie in [0, 1]");
    if (costs.drop_cost < 0.0) throw std::invalid_argument("drop cost must be non-negative");
    validate_curve(costs.power_cost, powers.size(), "power cost");
    validate_curve(costs.backlog_cost, 0, "backlog cost");
  }

 private:
  static void validate_curve(const CostCurve& c, std::size_t required_len, const char* what) {
    if (c.form == CostForm::linear) {
      if (c.slope < 0.0)
        throw std::invalid_argument(std::string(what) + " slope must be non-negative");
      return;
    }
    if (c.values.empty())
      throw std::invalid_argument(std::string(what) + " table must be non-empty");
    if (required_len != 0 && c.values.size() != required_len)
      throw std::invalid_argument(std::string(what) + " table length must match the power set");
    if (c.values.front() < 0.0)
      throw std::invalid_argument(std::string(what) + " must be non-negative");
    for (std::size_t k = 1; k < c.values.size(); ++k)
      if (c.values[k] < c.values[k - 1])
        throw std::invalid_argument(std::string(what) + " table must be non-decreasing");
  }
};

/// System state. backlog == 0 is terminal regardless of the other fields.
struct State {
  long backlog = 0;
  int residual_deadline = 1;
  int interference_index = 0;

  bool terminal() const { return backlog == 0; }
};

/// Cost charged in one slot: nothing at the terminal state, otherwise the
/// power and holding costs, plus the drop penalty when the final attempt
/// of a packet fails.
inline double stage_cost(const SystemSpec& spec, const State& st, std::size_t power_index,
                         bool success) {
  if (st.backlog == 0) return 0.0;
  double g = spec.costs.power(spec.powers[power_index], power_index) +
             spec.costs.backlog(st.backlog);
  if (!success && st.residual_deadline == 1) g += spec.costs.drop_cost;
  return g;
}

inline double stage_cost(const SystemSpec& spec, const State& st, double power, bool success) {
  if (st.backlog == 0) return 0.0;
  return stage_cost(spec, st, spec.powers.index_of(power), success);
}

/// One-slot transition. A success or an expired deadline moves the next
/// packet to the head of the line with a fresh deadline; any other failure
/// burns one attempt.
inline State step(const SystemSpec& spec, const State& st, bool success, int next_interference) {
  if (st.backlog == 0) throw std::logic_error("step: state is terminal");
  if (success || st.residual_deadline == 1)
    return State{st.backlog - 1, spec.D, next_interference};
  return State{st.backlog, st.residual_deadline - 1, next_interference};
}

}  // namespace holpower
