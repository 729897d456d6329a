#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "holpower/policies.hpp"
#include "holpower/rng.hpp"

using namespace holpower;

namespace {

SystemSpec two_level_spec() {
  SystemSpec spec;
  spec.B = 20;
  spec.D = 5;
  spec.powers.levels = {2.0, 4.0, 6.0};
  spec.costs.power_cost = {CostForm::linear, 1.0, {}};
  spec.costs.backlog_cost = {CostForm::linear, 1.0, {}};
  spec.costs.drop_cost = 10.0;
  spec.success.family = SuccessFamily::exponential;
  spec.success.scale = 1.0;
  spec.interference.levels = {1.0, 2.0};
  spec.interference.transition = {{0.5, 0.5}, {0.5, 0.5}};
  return spec;
}

}  // namespace

TEST_CASE("benchmark controllers return the extremes") {
  const SystemSpec spec = two_level_spec();
  MinPolicy mn(spec);
  MaxPolicy mx(spec);
  const Observation obs{7, 3, 1};
  CHECK(mn.decide(obs, 0.9) == 2.0);
  CHECK(mx.decide(obs, 0.1) == 6.0);
}

TEST_CASE("the coin-flip controller collapses at the ends of alpha") {
  const SystemSpec spec = two_level_spec();
  const Observation obs{3, 2, 0};
  AvgPolicy all_min(spec, 1.0);
  AvgPolicy all_max(spec, 0.0);
  std::mt19937_64 rng(7);
  for (int n = 0; n < 1000; ++n) {
    const double u = uniform01(rng);
    CHECK(all_min.decide(obs, u) == 2.0);
    CHECK(all_max.decide(obs, u) == 6.0);
  }
}

TEST_CASE("the coin-flip controller hits its long-run average") {
  const SystemSpec spec = two_level_spec();
  const double alpha = 0.3;
  AvgPolicy avg(spec, alpha);
  std::mt19937_64 rng(424242);
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += avg.decide(Observation{1, 1, 0}, uniform01(rng));
  const double mean = sum / n;
  const double expected = alpha * 2.0 + (1.0 - alpha) * 6.0;
  const double se = (6.0 - 2.0) * std::sqrt(alpha * (1.0 - alpha) / n);
  CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("table lookups clamp the backlog and reject bad coordinates") {
  const SystemSpec spec = two_level_spec();
  PolicyTable table(spec.B, spec.D, 2, spec.powers.levels);
  for (long b = 1; b <= spec.B; ++b)
    for (int d = 1; d <= spec.D; ++d)
      for (int i = 0; i < 2; ++i) table.index_at(b, d, i) = static_cast<int>((b + d + i) % 3);
  TablePolicy pol(&table);
  CHECK(pol.decide(Observation{3, 2, 1}, 0.0) == table.power_at(3, 2, 1));
  // backlogs above the solved range reuse the top row
  CHECK(pol.decide(Observation{500, 2, 1}, 0.0) == table.power_at(spec.B, 2, 1));
  CHECK_THROWS_AS(pol.decide(Observation{3, spec.D + 1, 0}, 0.0), std::out_of_range);
  CHECK_THROWS_AS(make_policy(PolicyConfig{"table", 0.5, 1.0, {}, {}}, spec, nullptr),
                  std::invalid_argument);
}

TEST_CASE("backlog-only heuristic snaps the relaxed power to the grid") {
  SECTION("moderate-penalty instance lands on the lowest level") {
    SystemSpec spec = two_level_spec();
    spec.interference.levels = {2.0};
    spec.interference.transition = {{1.0}};
    // relaxed power at unit reference interference is ln(20 + m) ~ 2.59
    CHECK(slbpc1_power(10, spec, 1.0, 1.0) == 2.0);
  }
  SECTION("exact midpoints resolve to the smaller power") {
    SystemSpec spec;
    spec.B = 5;
    spec.D = 3;
    spec.powers.levels = {2.0, 4.0};
    spec.costs.power_cost = {CostForm::linear, 1.0, {}};
    spec.costs.backlog_cost = {CostForm::table, 0.0, {11.5}};
    spec.costs.drop_cost = 7.5;
    spec.success.family = SuccessFamily::ratio;
    spec.interference.levels = {1.0};
    spec.interference.transition = {{1.0}};
    // ratio family at i_ref = 1, k = 1: relaxed power sqrt(weight) - 1 with
    // weight = 7.5 + 11.5 + min{2 - 5, 4 - 6} = 16, i.e. exactly 3
    CHECK(slbpc1_power(1, spec, 1.0, 1.0) == 2.0);
  }
  SECTION("a clamped relaxation picks the minimum power") {
    SystemSpec spec = two_level_spec();
    spec.interference.levels = {2.0};
    spec.interference.transition = {{1.0}};
    CHECK(slbpc1_power(1, spec, 1000.0, 1.0) == 2.0);
  }
  SECTION("backlog below one is rejected") {
    const SystemSpec spec = two_level_spec();
    CHECK_THROWS_AS(slbpc1_power(0, spec, 1.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("drifting controller defaults and saturating walks") {
  SECTION("default drift probability is 1/(2D)") {
    const SystemSpec spec = two_level_spec();  // D = 5
    auto pol = make_policy(PolicyConfig{"slbpc2", 0.5, 1.0, {}, {}}, spec);
    pol->reset();
    // fresh packet at d = D fixes the walk's start; at backlog 10 and the low
    // interference state the trend is positive, so failures push upward
    const double start = pol->decide(Observation{10, 5, 0}, 0.5);
    const std::size_t start_idx = spec.powers.index_of(start);
    REQUIRE(start_idx + 1 < spec.powers.size());
    // u just below 1/(2D) moves the level, u at exactly 1/(2D) does not
    const double up = pol->decide(Observation{10, 4, 0}, 0.0999);
    CHECK(spec.powers.index_of(up) == start_idx + 1);
    const double stay = pol->decide(Observation{10, 3, 0}, 0.1);
    CHECK(spec.powers.index_of(stay) == start_idx + 1);
  }

  SECTION("positive trend walks up and saturates at the top") {
    SystemSpec spec = two_level_spec();
    spec.costs.drop_cost = 1.0;  // trend offset stays positive
    Slbpc2Policy pol(spec, 1.0, 1.0, 1.0 / (2.0 * spec.D));
    pol.reset();
    std::mt19937_64 rng(55);
    double power = pol.decide(Observation{10, spec.D, 0}, uniform01(rng));
    std::size_t idx = spec.powers.index_of(power);
    for (int n = 0; n < 10000; ++n) {
      power = pol.decide(Observation{10, 2, 0}, uniform01(rng));
      const std::size_t next = spec.powers.index_of(power);
      REQUIRE(next >= idx);
      idx = next;
    }
    CHECK(idx == spec.powers.size() - 1);
  }

  SECTION("negative trend walks down and saturates at the bottom") {
    SystemSpec spec = two_level_spec();
    spec.costs.drop_cost = 100.0;  // trend offset strongly negative
    Slbpc2Policy pol(spec, 1.0, 2.0, 0.1);
    pol.reset();
    std::mt19937_64 rng(56);
    double power = pol.decide(Observation{1, spec.D, 1}, uniform01(rng));
    std::size_t idx = spec.powers.index_of(power);
    REQUIRE(idx > 0);  // starts above the bottom, so the walk has room
    for (int n = 0; n < 10000; ++n) {
      power = pol.decide(Observation{1, 2, 1}, uniform01(rng));
      const std::size_t next = spec.powers.index_of(power);
      REQUIRE(next <= idx);
      idx = next;
    }
    CHECK(idx == 0);
  }

  SECTION("a zero trend drifts upward") {
    SystemSpec spec;
    spec.B = 5;
    spec.D = 3;
    spec.powers.levels = {3.0, 5.0};
    spec.costs.power_cost = {CostForm::linear, 1.0, {}};
    spec.costs.backlog_cost = {CostForm::linear, 0.0, {}};
    spec.costs.drop_cost = 6.0;
    spec.success.family = SuccessFamily::ratio;
    spec.interference.levels = {3.0};
    spec.interference.transition = {{1.0}};
    // k p - s(p, 3) C_d is exactly 0 at p = 3 (s = 1/2) and 1.25 at p = 5
    Slbpc2Policy pol(spec, 1.0, 3.0, 0.5);
    pol.reset();
    REQUIRE(pol.decide(Observation{2, 3, 0}, 0.9) == 3.0);
    CHECK(pol.decide(Observation{2, 2, 0}, 0.1) == 5.0);  // moved up on the tie
    CHECK(pol.decide(Observation{2, 1, 0}, 0.1) == 5.0);  // saturated at the top
  }

  SECTION("each new head-of-line packet restarts the walk") {
    SystemSpec spec = two_level_spec();
    spec.costs.drop_cost = 1.0;
    Slbpc2Policy pol(spec, 1.0, 1.0, 1.0);
    pol.reset();
    const double start = pol.decide(Observation{10, spec.D, 0}, 0.9);
    const double drifted = pol.decide(Observation{10, spec.D - 1, 0}, 0.0);
    REQUIRE(spec.powers.index_of(drifted) == spec.powers.index_of(start) + 1);
    // deadline back at D means a fresh packet: the walk restarts
    CHECK(pol.decide(Observation{10, spec.D, 0}, 0.0) == start);
  }
}

TEST_CASE("decisions are deterministic given the draw sequence") {
  const SystemSpec spec = two_level_spec();
  const std::vector<std::string> kinds = {"min", "max", "avg", "slbpc1", "slbpc2"};
  for (const auto& kind : kinds) {
    PolicyConfig cfg;
    cfg.kind = kind;
    cfg.alpha = 0.4;
    cfg.k_slope = 2.0;
    std::vector<double> first, second;
    for (int pass = 0; pass < 2; ++pass) {
      auto pol = make_policy(cfg, spec);
      pol->reset();
      std::mt19937_64 rng(31337);
      auto& out = pass == 0 ? first : second;
      int d = spec.D;
      for (int n = 0; n < 200; ++n) {
        const Observation obs{5, d, n % 2};
        out.push_back(pol->decide(obs, uniform01(rng)));
        d = d == 1 ? spec.D : d - 1;
      }
    }
    REQUIRE(first == second);
  }
}

TEST_CASE("every decision lies in the power set") {
  const SystemSpec spec = two_level_spec();
  std::mt19937_64 rng(99);
  PolicyTable table(spec.B, spec.D, 2, spec.powers.levels);
  for (const auto& kind : {"min", "max", "avg", "slbpc1", "slbpc2", "table"}) {
    PolicyConfig cfg;
    cfg.kind = kind;
    auto pol = make_policy(cfg, spec, &table);
    pol->reset();
    for (int n = 0; n < 500; ++n) {
      const Observation obs{1 + static_cast<long>(uniform01(rng) * 30.0),
                            1 + static_cast<int>(uniform01(rng) * spec.D),
                            static_cast<int>(uniform01(rng) * 2.0)};
      const double p = pol->decide(obs, uniform01(rng));
      REQUIRE_NOTHROW(spec.powers.index_of(p));
    }
  }
}

TEST_CASE("unknown policy kinds are rejected") {
  const SystemSpec spec = two_level_spec();
  PolicyConfig cfg;
  cfg.kind = "dp";
  CHECK_THROWS_AS(make_policy(cfg, spec), std::invalid_argument);
}
