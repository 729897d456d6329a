#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "holpower/dp.hpp"
#include "holpower/oracle.hpp"

using namespace holpower;

namespace {

/// Single-state instance used throughout: powers {2, 4, 6}, unit linear
/// costs, success 1 - exp(-p/2).
SystemSpec single_state_spec(double drop_cost, long B = 20, int D = 5) {
  SystemSpec spec;
  spec.B = B;
  spec.D = D;
  spec.powers.levels = {2.0, 4.0, 6.0};
  spec.costs.power_cost = {CostForm::linear, 1.0, {}};
  spec.costs.backlog_cost = {CostForm::linear, 1.0, {}};
  spec.costs.drop_cost = drop_cost;
  spec.success.family = SuccessFamily::exponential;
  spec.success.scale = 1.0;
  spec.interference.levels = {2.0};
  spec.interference.transition = {{1.0}};
  return spec;
}

}  // namespace

TEST_CASE("one-packet one-attempt instance has a closed form") {
  SystemSpec spec = single_state_spec(7.0, 1, 1);
  spec.powers.levels = {3.0};
  const auto [v, pol] = solve(spec);
  const double s = spec.success(3.0, 2.0);
  // forced action: holding cost + power cost + miss probability times penalty
  CHECK(v.at(1, 1, 0) == Catch::Approx(1.0 + 3.0 + (1.0 - s) * 7.0).epsilon(1e-14));
  CHECK(pol.power_at(1, 1, 0) == 3.0);
}

TEST_CASE("terminal plane is identically zero and values are non-negative") {
  const SystemSpec spec = single_state_spec(10.0);
  const auto [v, pol] = solve(spec);
  (void)pol;
  for (int d = 1; d <= spec.D; ++d) CHECK(v.at(0, d, 0) == 0.0);
  for (long b = 0; b <= spec.B; ++b)
    for (int d = 1; d <= spec.D; ++d) CHECK(v.at(b, d, 0) >= 0.0);
}

TEST_CASE("cost-to-go grows with the backlog") {
  std::mt19937_64 rng(321);
  for (int n = 0; n < 20; ++n) {
    const SystemSpec spec = random_tiny_spec(rng);
    const auto [v, pol] = solve(spec);
    (void)pol;
    for (long b = 1; b <= spec.B; ++b)
      for (int d = 1; d <= spec.D; ++d)
        for (int i = 0; i < v.I; ++i) REQUIRE(v.at(b, d, i) >= v.at(b - 1, d, i) - 1e-12);
  }
}

TEST_CASE("solver matches exhaustive policy enumeration on tiny instances") {
  std::mt19937_64 rng(777001);
  for (int n = 0; n < 50; ++n) {
    const SystemSpec spec = random_tiny_spec(rng);
    const auto [v, pol] = solve(spec);
    (void)pol;
    const auto best = brute_force_values(spec);
    const int I = static_cast<int>(spec.interference.size());
    for (int i = 0; i < I; ++i) {
      const double ref = best[(static_cast<std::size_t>(spec.B - 1) * spec.D + (spec.D - 1)) * I +
                              static_cast<std::size_t>(i)];
      REQUIRE(v.at(spec.B, spec.D, i) == Catch::Approx(ref).margin(1e-9));
    }
  }
}

TEST_CASE("deadline response direction follows the drop penalty") {
  SECTION("cheap drops: power never rises toward the deadline") {
    const auto [v, pol] = solve(single_state_spec(1.0));
    (void)v;
    for (long b = 1; b <= 20; ++b)
      for (int d = 2; d <= 5; ++d) REQUIRE(pol.index_at(b, d, 0) >= pol.index_at(b, d - 1, 0));
  }
  SECTION("expensive drops: power never falls toward the deadline") {
    const auto [v, pol] = solve(single_state_spec(100.0));
    (void)v;
    for (long b = 1; b <= 20; ++b)
      for (int d = 2; d <= 5; ++d) REQUIRE(pol.index_at(b, d, 0) <= pol.index_at(b, d - 1, 0));
  }
  SECTION("chosen power never falls as the backlog grows") {
    for (double cd : {1.0, 10.0, 100.0}) {
      const auto [v, pol] = solve(single_state_spec(cd));
      (void)v;
      for (long b = 2; b <= 20; ++b)
        for (int d = 1; d <= 5; ++d) REQUIRE(pol.index_at(b, d, 0) >= pol.index_at(b - 1, d, 0));
    }
  }
}

TEST_CASE("residual is zero at the solution and positive off it") {
  const SystemSpec spec = single_state_spec(10.0, 6, 3);
  auto [v, pol] = solve(spec);
  (void)pol;
  CHECK(bellman_residual(spec, v) <= 1e-9);

  SECTION("the all-zero table is not a solution") {
    ValueTable zeros(spec.B, spec.D, 1);
    CHECK(bellman_residual(spec, zeros) > 0.1);
  }
  SECTION("perturbing one entry shows up in the residual") {
    ValueTable bumped = v;
    bumped.at(3, 2, 0) += 1.0;
    CHECK(bellman_residual(spec, bumped) >= 0.1);
  }
  SECTION("dimension mismatch is rejected") {
    ValueTable wrong(spec.B + 1, spec.D, 1);
    CHECK_THROWS_AS(bellman_residual(spec, wrong), std::invalid_argument);
    CHECK_THROWS_AS(greedy_policy(spec, wrong), std::invalid_argument);
  }
}

TEST_CASE("greedy extraction reproduces the solver's policy") {
  std::mt19937_64 rng(555);
  for (int n = 0; n < 10; ++n) {
    const SystemSpec spec = random_tiny_spec(rng);
    const auto [v, pol] = solve(spec);
    const PolicyTable greedy = greedy_policy(spec, v);
    for (long b = 1; b <= spec.B; ++b)
      for (int d = 1; d <= spec.D; ++d)
        for (int i = 0; i < v.I; ++i)
          REQUIRE(greedy.index_at(b, d, i) == pol.index_at(b, d, i));
  }
}

TEST_CASE("a singleton power set leaves no choice") {
  SystemSpec spec = single_state_spec(10.0, 4, 3);
  spec.powers.levels = {4.0};
  const auto [v, pol] = solve(spec);
  (void)v;
  for (long b = 1; b <= spec.B; ++b)
    for (int d = 1; d <= spec.D; ++d) CHECK(pol.power_at(b, d, 0) == 4.0);
}

TEST_CASE("arrivals are rejected by the solver") {
  SystemSpec spec = single_state_spec(10.0);
  spec.arrival_prob = 0.1;
  CHECK_THROWS_AS(solve(spec), std::invalid_argument);
}

TEST_CASE("markov interference enters the expectation") {
  // Two states with very different interference; solving with a chain pinned
  // to each single state must bracket the mixed-chain value at the start.
  SystemSpec mixed = single_state_spec(10.0, 4, 3);
  mixed.interference.levels = {1.0, 6.0};
  mixed.interference.transition = {{0.5, 0.5}, {0.5, 0.5}};
  const auto [vm, polm] = solve(mixed);
  (void)polm;

  SystemSpec good = mixed;
  good.interference.levels = {1.0};
  good.interference.transition = {{1.0}};
  SystemSpec bad = mixed;
  bad.interference.levels = {6.0};
  bad.interference.transition = {{1.0}};
  const auto [vg, pg] = solve(good);
  (void)pg;
  const auto [vb, pb] = solve(bad);
  (void)pb;
  CHECK(vm.at(4, 3, 0) >= vg.at(4, 3, 0) - 1e-12);
  CHECK(vm.at(4, 3, 1) <= vb.at(4, 3, 0) + 1e-12);
}
