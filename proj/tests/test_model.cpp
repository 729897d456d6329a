#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "holpower/model.hpp"
#include "holpower/rng.hpp"

using namespace holpower;

namespace {

SystemSpec basic_spec(double drop_cost = 10.0) {
  SystemSpec spec;
  spec.B = 5;
  spec.D = 4;
  spec.powers.levels = {2.0, 4.0, 6.0};
  spec.costs.power_cost = {CostForm::linear, 1.0, {}};
  spec.costs.backlog_cost = {CostForm::linear, 1.0, {}};
  spec.costs.drop_cost = drop_cost;
  spec.success.family = SuccessFamily::exponential;
  spec.success.scale = 1.0;
  spec.interference.levels = {2.0};
  spec.interference.transition = {{1.0}};
  spec.arrival_prob = 0.0;
  return spec;
}

}  // namespace

TEST_CASE("success probability families evaluate their closed forms") {
  SuccessFunction exp_s;
  exp_s.family = SuccessFamily::exponential;
  exp_s.scale = 1.0;
  CHECK(success_prob(exp_s, 0.0, 2.0) == 0.0);
  CHECK(success_prob(exp_s, 2.0, 2.0) == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));

  SuccessFunction ratio_s;
  ratio_s.family = SuccessFamily::ratio;
  CHECK(success_prob(ratio_s, 3.0, 3.0) == 0.5);
  CHECK(success_prob(ratio_s, 0.0, 1.0) == 0.0);
}

TEST_CASE("success probabilities stay in range and grow with power") {
  std::vector<SuccessFunction> families;
  {
    SuccessFunction s;
    s.family = SuccessFamily::ratio;
    families.push_back(s);
    s.family = SuccessFamily::exponential;
    s.scale = 2.0;
    families.push_back(s);
    s.family = SuccessFamily::sigmoidal;
    s.beta0 = 1.0;
    s.beta1 = 0.5;
    s.beta2 = 2.0;
    families.push_back(s);
  }
  std::mt19937_64 rng(12345);
  for (const auto& s : families) {
    s.validate();
    for (int n = 0; n < 1000; ++n) {
      const double i = 0.2 + 5.0 * uniform01(rng);
      const double p1 = 12.0 * uniform01(rng);
      const double p2 = p1 + 8.0 * uniform01(rng);
      const double s1 = success_prob(s, p1, i);
      const double s2 = success_prob(s, p2, i);
      REQUIRE(s1 >= 0.0);
      REQUIRE(s1 <= 1.0);
      REQUIRE(s2 >= s1 - 1e-15);
    }
  }
}

TEST_CASE("derivatives match difference quotients") {
  std::vector<SuccessFunction> families;
  {
    SuccessFunction s;
    s.family = SuccessFamily::ratio;
    families.push_back(s);
    s.family = SuccessFamily::exponential;
    s.scale = 1.7;
    families.push_back(s);
    s.family = SuccessFamily::sigmoidal;
    s.beta0 = 0.8;
    s.beta1 = 0.3;
    s.beta2 = 3.0;
    families.push_back(s);
  }
  for (const auto& s : families) {
    for (double p : {0.1, 0.7, 2.0, 5.0}) {
      for (double i : {0.5, 1.0, 3.0}) {
        const double h = 1e-6;
        const double fd = (s(p + h, i) - s(p - h, i)) / (2.0 * h);
        CHECK(s.derivative(p, i) == Catch::Approx(fd).margin(1e-7));
      }
    }
  }
}

TEST_CASE("stage cost follows the cost table") {
  const SystemSpec spec = basic_spec(10.0);
  CHECK(stage_cost(spec, State{0, 3, 0}, 2.0, false) == 0.0);
  CHECK(stage_cost(spec, State{3, 1, 0}, 2.0, false) == 15.0);  // 2 + 3 + 10
  CHECK(stage_cost(spec, State{3, 1, 0}, 2.0, true) == 5.0);    // no drop cost
  CHECK(stage_cost(spec, State{3, 2, 0}, 2.0, false) == 5.0);   // attempts remain
}

TEST_CASE("stage cost is never negative") {
  const SystemSpec spec = basic_spec(3.5);
  std::mt19937_64 rng(99);
  for (int n = 0; n < 500; ++n) {
    const State st{static_cast<long>(uniform01(rng) * 6.0), 1 + static_cast<int>(uniform01(rng) * 4.0), 0};
    const std::size_t a = static_cast<std::size_t>(uniform01(rng) * 3.0);
    CHECK(stage_cost(spec, st, a, uniform01(rng) < 0.5) >= 0.0);
  }
}

TEST_CASE("transitions follow the dynamics table") {
  const SystemSpec spec = basic_spec();
  SECTION("failure burns one attempt") {
    const State next = step(spec, State{5, 3, 0}, false, 0);
    CHECK(next.backlog == 5);
    CHECK(next.residual_deadline == 2);
  }
  SECTION("deadline expiry ejects the packet") {
    const State next = step(spec, State{5, 1, 0}, false, 0);
    CHECK(next.backlog == 4);
    CHECK(next.residual_deadline == spec.D);
  }
  SECTION("success departs, fresh deadline for the next packet") {
    const State next = step(spec, State{1, 2, 0}, true, 0);
    CHECK(next.backlog == 0);
    CHECK(next.terminal());
  }
  SECTION("stepping the terminal state is a contract violation") {
    CHECK_THROWS_AS(step(spec, State{0, 2, 0}, false, 0), std::logic_error);
  }
}

TEST_CASE("every trajectory drains within backlog * deadline steps") {
  const SystemSpec spec = basic_spec();
  std::mt19937_64 rng(2024);
  for (int n = 0; n < 200; ++n) {
    State st{spec.B, spec.D, 0};
    long steps = 0;
    while (!st.terminal()) {
      const State next = step(spec, st, uniform01(rng) < 0.3, 0);
      REQUIRE(next.backlog <= st.backlog);
      st = next;
      ++steps;
      REQUIRE(steps <= spec.B * spec.D);
    }
  }
}

TEST_CASE("construction rejects malformed instances") {
  SystemSpec s = basic_spec();
  s.powers.levels.clear();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = basic_spec();
  s.powers.levels = std::vector<double>{2.0, 2.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = basic_spec();
  s.powers.levels = std::vector<double>{-1.0, 2.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = basic_spec();
  s.B = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = basic_spec();
  s.interference.transition = {{0.9}};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = basic_spec();
  s.interference.levels = std::vector<double>{0.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = basic_spec();
  s.costs.drop_cost = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = basic_spec();
  s.success.family = SuccessFamily::sigmoidal;
  s.success.beta1 = 1.0;  // above ln 2, so s(0, i) < 0
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = basic_spec();
  s.costs.power_cost.form = CostForm::table;
  s.costs.power_cost.values = std::vector<double>{3.0, 2.0, 1.0};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("two-state stationary distribution has its closed form") {
  InterferenceChain c;
  c.levels = {1.0, 2.0};
  const double pu = 0.15, pd = 0.4;
  c.transition = {{1.0 - pu, pu}, {pd, 1.0 - pd}};
  const auto pi = c.stationary();
  REQUIRE(pi.size() == 2);
  CHECK(pi[0] == Catch::Approx(pd / (pu + pd)).epsilon(1e-12));
  CHECK(pi[1] == Catch::Approx(pu / (pu + pd)).epsilon(1e-12));

  InterferenceChain single;
  single.levels = {3.0};
  single.transition = {{1.0}};
  CHECK(single.stationary() == std::vector<double>{1.0});
}

TEST_CASE("chain stepping inverts the row CDF") {
  InterferenceChain c;
  c.levels = {1.0, 2.0, 3.0};
  c.transition = {{0.2, 0.5, 0.3}, {0.0, 1.0, 0.0}, {0.3, 0.3, 0.4}};
  CHECK(c.step(0, 0.1) == 0);
  CHECK(c.step(0, 0.2) == 1);
  CHECK(c.step(0, 0.69) == 1);
  CHECK(c.step(0, 0.71) == 2);
  CHECK(c.step(0, 0.999999) == 2);
  CHECK(c.step(1, 0.5) == 1);
}

TEST_CASE("backlog cost table clamps beyond its length") {
  CostModel costs;
  costs.backlog_cost = {CostForm::table, 0.0, {1.0, 4.0, 9.0}};
  CHECK(costs.backlog(0) == 0.0);
  CHECK(costs.backlog(2) == 4.0);
  CHECK(costs.backlog(3) == 9.0);
  CHECK(costs.backlog(50) == 9.0);
}
