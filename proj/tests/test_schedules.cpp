#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "css/schedule.hpp"
#include "css/stream_state.hpp"

using css::AccumulatorMode;
using css::LambdaSchedule;
using css::StreamState;
using css::Vec;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_CASE("fixed_time_eb starts from sigma_hat_0 = 1 and tracks sigma_hat") {
  const auto sched = LambdaSchedule::fixed_time_eb(1000, 0.05, 2.0, 0.5);
  StreamState s(2, AccumulatorMode::eb());
  const double L = std::log(20.0);
  CHECK_THAT(sched.next(s),
             Catch::Matchers::WithinAbs(std::min(0.5, std::sqrt(2.0 * L / 1000.0)), 1e-15));
  s.update(v2(2.0, 0.0), 0.1);  // var_sum = 4, sigma_hat^2 = 4
  CHECK_THAT(sched.next(s),
             Catch::Matchers::WithinAbs(std::sqrt(2.0 * L / (4.0 * 1000.0)), 1e-15));
}

TEST_CASE("anytime_eb formula and cap") {
  const auto sched = LambdaSchedule::anytime_eb(0.1, 0.5);
  StreamState s(2, AccumulatorMode::eb());
  // t = 1 with sigma_hat_0 = 1: sqrt(log(10)/log(2)) > 1, so the cap binds.
  CHECK(sched.next(s) == 0.5);
  s.update(v2(1.0, 0.0), 0.5);
  const double expect = std::min(
      0.5, std::sqrt(std::log(10.0) / (1.0 * 2.0 * std::log(3.0))));
  CHECK_THAT(sched.next(s), Catch::Matchers::WithinAbs(expect, 1e-15));
}

TEST_CASE("anytime_cg depends only on t (deterministic)") {
  const auto sched = LambdaSchedule::anytime_cg(0.05, 4.0, 2.0);
  CHECK_FALSE(sched.data_dependent());
  StreamState a(2, AccumulatorMode::cg());
  StreamState b(2, AccumulatorMode::cg());
  a.update(v2(100.0, 0.0), 0.3);
  b.update(v2(0.1, 0.0), 0.3);
  CHECK(sched.next(a) == sched.next(b));
  const double expect = std::sqrt(std::log(20.0) / (4.0 * 2.0 * std::log(3.0)));
  CHECK_THAT(sched.next(a), Catch::Matchers::WithinAbs(expect, 1e-15));
}

TEST_CASE("fixed_time_cg is constant") {
  const auto sched = LambdaSchedule::fixed_time_cg(10000, 0.05, 1.0, 2.0);
  StreamState s(2, AccumulatorMode::cg());
  const double expect = std::sqrt(std::log(20.0) / 1e4);
  CHECK_THAT(sched.next(s), Catch::Matchers::WithinAbs(expect, 1e-15));
  s.update(v2(5.0, 1.0), expect);
  CHECK_THAT(sched.next(s), Catch::Matchers::WithinAbs(expect, 1e-15));
  CHECK_FALSE(sched.data_dependent());
}

TEST_CASE("robust_var caps at 0.68 by default") {
  const auto sched = LambdaSchedule::robust_var(2.0);
  StreamState s(2, AccumulatorMode::eb(0.8));
  CHECK_THAT(sched.next(s), Catch::Matchers::WithinAbs(0.5, 1e-15));  // 1/(2*1)
  s.update(v2(0.01, 0.0), 0.5);  // tiny sigma_hat -> cap binds
  CHECK(sched.next(s) == 0.68);
  CHECK_THROWS_AS(LambdaSchedule::robust_var(2.0, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(LambdaSchedule::robust_var(0.0), std::invalid_argument);
}

TEST_CASE("robust_fixed_time formula") {
  const auto sched = LambdaSchedule::robust_fixed_time(100, 0.05, 0.01, 2.0, 0.8);
  StreamState s(2, AccumulatorMode::eb(0.8));
  const double expect =
      std::min(0.8, 2.0 * std::sqrt(std::log(20.0) / 100.0 + 0.01));
  CHECK_THAT(sched.next(s), Catch::Matchers::WithinAbs(expect, 1e-15));
}

TEST_CASE("every schedule emits positive, capped, predictable weights") {
  const LambdaSchedule schedules[] = {
      LambdaSchedule::constant(0.3),
      LambdaSchedule::fixed_time_eb(500, 0.1, 2.0, 0.5),
      LambdaSchedule::anytime_eb(0.1, 0.5),
      LambdaSchedule::anytime_cg(0.1, 2.0, 2.0),
      LambdaSchedule::fixed_time_cg(500, 0.1, 2.0, 2.0),
      LambdaSchedule::robust_var(3.0),
      LambdaSchedule::robust_fixed_time(500, 0.1, 0.05, 1.0, 0.8),
  };
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  for (const auto& sched : schedules) {
    StreamState s(2, AccumulatorMode::plain());
    for (int i = 0; i < 200; ++i) {
      const double lambda = sched.next(s);
      REQUIRE(lambda > 0.0);
      REQUIRE(lambda <= sched.max_lambda() + 1e-15);
      // Predictability: the weight is fixed before the observation lands.
      const double again = sched.next(s);
      REQUIRE(lambda == again);
      s.update(v2(nd(rng), nd(rng)), lambda);
    }
  }
}

TEST_CASE("schedule parameter validation") {
  CHECK_THROWS_AS(LambdaSchedule::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(LambdaSchedule::anytime_eb(1.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(LambdaSchedule::anytime_eb(0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LambdaSchedule::anytime_cg(0.1, -1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(LambdaSchedule::anytime_cg(0.1, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(LambdaSchedule::fixed_time_eb(0, 0.1, 2.0, 0.5), std::invalid_argument);
}
