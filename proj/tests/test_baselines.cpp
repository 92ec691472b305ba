#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "css/baselines.hpp"
#include "css/kahan.hpp"

using css::MoMConfig;
using css::Vec;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_CASE("mom_estimate with one block is the sample mean") {
  std::vector<Vec> samples = {v2(1, 0), v2(0, 1), v2(2, 2), v2(-1, 3)};
  const Vec got = css::mom_estimate(samples, 1);
  CHECK_THAT((got - v2(0.5, 1.5)).norm(), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("mom_estimate of identical samples is the point") {
  std::vector<Vec> samples(7, v2(0.3, -0.4));
  for (const std::int64_t k : {1, 2, 3, 7}) {
    CHECK_THAT((css::mom_estimate(samples, k) - v2(0.3, -0.4)).norm(),
               Catch::Matchers::WithinAbs(0.0, 1e-9));
  }
}

TEST_CASE("mom_estimate isolates an outlier block") {
  // 9 points at the origin, one at (100,100); k = 5 contiguous blocks of 2
  // put the outlier in the last block. Block means: 4 x (0,0), 1 x (50,50);
  // the geometric median sits at the majority point.
  std::vector<Vec> samples(9, v2(0, 0));
  samples.push_back(v2(100, 100));
  const Vec robust = css::mom_estimate(samples, 5);
  CHECK(robust.norm() < 1.0);
  CHECK(robust.norm() < 1e-6);  // converges much tighter than the spec bound

  Vec mean = Vec::Zero(2);
  for (const auto& s : samples) mean += s;
  mean /= 10.0;
  CHECK_THAT(mean.norm(), Catch::Matchers::WithinRel(std::sqrt(200.0), 1e-12));
  CHECK(mean.norm() > 14.0);  // plain mean dragged to distance ~14.1
}

TEST_CASE("mom_estimate argument validation") {
  std::vector<Vec> empty;
  CHECK_THROWS_AS(css::mom_estimate(empty, 1), std::invalid_argument);
  std::vector<Vec> samples(3, v2(0, 0));
  CHECK_THROWS_AS(css::mom_estimate(samples, 0), std::invalid_argument);
  CHECK_THROWS_AS(css::mom_estimate(samples, 4), std::invalid_argument);
}

TEST_CASE("mom_estimate is translation equivariant") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  std::vector<Vec> samples;
  for (int i = 0; i < 30; ++i) samples.push_back(v2(nd(rng), nd(rng)));
  const Vec shift = v2(5.5, -2.5);
  std::vector<Vec> shifted;
  for (const auto& s : samples) shifted.push_back(s + shift);
  const Vec a = css::mom_estimate(samples, 5);
  const Vec b = css::mom_estimate(shifted, 5);
  CHECK_THAT((b - (a + shift)).norm(), Catch::Matchers::WithinAbs(0.0, 1e-7));
}

TEST_CASE("geometric_median matches a brute-force objective scan") {
  std::vector<Vec> pts = {v2(0, 0), v2(1, 0), v2(0, 1), v2(2, 2), v2(-1, 1)};
  const Vec med = css::geometric_median(pts);
  const auto objective = [&pts](const Vec& x) {
    double s = 0.0;
    for (const auto& p : pts) s += (p - x).norm();
    return s;
  };
  const double at_med = objective(med);
  std::mt19937_64 rng(43);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    REQUIRE(at_med <= objective(med + 0.3 * v2(nd(rng), nd(rng))) + 1e-7);
  }
}

TEST_CASE("union budget telescopes to alpha") {
  MoMConfig cfg;
  cfg.alpha = 0.05;
  cfg.trace_sigma = 1.0;
  // Partial sum of alpha/(t + t^2) over 1e5 terms plus the analytic tail
  // alpha/(T+1) reproduces alpha to 1e-9 (the sum telescopes exactly).
  css::KahanSum partial;
  const std::int64_t T = 100000;
  for (std::int64_t t = 1; t <= T; ++t) partial.add(cfg.alpha_t(t));
  const double tail = cfg.alpha / static_cast<double>(T + 1);
  CHECK_THAT(partial.value() + tail, Catch::Matchers::WithinAbs(0.05, 1e-9));
}

TEST_CASE("mom_union_radius arithmetic and rate") {
  MoMConfig cfg;
  cfg.alpha = 0.05;
  cfg.trace_sigma = 2.0;
  // t = 1: alpha_1 = alpha/2 = 0.025.
  CHECK_THAT(cfg.alpha_t(1), Catch::Matchers::WithinRel(0.025, 1e-15));
  const double expected =
      2.0 * std::sqrt(2.0) *
      std::sqrt(2.0 * (1.0 + 2.0 * std::log(1.0 / 0.025)) / 1.0);
  CHECK_THAT(css::mom_union_radius(1, cfg), Catch::Matchers::WithinRel(expected, 1e-14));

  // radius(t)/radius(4t) ~ 2 up to sqrt(log t) drift across [1e2, 1e6].
  for (std::int64_t t = 100; 4 * t <= 1000000; t *= 4) {
    const double ratio = css::mom_union_radius(t, cfg) / css::mom_union_radius(4 * t, cfg);
    REQUIRE(ratio > 1.6);
    REQUIRE(ratio < 2.2);
  }
}

TEST_CASE("block rule") {
  MoMConfig cfg;
  cfg.alpha = 0.05;
  CHECK(cfg.blocks(1) == 1);  // clamped to t
  const std::int64_t k100 = cfg.blocks(100);
  CHECK(k100 == static_cast<std::int64_t>(
                    std::ceil(8.0 * std::log(1.0 / cfg.alpha_t(100)))));
  CHECK(cfg.blocks(1000000) <= 1000000);
  CHECK(cfg.blocks(1000000) >= k100);
}
