#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "css/estimator.hpp"
#include "css/kahan.hpp"
#include "css/stitching.hpp"

using css::EstimatorConfig;
using css::Method;
using css::Vec;

TEST_CASE("stitching budget function") {
  CHECK_THAT(css::stitch_ell(0), Catch::Matchers::WithinRel(1.6449340668482264, 1e-14));
  CHECK_THAT(css::stitch_ell(3), Catch::Matchers::WithinRel(26.318945069571622, 1e-14));

  // sum_m 1/ell(m) = 1: partial sum over 1e6 terms leaves a tail below
  // 1/(zeta(2) (M+1)) ~ 6.1e-7.
  css::KahanSum partial;
  for (int m = 0; m < 1000000; ++m) partial.add(1.0 / css::stitch_ell(m));
  CHECK_THAT(partial.value(), Catch::Matchers::WithinAbs(1.0, 1e-6));
}

TEST_CASE("epoch index") {
  CHECK(css::stitch_epoch(1) == 0);
  CHECK(css::stitch_epoch(2) == 1);
  CHECK(css::stitch_epoch(3) == 1);
  CHECK(css::stitch_epoch(4) == 2);
  CHECK(css::stitch_epoch(1023) == 9);
  CHECK(css::stitch_epoch(1024) == 10);
  CHECK_THROWS_AS(css::stitch_epoch(0), css::NoEstimateError);
}

TEST_CASE("stitched EB: epochs below m = 4 are infinite at alpha = 0.05") {
  EstimatorConfig cfg;
  cfg.method = Method::stitched_eb;
  cfg.d = 2;
  cfg.alpha = 0.05;
  cfg.B = 1.0;

  // lambda_m = sqrt(r_m / 2^m) > 0.68 for m < 4, <= 0.68 from m = 4 on.
  for (const std::int64_t t : {1, 2, 4, 8, 15}) {
    CHECK(std::isinf(css::stitched_eb_radius(t, 0.5, cfg)));
  }
  for (const std::int64_t t : {16, 17, 64, 1024}) {
    CHECK(std::isfinite(css::stitched_eb_radius(t, 0.5, cfg)));
  }
}

TEST_CASE("stitched EB boundary formula at an epoch start") {
  EstimatorConfig cfg;
  cfg.method = Method::stitched_eb;
  cfg.d = 3;
  cfg.alpha = 0.05;
  cfg.B = 1.0;

  const int m = 6;
  const std::int64_t t = 64;
  const double v_t = 12.5;
  const double r_m = std::log(css::stitch_ell(m) / 0.05);
  const double lambda_m = std::sqrt(r_m / 64.0);
  const double kappa = std::sqrt(3.0);
  const double a = css::bessel_ratio(3, kappa);
  const double expected =
      (css::psi_e(lambda_m) * v_t + 2.0 * kappa * a + r_m) / (lambda_m * a * t);
  CHECK_THAT(css::stitched_eb_radius(t, v_t, cfg),
             Catch::Matchers::WithinRel(expected, 1e-13));
}

TEST_CASE("stitched sub-Gamma: round-trip identity at epoch starts") {
  EstimatorConfig cfg;
  cfg.method = Method::stitched_subgamma;
  cfg.d = 4;
  cfg.alpha = 0.05;
  cfg.psi = css::Psi::gamma(0.5);

  for (const int m : {3, 6, 10, 14}) {
    const auto t = static_cast<std::int64_t>(1) << m;
    const double r_m = std::log(css::stitch_ell(m) / 0.05);
    const double u = r_m / std::ldexp(1.0, m);
    const double lambda_m = css::psi_gamma_inverse(0.5, u);
    // psi_G(lambda_m) = r_m / 2^m by the inverse identity, so at t = 2^m
    // the boundary has the two-route closed form.
    const double kappa = 2.0;
    const double a = css::bessel_ratio(4, kappa);
    const double route1 = css::stitched_subgamma_radius(t, cfg);
    const double route2 =
        (r_m + 2.0 * kappa * a + r_m) / (lambda_m * a * static_cast<double>(t));
    CHECK_THAT(route1, Catch::Matchers::WithinRel(route2, 1e-12));
  }
}

TEST_CASE("stitched sub-Gamma with c = 0 uses the sub-Gaussian weight") {
  EstimatorConfig cfg;
  cfg.method = Method::stitched_subgamma;
  cfg.d = 2;
  cfg.alpha = 0.05;
  cfg.psi = css::Psi::gamma(0.0);

  const int m = 8;
  const double r_m = std::log(css::stitch_ell(m) / 0.05);
  const double lambda_m = css::psi_gamma_inverse(0.0, r_m / 256.0);
  CHECK_THAT(lambda_m, Catch::Matchers::WithinRel(std::sqrt(2.0 * r_m / 256.0), 1e-14));
}

TEST_CASE("stitched sub-Gamma radius roughly halves from t to 4t") {
  EstimatorConfig cfg;
  cfg.method = Method::stitched_subgamma;
  cfg.d = 4;
  cfg.alpha = 0.05;
  cfg.psi = css::Psi::gamma(1.0);

  // The boundary is a deterministic function of t; the LIL-rate model
  // says radius(t)/radius(4t) ~ 2 up to log-log drift.
  for (std::int64_t t = 64; t * 4 <= (1 << 20); t *= 2) {
    const double ratio = css::stitched_subgamma_radius(t, cfg) /
                         css::stitched_subgamma_radius(4 * t, cfg);
    REQUIRE(ratio > 1.5);
    REQUIRE(ratio < 2.5);
  }
}

TEST_CASE("stitched EB normalized trajectory stays bounded on a bounded stream") {
  // radius(t) * sqrt(t / (log ell(log2 t) + log(1/alpha))) over t in
  // [2^4, 2^20]: the normalized statistic moves within a narrow band.
  EstimatorConfig cfg;
  cfg.method = Method::stitched_eb;
  cfg.d = 2;
  cfg.alpha = 0.05;
  cfg.B = std::sqrt(2.0) / 2.0;

  css::Estimator est(cfg);
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  std::int64_t next_cp = 16;
  for (std::int64_t t = 1; t <= (1 << 20); ++t) {
    Vec x(2);
    x << u(rng), u(rng);
    est.observe(x);
    if (t == next_cp) {
      const double td = static_cast<double>(t);
      const double norm = std::sqrt(
          td / (std::log(css::stitch_ell(css::stitch_epoch(t))) + std::log(20.0)));
      const double stat = est.radius() * norm;
      REQUIRE(std::isfinite(stat));
      lo = std::min(lo, stat);
      hi = std::max(hi, stat);
      next_cp *= 2;
    }
  }
  CHECK(hi / lo < 5.0);
}

TEST_CASE("stitched config validation") {
  EstimatorConfig cfg;
  cfg.method = Method::stitched_subgamma;
  cfg.d = 4;
  cfg.alpha = 0.05;
  cfg.psi = css::Psi::gaussian(1.0);  // not the Gamma variant
  CHECK_FALSE(cfg.validation_errors().empty());

  EstimatorConfig eb;
  eb.method = Method::stitched_eb;
  eb.d = 1;  // vMF machinery needs d >= 2
  eb.alpha = 0.05;
  eb.B = 1.0;
  CHECK_FALSE(eb.validation_errors().empty());
}

TEST_CASE("stitched estimator centers at the unweighted running mean") {
  EstimatorConfig cfg;
  cfg.method = Method::stitched_eb;
  cfg.d = 2;
  cfg.alpha = 0.05;
  cfg.B = 2.0;

  css::Estimator est(cfg);
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Vec sum = Vec::Zero(2);
  double var_sum = 0.0;
  Vec mean = Vec::Zero(2);
  for (int t = 1; t <= 300; ++t) {
    Vec x(2);
    x << u(rng), u(rng);
    var_sum += (x - mean).squaredNorm();  // independent accumulation
    est.observe(x);
    sum += x;
    mean = sum / t;
    REQUIRE_THAT((est.center() - mean).norm(), Catch::Matchers::WithinAbs(0.0, 1e-12));
    const double expected =
        css::stitched_eb_radius(t, var_sum / (2.0 * cfg.B), cfg);
    if (std::isfinite(expected)) {
      REQUIRE_THAT(est.radius(), Catch::Matchers::WithinRel(expected, 1e-10));
    } else {
      REQUIRE(std::isinf(est.radius()));
    }
  }
}
