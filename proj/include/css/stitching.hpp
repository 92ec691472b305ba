#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "css/errors.hpp"
#include "css/estimator_config.hpp"
#include "css/special.hpp"

namespace css {

/// Stitching error-budget function ell(m) = (m+1)^2 zeta(2); the per-epoch
/// budgets alpha/ell(m) sum to exactly alpha because sum_m 1/ell(m) = 1.
inline double stitch_ell(int m) {
  constexpr double zeta2 = std::numbers::pi_v<double> * std::numbers::pi_v<double> / 6.0;
  return (m + 1.0) * (m + 1.0) * zeta2;
}

/// Epoch index of time t: m = floor(log2 t), so epoch m covers [2^m, 2^{m+1}).
inline int stitch_epoch(std::int64_t t) {
  if (t < 1) throw NoEstimateError();
  return std::bit_width(static_cast<std::uint64_t>(t)) - 1;
}

/// Stitched empirical-Bernstein boundary on |(1/t) sum X_i - mu| with
/// variance process v_t = (1/(2B)) sum_i |X_i - mubar_{i-1}|^2.
/// Per epoch: lambda_m = sqrt(r_m / 2^m) with r_m = log(ell(m)/alpha);
/// epochs where lambda_m > 0.68 (psi_E(lambda) <= lambda^2 fails) return
/// +inf rather than erroring.
inline double stitched_eb_radius(std::int64_t t, double v_t,
                                 const EstimatorConfig& cfg) {
  const int m = stitch_epoch(t);
  const double r_m = std::log(stitch_ell(m) / cfg.alpha);
  const double lambda_m = std::sqrt(r_m / std::ldexp(1.0, m));
  if (lambda_m > 0.68) return std::numeric_limits<double>::infinity();
  const double kappa = cfg.kappa_or_default();
  const double a = bessel_ratio(cfg.d, kappa);
  return (psi_e(lambda_m) * v_t + 2.0 * kappa * a + r_m) /
         (lambda_m * a * static_cast<double>(t));
}

/// Stitched sub-Gamma boundary (variance process V_t = t):
/// lambda_m = psi_G^{-1}(r_m / 2^m), boundary
/// (psi_G(lambda_m) t + 2 kappa A_d(kappa) + r_m) / (lambda_m A_d(kappa) t).
inline double stitched_subgamma_radius(std::int64_t t,
                                       const EstimatorConfig& cfg) {
  if (!cfg.psi || cfg.psi->kind() != PsiKind::gamma) {
    throw std::invalid_argument(
        "stitched_subgamma_radius: psi must be the Gamma variant");
  }
  const int m = stitch_epoch(t);
  const double r_m = std::log(stitch_ell(m) / cfg.alpha);
  const double lambda_m = psi_gamma_inverse(cfg.psi->gamma_c(), r_m / std::ldexp(1.0, m));
  const double kappa = cfg.kappa_or_default();
  const double a = bessel_ratio(cfg.d, kappa);
  return ((*cfg.psi)(lambda_m) * static_cast<double>(t) + 2.0 * kappa * a + r_m) /
         (lambda_m * a * static_cast<double>(t));
}

}  // namespace css
