#pragma once

#include <cmath>
#include <stdexcept>

#include "css/errors.hpp"
#include "css/estimator_config.hpp"
#include "css/stream_state.hpp"

namespace css {

namespace detail {

inline void require_started(const StreamState& s) {
  if (s.t() == 0) throw NoEstimateError();
}

inline void require_mode(const StreamState& s, AccumulatorMode::Kind kind,
                         const char* op) {
  if (s.mode().kind != kind) {
    throw std::invalid_argument(std::string(op) +
                                ": stream state was built in the wrong "
                                "accumulator mode");
  }
}

}  // namespace detail

/// Empirical-Bernstein radius with a precomputed Bessel ratio
/// a_d_kappa = A_d(kappa):
///
///   [ quad/(2B) + 4 B kappa A + 2 B log(1/alpha) ] / (A sum_lambda).
inline double eb_radius_with(double quad_sum, double sum_lambda, double B,
                             double kappa, double a_d_kappa, double log_inv_alpha) {
  return (quad_sum / (2.0 * B) + 4.0 * B * kappa * a_d_kappa +
          2.0 * B * log_inv_alpha) /
         (a_d_kappa * sum_lambda);
}

/// Conservative variant: A_d(sqrt d) lower-bounded by 2/(3 sqrt d), giving
///
///   [ sqrt(d) quad/(2B) + 4 B sqrt(d) + 2 B sqrt(d) log(1/alpha) ]
///     / ((2/3) sum_lambda),
///
/// which always dominates the exact-A radius at kappa = sqrt(d).
inline double eb_radius_conservative(double quad_sum, double sum_lambda, double B,
                                     int d, double log_inv_alpha) {
  const double sd = std::sqrt(static_cast<double>(d));
  return (sd * quad_sum / (2.0 * B) + 4.0 * B * sd +
          2.0 * B * sd * log_inv_alpha) /
         ((2.0 / 3.0) * sum_lambda);
}

inline double eb_radius(const StreamState& s, const EstimatorConfig& cfg) {
  detail::require_started(s);
  detail::require_mode(s, AccumulatorMode::Kind::eb, "eb_radius");
  const double L = std::log(1.0 / cfg.alpha);
  if (cfg.conservative) {
    return eb_radius_conservative(s.quad_sum(), s.sum_lambda(), cfg.B, cfg.d, L);
  }
  const double kappa = cfg.kappa_or_default();
  return eb_radius_with(s.quad_sum(), s.sum_lambda(), cfg.B, kappa,
                        bessel_ratio(cfg.d, kappa), L);
}

/// Sub-psi radius
///   [ sqrt(d) sum_i psi(lambda_i) + 2 sqrt(d) + sqrt(d) log(1/alpha) ]
///     / ((2/3) sum_lambda).
/// The psi sum lives in quad_sum for sub_psi-mode states.
inline double subpsi_radius(const StreamState& s, const EstimatorConfig& cfg) {
  detail::require_started(s);
  detail::require_mode(s, AccumulatorMode::Kind::sub_psi, "subpsi_radius");
  const double sd = std::sqrt(static_cast<double>(cfg.d));
  const double L = std::log(1.0 / cfg.alpha);
  return (sd * s.quad_sum() + 2.0 * sd + sd * L) / ((2.0 / 3.0) * s.sum_lambda());
}

/// Catoni-Giulini radius around the thresholded weighted mean:
///   [ v^{2/p} (2 e^{2/beta + 2} + 1) sum_lambda_sq + beta/2 + log(1/alpha) ]
///     / sum_lambda.
inline double cg_radius(const StreamState& s, const EstimatorConfig& cfg) {
  detail::require_started(s);
  detail::require_mode(s, AccumulatorMode::Kind::cg, "cg_radius");
  const double mult = 2.0 * std::exp(2.0 / cfg.beta + 2.0) + 1.0;
  return (cfg.v_2p() * mult * s.sum_lambda_sq() + 0.5 * cfg.beta +
          std::log(1.0 / cfg.alpha)) /
         s.sum_lambda();
}

/// Huber-robust empirical-Bernstein radius:
///   [ sqrt(d) quad/(2B) + 6 B sqrt(d) log(1/alpha)
///       + 2 B sqrt(d) t log(1 + e^2 eps) ] / ((2/3) sum_lambda).
/// The t-linear term is the contamination price; with eps > 0 and a
/// bounded schedule the radius has a strictly positive floor.
inline double robust_eb_radius_with(double quad_sum, double sum_lambda,
                                    std::int64_t t, double B, int d, double eps,
                                    double log_inv_alpha) {
  const double sd = std::sqrt(static_cast<double>(d));
  const double contamination = std::log1p(std::exp(2.0) * eps);
  return (sd * quad_sum / (2.0 * B) + 6.0 * B * sd * log_inv_alpha +
          2.0 * B * sd * static_cast<double>(t) * contamination) /
         ((2.0 / 3.0) * sum_lambda);
}

inline double robust_eb_radius(const StreamState& s, const EstimatorConfig& cfg) {
  detail::require_started(s);
  detail::require_mode(s, AccumulatorMode::Kind::eb, "robust_eb_radius");
  return robust_eb_radius_with(s.quad_sum(), s.sum_lambda(), s.t(), cfg.B, cfg.d,
                               cfg.eps, std::log(1.0 / cfg.alpha));
}

/// Semi-empirical heavy-tailed radius:
///   quad/(6 sum_lambda) + Tr(Sigma) sum_lambda_sq/(3 sum_lambda)
///     + (sqrt(d)/2 + log(1/alpha)) / sum_lambda,
/// where quad = sum_i lambda_i^2 (|X_i|^2 + v^{2/p}).
inline double semi_empirical_radius(const StreamState& s,
                                    const EstimatorConfig& cfg) {
  detail::require_started(s);
  detail::require_mode(s, AccumulatorMode::Kind::semi_empirical,
                       "semi_empirical_radius");
  if (!cfg.trace_sigma) {
    throw std::invalid_argument("semi_empirical_radius: trace_sigma missing");
  }
  const double sl = s.sum_lambda();
  const double sd = std::sqrt(static_cast<double>(cfg.d));
  return s.quad_sum() / (6.0 * sl) +
         (*cfg.trace_sigma) * s.sum_lambda_sq() / (3.0 * sl) +
         (0.5 * sd + std::log(1.0 / cfg.alpha)) / sl;
}

}  // namespace css
