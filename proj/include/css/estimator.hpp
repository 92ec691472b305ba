#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "css/estimator_config.hpp"
#include "css/radius.hpp"
#include "css/region.hpp"
#include "css/stitching.hpp"
#include "css/stream_state.hpp"
#include "css/whiten.hpp"

namespace css {

/// Online confidence sphere sequence: feed observations one at a time,
/// query the region after any of them. Wraps a StreamState and inherits
/// its single-writer contract; radius queries on a copied estimator are
/// safe from any thread.
///
/// With a whitener attached, observations are mapped through W before
/// accumulation and the reported region is the corresponding ellipsoid in
/// the original coordinates.
class Estimator {
 public:
  explicit Estimator(EstimatorConfig cfg, std::optional<Whitener> whitener = {})
      : cfg_(std::move(cfg)),
        whitener_(std::move(whitener)),
        state_(cfg_.d, make_mode(cfg_)),
        scratch_(Vec::Zero(cfg_.d)) {
    cfg_.validate();
    if (uses_vmf_ratio()) {
      const double kappa = cfg_.kappa_or_default();
      a_d_kappa_ = bessel_ratio(cfg_.d, kappa);
    }
    log_inv_alpha_ = std::log(1.0 / cfg_.alpha);
  }

  void observe(const Vec& x) {
    const Vec* obs = &x;
    if (whitener_) {
      scratch_ = whitener_->whiten(x);
      obs = &scratch_;
    }
    if (bounded_family()) {
      const double norm = obs->norm();
      if (norm > cfg_.B) {
        throw std::domain_error("observation norm " + std::to_string(norm) +
                                " exceeds the bound B = " + std::to_string(cfg_.B));
      }
    }
    const double lambda =
        cfg_.is_stitched() ? 1.0 : cfg_.schedule->next(state_);
    state_.update(*obs, lambda);
  }

  std::int64_t t() const { return state_.t(); }

  double radius() const {
    detail::require_started(state_);
    switch (cfg_.method) {
      case Method::eb:
        if (cfg_.conservative) {
          return eb_radius_conservative(state_.quad_sum(), state_.sum_lambda(),
                                        cfg_.B, cfg_.d, log_inv_alpha_);
        }
        return eb_radius_with(state_.quad_sum(), state_.sum_lambda(), cfg_.B,
                              cfg_.kappa_or_default(), a_d_kappa_, log_inv_alpha_);
      case Method::sub_psi:
        return subpsi_radius(state_, cfg_);
      case Method::cg:
        return cg_radius(state_, cfg_);
      case Method::robust_eb:
        return robust_eb_radius_with(state_.quad_sum(), state_.sum_lambda(),
                                     state_.t(), cfg_.B, cfg_.d, cfg_.eps,
                                     log_inv_alpha_);
      case Method::semi_empirical:
        return semi_empirical_radius(state_, cfg_);
      case Method::stitched_eb:
        return stitched_eb_radius(state_.t(), state_.var_sum() / (2.0 * cfg_.B),
                                  cfg_);
      case Method::stitched_subgamma:
        return stitched_subgamma_radius(state_.t(), cfg_);
    }
    return 0.0;  // unreachable
  }

  /// Center in the original (unwhitened) coordinates. Stitched bounds
  /// center at the unweighted running mean, everything else at the
  /// lambda-weighted mean.
  Vec center() const {
    Vec c = cfg_.is_stitched() ? state_.running_mean() : state_.weighted_mean();
    if (whitener_) return whitener_->unwhiten(c);
    return c;
  }

  // Allocation-free variant for hot loops; `out` must have size d.
  void center_to(Vec& out) const {
    if (cfg_.is_stitched()) {
      state_.running_mean_to(out);
    } else {
      state_.weighted_mean_to(out);
    }
    if (whitener_) out = whitener_->unwhiten(out);
  }

  ConfidenceRegion region() const {
    ConfidenceRegion r;
    r.center = center();
    r.radius = radius();
    r.t = state_.t();
    r.alpha = cfg_.alpha;
    if (whitener_) r.whitening = whitener_->matrix();
    return r;
  }

  const EstimatorConfig& config() const { return cfg_; }
  const StreamState& state() const { return state_; }

 private:
  static AccumulatorMode make_mode(const EstimatorConfig& cfg) {
    cfg.validate();
    switch (cfg.method) {
      case Method::eb:
        return AccumulatorMode::eb();
      case Method::robust_eb:
        return AccumulatorMode::eb(0.8);  // robust family: lambda in (0, 0.8]
      case Method::sub_psi:
        return AccumulatorMode::sub_psi(*cfg.psi);
      case Method::cg:
        return AccumulatorMode::cg();
      case Method::semi_empirical:
        return AccumulatorMode::semi_empirical(cfg.v_2p());
      case Method::stitched_eb:
      case Method::stitched_subgamma:
        return AccumulatorMode::plain();
    }
    return AccumulatorMode::eb();  // unreachable
  }

  bool bounded_family() const {
    return cfg_.method == Method::eb || cfg_.method == Method::robust_eb ||
           cfg_.method == Method::stitched_eb;
  }

  bool uses_vmf_ratio() const {
    return (cfg_.method == Method::eb && !cfg_.conservative) ||
           cfg_.method == Method::stitched_eb ||
           cfg_.method == Method::stitched_subgamma;
  }

  EstimatorConfig cfg_;
  std::optional<Whitener> whitener_;
  StreamState state_;
  Vec scratch_;
  double a_d_kappa_ = 0.0;
  double log_inv_alpha_ = 0.0;
};

}  // namespace css
