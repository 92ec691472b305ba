#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "css/stream_state.hpp"

namespace css {

/// Declarative description of the predictable weight sequence (lambda_t).
/// next() reads only the state after t observations, so the weight for
/// observation t+1 never depends on it.
class LambdaSchedule {
 public:
  enum class Kind {
    constant,
    fixed_time_eb,      // min(cap, sqrt(c log(1/a) / (sigmahat^2 n)))
    anytime_eb,         // min(cap, sqrt(log(1/a) / (sigmahat^2 t log(t+1))))
    anytime_cg,         // sqrt(log(1/a) / (v^{2/p} t log(t+1)))
    fixed_time_cg,      // sqrt(log(1/a) / (v^{2/p} n))
    robust_var,         // min(cap, 1 / (b sigmahat))
    robust_fixed_time,  // min(cap, (B/sigmahat) sqrt(log(1/a)/n + eps))
  };

  static LambdaSchedule constant(double value) {
    require(value > 0.0 && std::isfinite(value),
            "schedule constant: value must be positive and finite");
    LambdaSchedule s(Kind::constant);
    s.value_ = value;
    s.cap_ = value;
    return s;
  }

  static LambdaSchedule fixed_time_eb(std::int64_t n, double alpha, double c,
                                      double cap) {
    require_alpha(alpha);
    require(n >= 1, "schedule fixed_time_eb: n must be >= 1");
    require(c > 0.0, "schedule fixed_time_eb: c must be > 0");
    require(cap > 0.0 && cap < 1.0,
            "schedule fixed_time_eb: cap must lie in (0, 1)");
    LambdaSchedule s(Kind::fixed_time_eb);
    s.n_ = n;
    s.alpha_ = alpha;
    s.c_ = c;
    s.cap_ = cap;
    return s;
  }

  static LambdaSchedule anytime_eb(double alpha, double cap) {
    require_alpha(alpha);
    require(cap > 0.0 && cap < 1.0, "schedule anytime_eb: cap must lie in (0, 1)");
    LambdaSchedule s(Kind::anytime_eb);
    s.alpha_ = alpha;
    s.cap_ = cap;
    return s;
  }

  static LambdaSchedule anytime_cg(double alpha, double v, double p) {
    require_alpha(alpha);
    require(v > 0.0, "schedule anytime_cg: v must be > 0");
    require(p >= 2.0, "schedule anytime_cg: p must be >= 2");
    LambdaSchedule s(Kind::anytime_cg);
    s.alpha_ = alpha;
    s.v_2p_ = std::pow(v, 2.0 / p);
    s.cap_ = std::numeric_limits<double>::infinity();
    return s;
  }

  static LambdaSchedule fixed_time_cg(std::int64_t n, double alpha, double v,
                                      double p) {
    require_alpha(alpha);
    require(n >= 1, "schedule fixed_time_cg: n must be >= 1");
    require(v > 0.0, "schedule fixed_time_cg: v must be > 0");
    require(p >= 2.0, "schedule fixed_time_cg: p must be >= 2");
    LambdaSchedule s(Kind::fixed_time_cg);
    s.n_ = n;
    s.alpha_ = alpha;
    s.v_2p_ = std::pow(v, 2.0 / p);
    s.cap_ = std::sqrt(std::log(1.0 / alpha) / (s.v_2p_ * n));
    return s;
  }

  // Cap 0.68 keeps psi_E(lambda) <= lambda^2 along the whole sequence;
  // anything up to the robust family's hard 0.8 cap is accepted.
  static LambdaSchedule robust_var(double b, double cap = 0.68) {
    require(b > 0.0, "schedule robust_var: b must be > 0");
    require(cap > 0.0 && cap <= 0.8,
            "schedule robust_var: cap must lie in (0, 0.8]");
    LambdaSchedule s(Kind::robust_var);
    s.b_ = b;
    s.cap_ = cap;
    return s;
  }

  static LambdaSchedule robust_fixed_time(std::int64_t n, double alpha,
                                          double eps, double B, double cap) {
    require_alpha(alpha);
    require(n >= 1, "schedule robust_fixed_time: n must be >= 1");
    require(eps >= 0.0, "schedule robust_fixed_time: eps must be >= 0");
    require(B > 0.0, "schedule robust_fixed_time: B must be > 0");
    require(cap > 0.0 && cap <= 0.8,
            "schedule robust_fixed_time: cap must lie in (0, 0.8]");
    LambdaSchedule s(Kind::robust_fixed_time);
    s.n_ = n;
    s.alpha_ = alpha;
    s.eps_ = eps;
    s.B_ = B;
    s.cap_ = cap;
    return s;
  }

  /// Weight for observation state.t() + 1.
  double next(const StreamState& state) const {
    const double tau = static_cast<double>(state.t() + 1);
    const double sig_sq = state.sigma_hat_sq();
    switch (kind_) {
      case Kind::constant:
        return value_;
      case Kind::fixed_time_eb:
        return std::min(cap_, std::sqrt(c_ * std::log(1.0 / alpha_) /
                                        (sig_sq * static_cast<double>(n_))));
      case Kind::anytime_eb:
        return std::min(cap_, std::sqrt(std::log(1.0 / alpha_) /
                                        (sig_sq * tau * std::log(tau + 1.0))));
      case Kind::anytime_cg:
        return std::sqrt(std::log(1.0 / alpha_) /
                         (v_2p_ * tau * std::log(tau + 1.0)));
      case Kind::fixed_time_cg:
        return cap_;  // the constant value computed at construction
      case Kind::robust_var:
        return std::min(cap_, 1.0 / (b_ * std::sqrt(sig_sq)));
      case Kind::robust_fixed_time:
        return std::min(
            cap_, (B_ / std::sqrt(sig_sq)) *
                      std::sqrt(std::log(1.0 / alpha_) / static_cast<double>(n_) +
                                eps_));
    }
    return 0.0;  // unreachable
  }

  /// True when lambda_t reads the empirical variance (data-dependent);
  /// such schedules are predictable but not deterministic.
  bool data_dependent() const {
    switch (kind_) {
      case Kind::constant:
      case Kind::anytime_cg:
      case Kind::fixed_time_cg:
        return false;
      default:
        return true;
    }
  }

  /// sup_t lambda_t, used to validate against a method's lambda domain.
  double max_lambda() const {
    if (kind_ == Kind::anytime_cg) {
      return std::sqrt(std::log(1.0 / alpha_) / (v_2p_ * std::log(2.0)));
    }
    return cap_;
  }

  Kind kind() const { return kind_; }
  double cap() const { return cap_; }

 private:
  explicit LambdaSchedule(Kind kind) : kind_(kind) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }
  static void require_alpha(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "schedule: alpha must lie in (0,1)");
  }

  Kind kind_;
  double value_ = 0.0;
  double alpha_ = 0.0;
  double c_ = 0.0;
  double cap_ = 0.0;
  double v_2p_ = 0.0;
  double b_ = 0.0;
  double eps_ = 0.0;
  double B_ = 0.0;
  std::int64_t n_ = 0;
};

}  // namespace css
