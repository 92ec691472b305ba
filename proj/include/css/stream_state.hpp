#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "css/errors.hpp"
#include "css/kahan.hpp"
#include "css/special.hpp"
#include "css/threshold.hpp"
#include "css/vec.hpp"

namespace css {

/// Selects what the shared accumulators feed: the transform g applied
/// inside the weighted sum and the quadratic statistic collected in
/// quad_sum.
struct AccumulatorMode {
  enum class Kind {
    eb,              // g = identity, quad += psi_E(lambda) |x - mubar|^2
    sub_psi,         // g = identity, quad += psi(lambda)
    cg,              // g = th_lambda, quad unused
    semi_empirical,  // g = identity, quad += lambda^2 (|x|^2 + v^{2/p})
    plain,           // g = identity, quad unused (stitched estimators)
  };

  Kind kind = Kind::eb;
  double lambda_cap = 1.0;        // updates reject lambda outside (0, cap]
  Psi psi = Psi::exponential();   // sub_psi only
  double v_2p = 0.0;              // semi_empirical only

  static AccumulatorMode eb(double cap = 1.0 - 1e-12) {
    AccumulatorMode m;
    m.kind = Kind::eb;
    m.lambda_cap = cap;
    return m;
  }

  static AccumulatorMode sub_psi(const Psi& psi) {
    AccumulatorMode m;
    m.kind = Kind::sub_psi;
    m.psi = psi;
    m.lambda_cap = psi.lambda_max();
    return m;
  }

  static AccumulatorMode cg() {
    AccumulatorMode m;
    m.kind = Kind::cg;
    m.lambda_cap = std::numeric_limits<double>::infinity();
    return m;
  }

  static AccumulatorMode semi_empirical(double v_2p) {
    AccumulatorMode m;
    m.kind = Kind::semi_empirical;
    m.v_2p = v_2p;
    m.lambda_cap = std::numeric_limits<double>::infinity();
    return m;
  }

  static AccumulatorMode plain() {
    AccumulatorMode m;
    m.kind = Kind::plain;
    m.lambda_cap = std::numeric_limits<double>::infinity();
    return m;
  }
};

/// Online accumulators for one observation stream. Single-writer:
/// updates must be externally serialized per stream; snapshots are plain
/// copies and may be read from any thread.
///
/// The deviation statistic |x_t - mubar_{t-1}| always uses the running
/// mean of observations strictly before x_t, with mubar_0 = 0.
class StreamState {
 public:
  StreamState(int dim, AccumulatorMode mode)
      : mode_(mode),
        dim_(dim),
        weighted_sum_(dim),
        running_sum_(dim),
        scratch_(Vec::Zero(dim)) {
    if (dim < 1) throw std::invalid_argument("StreamState: dim must be >= 1");
  }

  void update(const Vec& x, double lambda) {
    if (x.size() != dim_) {
      throw std::invalid_argument(
          "StreamState::update: dimension mismatch (expected " +
          std::to_string(dim_) + ", got " + std::to_string(x.size()) + ")");
    }
    if (!x.allFinite()) {
      throw std::invalid_argument("StreamState::update: non-finite observation");
    }
    if (!(lambda > 0.0) || !(lambda <= mode_.lambda_cap)) {
      throw std::domain_error("StreamState::update: lambda " +
                              std::to_string(lambda) + " outside (0, " +
                              std::to_string(mode_.lambda_cap) + "]");
    }

    // |x - mubar_{t-1}|^2 against the mean of strictly earlier points.
    double dev_sq;
    if (t_ == 0) {
      dev_sq = x.squaredNorm();
    } else {
      running_sum_.value_to(scratch_);
      scratch_ = x - scratch_ / static_cast<double>(t_);
      dev_sq = scratch_.squaredNorm();
    }

    switch (mode_.kind) {
      case AccumulatorMode::Kind::eb:
        quad_sum_.add(psi_e(lambda) * dev_sq);
        weighted_sum_.add(lambda * x);
        break;
      case AccumulatorMode::Kind::sub_psi:
        quad_sum_.add(mode_.psi(lambda));
        weighted_sum_.add(lambda * x);
        break;
      case AccumulatorMode::Kind::cg:
        weighted_sum_.add(lambda * cg_threshold(x, lambda));
        break;
      case AccumulatorMode::Kind::semi_empirical:
        quad_sum_.add(lambda * lambda * (x.squaredNorm() + mode_.v_2p));
        weighted_sum_.add(lambda * x);
        break;
      case AccumulatorMode::Kind::plain:
        weighted_sum_.add(lambda * x);
        break;
    }

    var_sum_.add(dev_sq);
    running_sum_.add(x);
    sum_lambda_.add(lambda);
    sum_lambda_sq_.add(lambda * lambda);
    ++t_;
  }

  std::int64_t t() const { return t_; }
  int dim() const { return dim_; }
  const AccumulatorMode& mode() const { return mode_; }

  double sum_lambda() const { return sum_lambda_.value(); }
  double sum_lambda_sq() const { return sum_lambda_sq_.value(); }
  double quad_sum() const { return quad_sum_.value(); }
  double var_sum() const { return var_sum_.value(); }
  Vec weighted_sum() const { return weighted_sum_.value(); }
  Vec running_sum() const { return running_sum_.value(); }

  Vec weighted_mean() const {
    if (t_ == 0) throw NoEstimateError();
    return weighted_sum_.value() / sum_lambda();
  }

  void weighted_mean_to(Vec& out) const {
    if (t_ == 0) throw NoEstimateError();
    weighted_sum_.value_to(out);
    out /= sum_lambda();
  }

  Vec running_mean() const {
    if (t_ == 0) throw NoEstimateError();
    return running_sum_.value() / static_cast<double>(t_);
  }

  void running_mean_to(Vec& out) const {
    if (t_ == 0) throw NoEstimateError();
    running_sum_.value_to(out);
    out /= static_cast<double>(t_);
  }

  // sigmahat_t^2 = var_sum / t; the t = 0 convention sigmahat_0^2 = 1 is
  // what the variance-adaptive schedules expect.
  double sigma_hat_sq() const {
    if (t_ == 0) return 1.0;
    return var_sum() / static_cast<double>(t_);
  }

 private:
  AccumulatorMode mode_;
  int dim_;
  std::int64_t t_ = 0;
  KahanSum sum_lambda_;
  KahanSum sum_lambda_sq_;
  KahanSum quad_sum_;
  KahanSum var_sum_;
  KahanVec weighted_sum_;
  KahanVec running_sum_;
  Vec scratch_;
};

}  // namespace css
