#pragma once

#include <cmath>

#include "css/vec.hpp"

namespace css {

/// Kahan-Babuska compensated scalar accumulator. Streams run to 10^6
/// observations and the accumulators must not drift relative to a
/// two-pass sum.
class KahanSum {
 public:
  KahanSum() = default;

  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Componentwise compensated vector accumulator.
class KahanVec {
 public:
  explicit KahanVec(Eigen::Index dim)
      : sum_(Vec::Zero(dim)), comp_(Vec::Zero(dim)) {}

  template <typename Derived>
  void add(const Eigen::MatrixBase<Derived>& x) {
    for (Eigen::Index j = 0; j < sum_.size(); ++j) {
      const double xj = x[j];
      const double s = sum_[j];
      const double t = s + xj;
      if (std::abs(s) >= std::abs(xj)) {
        comp_[j] += (s - t) + xj;
      } else {
        comp_[j] += (xj - t) + s;
      }
      sum_[j] = t;
    }
  }

  Vec value() const { return sum_ + comp_; }

  // Writes sum into `out` without allocating a temporary.
  void value_to(Vec& out) const { out = sum_ + comp_; }

  Eigen::Index size() const { return sum_.size(); }

 private:
  Vec sum_;
  Vec comp_;
};

}  // namespace css
