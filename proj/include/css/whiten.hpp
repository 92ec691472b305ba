#pragma once

#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "css/vec.hpp"

namespace css {

/// Whitening transform W = Sigma^{-1/2} for a known positive definite
/// covariance. Feeding whitened observations to any isotropic sphere
/// sequence turns it into an ellipsoid sequence in the Mahalanobis norm
/// |x|_Sigma = |Sigma^{-1/2} x|.
class Whitener {
 public:
  static Whitener from_covariance(const Matrix& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1) {
      throw std::invalid_argument("Whitener: covariance must be square");
    }
    if (!sigma.isApprox(sigma.transpose(), 1e-12)) {
      throw std::invalid_argument("Whitener: covariance must be symmetric");
    }
    // PD check by Cholesky success.
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("Whitener: covariance is not positive definite");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("Whitener: covariance is not positive definite");
    }
    const Vec inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    const Vec sqrt = eig.eigenvalues().cwiseSqrt();
    Whitener w;
    w.w_ = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
    w.w_inv_ = eig.eigenvectors() * sqrt.asDiagonal() * eig.eigenvectors().transpose();
    return w;
  }

  Vec whiten(const Vec& x) const { return w_ * x; }
  Vec unwhiten(const Vec& y) const { return w_inv_ * y; }

  const Matrix& matrix() const { return w_; }
  const Matrix& inverse_matrix() const { return w_inv_; }

 private:
  Whitener() = default;
  Matrix w_;
  Matrix w_inv_;
};

/// W x for a caller-supplied W = Sigma^{-1/2}.
inline Vec whiten(const Vec& x, const Matrix& w) { return w * x; }

}  // namespace css
