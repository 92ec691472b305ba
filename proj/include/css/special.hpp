#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace css {

/// psi_E(lambda) = -lambda - log(1 - lambda), the sub-exponential psi on
/// [0, 1). Errors out near the log singularity instead of saturating:
/// schedules cap lambda well below 1, so reaching the guard is a
/// programming error, not a data condition.
inline double psi_e(double lambda) {
  if (!(lambda >= 0.0) || lambda >= 1.0 - 1e-12) {
    throw std::domain_error("psi_e: lambda must lie in [0, 1 - 1e-12), got " +
                            std::to_string(lambda));
  }
  return -lambda - std::log1p(-lambda);
}

enum class PsiKind { exponential, gaussian, gamma, exponential_tail };

/// Scalar psi function bounding directional moment generating functions:
/// sup_v E[exp(lambda <v, X - mu>)] <= exp(psi(lambda)) on [0, lambda_max).
class Psi {
 public:
  static Psi exponential() { return Psi(PsiKind::exponential, 0.0, 0.0, 1.0); }

  static Psi gaussian(double sigma) {
    require(sigma > 0.0, "Psi::gaussian: sigma must be > 0");
    return Psi(PsiKind::gaussian, sigma, 0.0,
               std::numeric_limits<double>::infinity());
  }

  static Psi gamma(double c) {
    require(c >= 0.0, "Psi::gamma: c must be >= 0");
    const double lmax =
        c > 0.0 ? 1.0 / c : std::numeric_limits<double>::infinity();
    return Psi(PsiKind::gamma, 0.0, c, lmax);
  }

  static Psi exponential_tail(double sigma, double lambda_max) {
    require(sigma > 0.0, "Psi::exponential_tail: sigma must be > 0");
    require(lambda_max > 0.0, "Psi::exponential_tail: lambda_max must be > 0");
    return Psi(PsiKind::exponential_tail, sigma, 0.0, lambda_max);
  }

  double operator()(double lambda) const {
    if (!(lambda >= 0.0) || !(lambda < lambda_max_)) {
      throw std::domain_error("psi: lambda outside [0, lambda_max)");
    }
    switch (kind_) {
      case PsiKind::exponential:
        return psi_e(lambda);
      case PsiKind::gaussian:
      case PsiKind::exponential_tail:
        return 0.5 * lambda * lambda * sigma_ * sigma_;
      case PsiKind::gamma:
        return lambda * lambda / (2.0 * (1.0 - c_ * lambda));
    }
    return 0.0;  // unreachable
  }

  PsiKind kind() const { return kind_; }
  double lambda_max() const { return lambda_max_; }
  double sigma() const { return sigma_; }
  double gamma_c() const { return c_; }

 private:
  Psi(PsiKind kind, double sigma, double c, double lambda_max)
      : kind_(kind), sigma_(sigma), c_(c), lambda_max_(lambda_max) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  PsiKind kind_;
  double sigma_;
  double c_;
  double lambda_max_;
};

/// Inverse of the sub-Gamma psi_G(lambda) = lambda^2 / (2 (1 - c lambda)):
/// psi^{-1}(u) = 2 / (c + sqrt(c^2 + 2/u)). Always lands below 1/c.
inline double psi_gamma_inverse(double c, double u) {
  if (!(c >= 0.0)) throw std::invalid_argument("psi_gamma_inverse: c must be >= 0");
  if (!(u > 0.0)) throw std::invalid_argument("psi_gamma_inverse: u must be > 0");
  return 2.0 / (c + std::sqrt(c * c + 2.0 / u));
}

/// Modified-Bessel ratio A_d(kappa) = I_{d/2}(kappa) / I_{d/2-1}(kappa),
/// the vMF mean shrinkage factor. Evaluated with the Perron-style
/// continued fraction r_nu = 1 / (2(nu+1)/kappa + r_{nu+1}) via modified
/// Lentz iteration; computing I_nu directly overflows for the large d
/// (up to 10^6) this library must support.
inline double bessel_ratio(int d, double kappa) {
  if (d < 2) throw std::invalid_argument("bessel_ratio: d must be >= 2");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("bessel_ratio: kappa must be finite and >= 0");
  }
  if (kappa == 0.0) return 0.0;

  const double nu = 0.5 * d - 1.0;
  constexpr double tiny = 1e-300;
  double f = tiny;
  double c = f;
  double dd = 0.0;
  for (int k = 1; k <= 100000; ++k) {
    const double b = 2.0 * (nu + k) / kappa;  // partial denominators, a_k = 1
    dd = b + dd;
    if (dd == 0.0) dd = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    dd = 1.0 / dd;
    const double delta = c * dd;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-15) return f;
  }
  throw std::runtime_error("bessel_ratio: continued fraction did not converge");
}

/// Bound on the KL divergence between two vMF distributions sharing
/// concentration kappa: 2 kappa A_d(kappa).
inline double vmf_kl_bound(int d, double kappa) {
  return 2.0 * kappa * bessel_ratio(d, kappa);
}

}  // namespace css
