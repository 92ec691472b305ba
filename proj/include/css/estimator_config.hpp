#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "css/schedule.hpp"
#include "css/special.hpp"

namespace css {

enum class Method {
  eb,
  sub_psi,
  cg,
  robust_eb,
  semi_empirical,
  stitched_eb,
  stitched_subgamma,
};

inline const char* method_name(Method m) {
  switch (m) {
    case Method::eb: return "eb";
    case Method::sub_psi: return "sub_psi";
    case Method::cg: return "cg";
    case Method::robust_eb: return "robust_eb";
    case Method::semi_empirical: return "semi_empirical";
    case Method::stitched_eb: return "stitched_eb";
    case Method::stitched_subgamma: return "stitched_subgamma";
  }
  return "?";
}

/// Full parameterization of one confidence sphere sequence. Parameter
/// completeness is checked at construction time via validate();
/// time-dependent validity conditions (early stitching epochs) surface as
/// +inf radii instead.
struct EstimatorConfig {
  Method method = Method::eb;
  int d = 0;
  double alpha = 0.05;

  double B = 0.0;                        // eb / robust_eb / stitched_eb
  std::optional<Psi> psi;                // sub_psi / stitched_subgamma
  double v = 0.0;                        // cg / semi_empirical
  double p = 2.0;                        // cg / semi_empirical
  double beta = 1.0;                     // cg
  std::optional<double> trace_sigma;     // semi_empirical
  double eps = 0.0;                      // robust_eb
  std::optional<double> kappa;           // default sqrt(d)
  bool conservative = false;             // replace A_d(sqrt d) by its 2/(3 sqrt d) lower bound
  std::optional<LambdaSchedule> schedule;  // ignored by stitched methods

  double kappa_or_default() const {
    return kappa ? *kappa : std::sqrt(static_cast<double>(d));
  }

  double v_2p() const { return std::pow(v, 2.0 / p); }

  bool is_stitched() const {
    return method == Method::stitched_eb || method == Method::stitched_subgamma;
  }

  /// All construction-time problems, each naming the offending field.
  std::vector<std::string> validation_errors() const {
    std::vector<std::string> errs;
    auto bad = [&errs](const std::string& msg) { errs.push_back(msg); };

    if (!(alpha > 0.0 && alpha < 1.0)) bad("alpha must lie in (0,1)");
    if (d < 1) bad("d must be >= 1");

    const bool needs_vmf = method == Method::eb || method == Method::sub_psi ||
                           method == Method::robust_eb || is_stitched();
    if (needs_vmf && d < 2) {
      bad(std::string("d must be >= 2 for method ") + method_name(method));
    }
    if (kappa && !(*kappa > 0.0)) bad("kappa must be > 0");

    const bool needs_bound = method == Method::eb || method == Method::robust_eb ||
                             method == Method::stitched_eb;
    if (needs_bound && !(B > 0.0)) {
      bad(std::string("B is required (> 0) for method ") + method_name(method));
    }

    if (method == Method::cg || method == Method::semi_empirical) {
      if (!(v > 0.0)) bad("v is required (> 0) for method " +
                          std::string(method_name(method)));
      if (!(p >= 2.0)) bad("p must be >= 2");
    }
    if (method == Method::cg && !(beta > 0.0)) bad("beta must be > 0");
    if (method == Method::semi_empirical) {
      if (!trace_sigma) {
        bad("trace_sigma is required for method semi_empirical");
      } else if (!(*trace_sigma >= 0.0)) {
        bad("trace_sigma must be >= 0");
      }
    }
    if (method == Method::robust_eb && !(eps >= 0.0)) bad("eps must be >= 0");

    if (method == Method::sub_psi && !psi) bad("psi is required for method sub_psi");
    if (method == Method::stitched_subgamma &&
        (!psi || psi->kind() != PsiKind::gamma)) {
      bad("psi must be the Gamma variant for method stitched_subgamma");
    }

    if (!is_stitched()) {
      if (!schedule) {
        bad(std::string("schedule is required for method ") + method_name(method));
      } else {
        if ((method == Method::eb) && !(schedule->max_lambda() < 1.0)) {
          bad("schedule: eb requires lambda in (0,1); cap the schedule below 1");
        }
        if (method == Method::robust_eb && !(schedule->max_lambda() <= 0.8)) {
          bad("schedule: robust_eb requires lambda in (0,0.8]");
        }
        if (method == Method::sub_psi) {
          if (schedule->data_dependent()) {
            bad("schedule: sub_psi requires a deterministic schedule; "
                "variance-adaptive schedules are not admissible");
          }
          if (psi && !(schedule->max_lambda() < psi->lambda_max())) {
            bad("schedule: lambda sequence must stay below psi's lambda_max");
          }
        }
      }
    }
    return errs;
  }

  /// Throws std::invalid_argument joining every validation error.
  void validate() const {
    const auto errs = validation_errors();
    if (errs.empty()) return;
    std::string msg = "invalid estimator config:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw std::invalid_argument(msg);
  }
};

}  // namespace css
