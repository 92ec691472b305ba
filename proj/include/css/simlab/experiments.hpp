#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "css/baselines.hpp"
#include "css/estimator.hpp"
#include "css/simlab/distributions.hpp"

namespace css::sim {

/// Log-spaced integer checkpoints in [1, horizon], at most `per_decade`
/// per decade, horizon always included.
inline std::vector<std::int64_t> log_checkpoints(std::int64_t horizon,
                                                 int per_decade = 50) {
  if (horizon < 1) throw std::invalid_argument("log_checkpoints: horizon must be >= 1");
  std::vector<std::int64_t> pts;
  const double step = std::pow(10.0, 1.0 / per_decade);
  double x = 1.0;
  while (x < static_cast<double>(horizon)) {
    const auto t = static_cast<std::int64_t>(std::llround(x));
    if (pts.empty() || t > pts.back()) pts.push_back(std::min(t, horizon));
    x *= step;
  }
  if (pts.empty() || pts.back() != horizon) pts.push_back(horizon);
  return pts;
}

/// Runs body(rep) for rep in [0, n) across `threads` workers. Results must
/// be written into rep-indexed slots; the schedule never affects them.
template <typename F>
void parallel_replications(std::int64_t n, int threads, F&& body) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (std::int64_t rep = 0; rep < n; ++rep) body(rep);
    return;
  }
  std::atomic<std::int64_t> counter{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      const std::int64_t rep = counter.fetch_add(1);
      if (rep >= n) return;
      try {
        body(rep);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Aggregate simultaneous-coverage estimate over replications, plus the
/// per-replication first miscoverage times (-1 when the sphere never
/// excluded the target up to the horizon).
struct CoverageReport {
  std::int64_t replications = 0;
  std::int64_t miscovered = 0;
  double coverage_hat = 0.0;
  double binomial_se = 0.0;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> first_miscoverage_t;
};

namespace detail {

inline void check_compatible(const EstimatorConfig& cfg,
                             const DistributionSpec& spec) {
  const bool bounded_method = cfg.method == Method::eb ||
                              cfg.method == Method::robust_eb ||
                              cfg.method == Method::stitched_eb;
  if (!bounded_method) return;
  const auto bound = spec.norm_bound();
  if (!bound) {
    throw std::invalid_argument(
        std::string(method_name(cfg.method)) +
        " requires an almost-surely bounded distribution spec");
  }
  if (*bound > cfg.B * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "distribution norm bound " + std::to_string(*bound) +
        " exceeds the estimator's B = " + std::to_string(cfg.B));
  }
}

}  // namespace detail

/// Streams `horizon` samples per replication, checks the sphere against
/// the spec's coverage target after every observation (time-uniformity is
/// the claim under test), and aggregates.
inline CoverageReport run_coverage(const EstimatorConfig& cfg,
                                   const DistributionSpec& spec,
                                   std::int64_t horizon,
                                   std::int64_t replications,
                                   std::uint64_t seed, int threads = 1) {
  if (horizon < 1) throw std::invalid_argument("run_coverage: horizon must be >= 1");
  if (replications < 1) {
    throw std::invalid_argument("run_coverage: replications must be >= 1");
  }
  cfg.validate();
  spec.validate();
  detail::check_compatible(cfg, spec);

  const Vec target = spec.coverage_target();
  std::vector<std::int64_t> first_miss(static_cast<std::size_t>(replications), -1);

  parallel_replications(replications, threads, [&](std::int64_t rep) {
    Sampler sampler(spec, seed, static_cast<std::uint64_t>(rep));
    Estimator est(cfg);
    Vec center(cfg.d);
    for (std::int64_t t = 1; t <= horizon; ++t) {
      est.observe(sampler.next());
      est.center_to(center);
      if ((center - target).norm() > est.radius()) {
        first_miss[static_cast<std::size_t>(rep)] = t;
        break;  // miscoverage is permanent for the simultaneous event
      }
    }
  });

  CoverageReport report;
  report.replications = replications;
  report.horizon = horizon;
  report.seed = seed;
  report.first_miscoverage_t = std::move(first_miss);
  for (const auto t : report.first_miscoverage_t) {
    if (t >= 0) ++report.miscovered;
  }
  report.coverage_hat =
      1.0 - static_cast<double>(report.miscovered) / static_cast<double>(replications);
  report.binomial_se = std::sqrt(report.coverage_hat * (1.0 - report.coverage_hat) /
                                 static_cast<double>(replications));
  return report;
}

/// Mean radius across replications at one checkpoint for one method.
struct WidthPoint {
  std::int64_t t = 0;
  std::string method;
  double mean_radius = 0.0;
  double radius_se = 0.0;
};

struct NamedEstimator {
  std::string name;
  EstimatorConfig cfg;
};

/// Per method, streams `horizon` samples and records the radius at
/// log-spaced checkpoints, averaged over replications. Replication r of
/// every method sees the same substream, so methods are compared on
/// identical data.
inline std::vector<WidthPoint> run_width_curve(
    std::span<const NamedEstimator> methods, const DistributionSpec& spec,
    std::int64_t horizon, std::int64_t replications, std::uint64_t seed,
    int threads = 1) {
  if (methods.empty()) {
    throw std::invalid_argument("run_width_curve: no estimators given");
  }
  spec.validate();
  for (const auto& m : methods) {
    m.cfg.validate();
    detail::check_compatible(m.cfg, spec);
  }
  const auto checkpoints = log_checkpoints(horizon);
  const std::size_t n_cp = checkpoints.size();

  std::vector<WidthPoint> out;
  std::vector<std::vector<double>> radii(
      static_cast<std::size_t>(replications));  // per rep, per checkpoint

  for (const auto& method : methods) {
    parallel_replications(replications, threads, [&](std::int64_t rep) {
      Sampler sampler(spec, seed, static_cast<std::uint64_t>(rep));
      Estimator est(method.cfg);
      auto& row = radii[static_cast<std::size_t>(rep)];
      row.assign(n_cp, 0.0);
      std::size_t next_cp = 0;
      for (std::int64_t t = 1; t <= horizon && next_cp < n_cp; ++t) {
        est.observe(sampler.next());
        if (t == checkpoints[next_cp]) {
          row[next_cp] = est.radius();
          ++next_cp;
        }
      }
    });

    for (std::size_t c = 0; c < n_cp; ++c) {
      double mean = 0.0;
      for (std::int64_t rep = 0; rep < replications; ++rep) {
        mean += radii[static_cast<std::size_t>(rep)][c];
      }
      mean /= static_cast<double>(replications);
      double var = 0.0;
      if (replications > 1 && std::isfinite(mean)) {
        for (std::int64_t rep = 0; rep < replications; ++rep) {
          const double dv = radii[static_cast<std::size_t>(rep)][c] - mean;
          var += dv * dv;
        }
        var /= static_cast<double>(replications - 1);
      }
      WidthPoint pt;
      pt.t = checkpoints[c];
      pt.method = method.name;
      pt.mean_radius = mean;
      pt.radius_se = std::isfinite(mean)
                         ? std::sqrt(var / static_cast<double>(replications))
                         : 0.0;
      out.push_back(std::move(pt));
    }
  }
  return out;
}

/// Radius curve of the MoM union-bound baseline. The radius is a
/// deterministic function of t, so no data are streamed.
inline std::vector<WidthPoint> mom_width_curve(const MoMConfig& cfg,
                                               std::int64_t horizon,
                                               const std::string& name = "mom_union") {
  std::vector<WidthPoint> out;
  for (const auto t : log_checkpoints(horizon)) {
    WidthPoint pt;
    pt.t = t;
    pt.method = name;
    pt.mean_radius = mom_union_radius(t, cfg);
    pt.radius_se = 0.0;
    out.push_back(std::move(pt));
  }
  return out;
}

enum class RateModel { sqrt_log_t_over_t, lil };

inline const char* rate_model_name(RateModel m) {
  return m == RateModel::sqrt_log_t_over_t ? "sqrt_log_t_over_t" : "lil";
}

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  int n_points = 0;
};

/// Least-squares fit of log(radius) against the model's log-predictor
/// (sqrt(log t / t) or sqrt(log log t / t)). Requires >= 20 finite
/// checkpoints spanning at least three decades of t.
inline RateFit fit_rate(std::span<const WidthPoint> trajectory, RateModel model) {
  std::vector<double> xs;
  std::vector<double> ys;
  std::int64_t t_min = 0;
  std::int64_t t_max = 0;
  for (const auto& pt : trajectory) {
    if (!(pt.mean_radius > 0.0) || !std::isfinite(pt.mean_radius)) continue;
    const double td = static_cast<double>(pt.t);
    double pred;
    if (model == RateModel::sqrt_log_t_over_t) {
      if (pt.t < 2) continue;
      pred = std::sqrt(std::log(td) / td);
    } else {
      if (pt.t < 3) continue;  // log log t must be positive
      pred = std::sqrt(std::log(std::log(td)) / td);
    }
    xs.push_back(std::log(pred));
    ys.push_back(std::log(pt.mean_radius));
    if (t_min == 0) t_min = pt.t;
    t_max = pt.t;
  }
  if (xs.size() < 20 || t_min == 0 || t_max < t_min * 1000) {
    throw std::invalid_argument(
        "fit_rate: need >= 20 finite checkpoints spanning >= 3 decades");
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n_points = static_cast<int>(xs.size());
  return fit;
}

}  // namespace css::sim
