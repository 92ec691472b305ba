#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "css/vec.hpp"

namespace css {

/// Geometric median by Weiszfeld iteration, run to a displacement
/// tolerance. When an iterate lands on a data point (distance < 1e-12)
/// the iterate is perturbed by a 1e-8 jitter and iteration restarts from
/// there; if every point coincides with the iterate it already is the
/// median.
inline Vec geometric_median(std::span<const Vec> points, double tol = 1e-9,
                            int max_iter = 20000) {
  if (points.empty()) {
    throw std::invalid_argument("geometric_median: empty point set");
  }
  const auto n = points.size();
  Vec x = Vec::Zero(points[0].size());
  for (const Vec& p : points) x += p;
  x /= static_cast<double>(n);

  Vec next(x.size());
  for (int it = 0; it < max_iter; ++it) {
    next.setZero();
    double weight = 0.0;
    bool collision = false;
    std::size_t coincident = 0;
    for (const Vec& p : points) {
      const double dist = (p - x).norm();
      if (dist < 1e-12) {
        collision = true;
        ++coincident;
        continue;
      }
      next += p / dist;
      weight += 1.0 / dist;
    }
    if (coincident == n) return x;  // median of identical points
    if (collision) {
      x.array() += 1e-8;
      continue;
    }
    next /= weight;
    const double moved = (next - x).norm();
    x = next;
    if (moved <= tol) break;
  }
  return x;
}

/// Median-of-means: partition samples into k contiguous blocks (arrival
/// order, streaming-compatible), return the geometric median of the
/// block means.
inline Vec mom_estimate(std::span<const Vec> samples, std::int64_t k) {
  if (samples.empty()) throw std::invalid_argument("mom_estimate: empty sample set");
  const auto n = static_cast<std::int64_t>(samples.size());
  if (k < 1 || k > n) {
    throw std::invalid_argument("mom_estimate: k must lie in [1, #samples]");
  }
  std::vector<Vec> block_means;
  block_means.reserve(static_cast<std::size_t>(k));
  for (std::int64_t b = 0; b < k; ++b) {
    const std::int64_t lo = b * n / k;
    const std::int64_t hi = (b + 1) * n / k;
    Vec mean = Vec::Zero(samples[0].size());
    for (std::int64_t i = lo; i < hi; ++i) mean += samples[static_cast<std::size_t>(i)];
    block_means.push_back(mean / static_cast<double>(hi - lo));
  }
  return geometric_median(block_means);
}

/// Anytime median-of-means baseline via a per-time union bound. The
/// per-time budget alpha_t = alpha/(t + t^2) telescopes to exactly alpha.
struct MoMConfig {
  double alpha = 0.05;
  double trace_sigma = 1.0;
  // Stand-in constant for the fixed-time MoM radius; a documented
  // baseline convention, not a claim from the literature.
  double radius_constant = 2.0 * std::sqrt(2.0);

  double alpha_t(std::int64_t t) const {
    const double td = static_cast<double>(t);
    return alpha / (td + td * td);
  }

  /// Default block rule k_t = ceil(8 log(1/alpha_t)), clamped to [1, t].
  std::int64_t blocks(std::int64_t t) const {
    const auto k = static_cast<std::int64_t>(
        std::ceil(8.0 * std::log(1.0 / alpha_t(t))));
    return std::clamp<std::int64_t>(k, 1, t);
  }
};

/// Fixed-time MoM radius at the per-time budget:
///   C sqrt( Tr(Sigma) (1 + 2 log(1/alpha_t)) / t ).
inline double mom_union_radius(std::int64_t t, const MoMConfig& cfg) {
  if (t < 1) throw std::invalid_argument("mom_union_radius: t must be >= 1");
  const double at = cfg.alpha_t(t);
  return cfg.radius_constant *
         std::sqrt(cfg.trace_sigma * (1.0 + 2.0 * std::log(1.0 / at)) /
                   static_cast<double>(t));
}

}  // namespace css
