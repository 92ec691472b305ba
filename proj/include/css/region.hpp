#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "css/vec.hpp"

namespace css {

/// One element of a confidence sphere (or ellipsoid) sequence: center,
/// radius, and the time and level they belong to. When `whitening` is
/// set the region is the ellipsoid { m : |W (m - center)| <= radius };
/// otherwise the Euclidean ball.
struct ConfidenceRegion {
  Vec center;
  double radius = 0.0;
  std::int64_t t = 0;
  double alpha = 0.0;
  std::optional<Matrix> whitening;

  bool contains(const Vec& point) const {
    if (point.size() != center.size()) {
      throw std::invalid_argument("ConfidenceRegion::contains: dimension mismatch");
    }
    if (whitening) return ((*whitening) * (point - center)).norm() <= radius;
    return (point - center).norm() <= radius;
  }
};

}  // namespace css
