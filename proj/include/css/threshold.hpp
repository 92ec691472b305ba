#pragma once

#include <stdexcept>

#include "css/vec.hpp"

namespace css {

/// Norm-clipping threshold map th(x) = (min(lambda |x|, 1) / (lambda |x|)) x.
/// Leaves x unchanged when lambda |x| <= 1, otherwise rescales it onto the
/// ball of radius 1/lambda. th(0) = 0 (the 0/0 factor is taken as 1), which
/// keeps the map continuous and a contraction onto the ball.
inline Vec cg_threshold(const Vec& x, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("cg_threshold: lambda must be > 0");
  }
  const double s = lambda * x.norm();
  if (s <= 1.0) return x;
  return x / s;
}

}  // namespace css
