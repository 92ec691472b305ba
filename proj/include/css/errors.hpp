#pragma once

#include <stdexcept>
#include <string>

namespace css {

/// Thrown when a radius or mean is requested from a stream that has not
/// consumed any observations yet.
class NoEstimateError : public std::runtime_error {
 public:
  NoEstimateError() : std::runtime_error("no estimate exists at t = 0") {}
  explicit NoEstimateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace css
