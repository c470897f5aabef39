#pragma once

#include <stdexcept>
#include <string>

namespace adaptsense {

// Thrown when a measurement design cannot identify the support it was built
// for (rank-deficient restricted operators, exhausted plan rejections).
class IdentifiabilityError : public std::runtime_error {
 public:
  explicit IdentifiabilityError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace adaptsense
