#pragma once

#include <stdexcept>
#include <string>

namespace qvecca {

// Input or contract violation. Messages are prefixed with the module
// that detected the problem, e.g. "matio: inconsistent vector length".
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qvecca
