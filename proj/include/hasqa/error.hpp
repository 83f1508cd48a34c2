#pragma once

#include <stdexcept>
#include <string>

namespace hasqa {

/// Raised for every rejected precondition. The message is a single line so
/// that command-line front ends can print it verbatim.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hasqa
