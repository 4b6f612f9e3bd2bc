#pragma once

#include <stdexcept>
#include <string>

namespace fairx {

// Bad user input: malformed parameters, schema violations, out-of-range
// indices. The CLI maps this to exit code 3.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A property the algorithm guarantees was observed to fail at runtime
// (broken share oracle, precondition violation, iteration bound blown).
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairx
