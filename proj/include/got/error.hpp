#pragma once

#include <stdexcept>
#include <string>

namespace got {

/// Bad input: shapes, ranges, malformed files. The CLI maps this to exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The Gibbs kernel of a transport problem lost a whole row or column to
/// underflow, so the scaling iteration cannot reach the marginals. Exit code 2.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace got
