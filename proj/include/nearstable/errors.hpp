#pragma once

#include <stdexcept>
#include <string>

namespace nearstable {

/// Malformed files, dangling references, invalid instances.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configurable work budget (pivots, enumeration size, retries) ran out.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates a documented precondition.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An invariant that the underlying theory guarantees did not hold.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nearstable
