#ifndef GRIDKIT_ERRORS_HPP
#define GRIDKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gridkit {

/// Caller passed arguments that violate an operation's preconditions
/// (dimension mismatch, incompatible lattices, bad factors, ...).
class UsageError : public std::invalid_argument {
public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// A configured resource limit (point cap, integer range) was exceeded.
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Memory access outside an array's data + padding.
class BoundsError : public std::out_of_range {
public:
  explicit BoundsError(const std::string& what) : std::out_of_range(what) {}
};

/// Alignment contract of a lane load/store was broken.
class ContractViolation : public std::logic_error {
public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

} // namespace gridkit

#endif // GRIDKIT_ERRORS_HPP
