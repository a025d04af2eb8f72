#ifndef DDPUT_ERRORS_HPP
#define DDPUT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ddput {

/// Input outside the domain of an operation (bad parameters, x > xbar, poles).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Model parameters for which the exponential-sum scale basis degenerates
/// (two exponents closer than the separation threshold).
class DegenerateParameters : public std::runtime_error {
 public:
  explicit DegenerateParameters(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed in a way the theory says cannot happen.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace ddput

#endif  // DDPUT_ERRORS_HPP
