#pragma once

#include <stdexcept>
#include <string>

namespace otac {

/// Raised when an argument lies outside the domain an operation is defined on.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// The root bracket of the stationarity function has no sign change.
class DegenerateConfiguration : public std::runtime_error {
public:
    explicit DegenerateConfiguration(const std::string& what) : std::runtime_error(what) {}
};

} // namespace otac
