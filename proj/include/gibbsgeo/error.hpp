#pragma once

#include <stdexcept>
#include <string>

namespace gibbsgeo {

/// Input outside the physical domain of the model (V <= covolume, T <= 0, T >= T_c, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// An iterative solve did not converge.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A quantity that must be divided by vanished (singular edge of regression, zero tangent).
class SingularError : public std::runtime_error {
public:
    explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

/// Power-law fit rejected its input.
class FitError : public std::invalid_argument {
public:
    explicit FitError(const std::string& what) : std::invalid_argument(what) {}
};

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace gibbsgeo
