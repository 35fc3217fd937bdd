#pragma once

#include <stdexcept>
#include <string>

namespace lopt {

/// Raised when arguments violate a documented precondition.
class InputError : public std::invalid_argument
{
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a solver cannot produce a trustworthy result
/// (quantization overflow, residual artificial flow, ...).
class NumericalError : public std::runtime_error
{
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const char* message)
{
    if (!condition) {
        throw InputError(message);
    }
}

} // namespace detail
} // namespace lopt
