#pragma once

#include <stdexcept>
#include <string>

namespace phonon {

/// Rejected input: bad parameters, malformed configuration, out-of-band requests.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that started from valid input but could not finish
/// (blow-up during integration, singular scattering system).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw ConfigError(message);
    }
}

}  // namespace detail
}  // namespace phonon
