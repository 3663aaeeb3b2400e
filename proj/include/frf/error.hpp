// error.hpp: exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace frf {

/// Bad caller input: out-of-range parameters, malformed grids.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

} // namespace detail

} // namespace frf
