#pragma once

#include <stdexcept>
#include <string>

namespace synd {

/// Base class of every failure raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A file could not be read or written.
struct IoError : Error {
    using Error::Error;
};

/// Input text does not conform to its format.
struct ParseError : Error {
    using Error::Error;
};

/// A structural invariant of a value does not hold.
struct InvariantError : Error {
    using Error::Error;
};

} // namespace synd
