#pragma once

#include <stdexcept>
#include <string>

namespace latdim {

/// Base for every error the library raises. The CLI maps all of these to exit status 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (dimension mismatch, empty input, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Integer overflow, non-finite input, or a value outside the signed 64-bit lattice.
class RangeError : public Error {
public:
    using Error::Error;
};

/// An output would exceed a configured size cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// An iterative numeric routine failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace latdim
