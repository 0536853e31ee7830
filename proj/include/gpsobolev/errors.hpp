#pragma once

#include <stdexcept>
#include <string>

namespace gpsobolev {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters, malformed configuration, out-of-range options.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A point was passed outside the declared domain of a kernel.
class DomainError : public Error {
public:
    using Error::Error;
};

// The requested derivative has no closed form for this kernel; callers fall
// back to finite differences.
class UnsupportedDerivative : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

// A difference stencil leaves the box (or the kernel domain).
class MarginTooSmall : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// A documented precondition of a composite operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace gpsobolev
