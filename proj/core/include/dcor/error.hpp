#pragma once

#include <stdexcept>

namespace dcor {

// Base for every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad dimensions, indices or parameter values.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed code-family file.
class FormatError : public Error {
public:
    using Error::Error;
};

// Constraint set cannot be satisfied, or a starting matrix violates it.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Floating point result failed an exactness check.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace dcor
