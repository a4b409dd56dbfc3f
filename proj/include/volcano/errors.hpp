#pragma once

#include <stdexcept>
#include <string>

namespace volcano {

// Base of every error the library throws. Numeric routines never return NaN
// as a value; any failure surfaces as one of these.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Result magnitude outside what a double can represent.
class RangeError : public Error {
public:
    using Error::Error;
};

// Power series asked to sum outside its accurate disk.
class NonConvergence : public Error {
public:
    using Error::Error;
};

class UnsupportedSheet : public Error {
public:
    using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Even-parity transform input is not orthogonal to the zero mode.
class DomainViolation : public Error {
public:
    using Error::Error;
};

// Denominator Hankel function vanishes (spectral parameter sits on a resonance).
class AtResonance : public Error {
public:
    using Error::Error;
};

// Internal cross-check between two evaluation routes failed.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

// Newton iterate left the Riemann sheet it was started on.
class SheetDrift : public Error {
public:
    using Error::Error;
};

}  // namespace volcano
