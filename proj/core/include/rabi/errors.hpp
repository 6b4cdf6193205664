// errors.hpp — exception hierarchy shared by all rabi modules

#pragma once

#include <stdexcept>
#include <string>

namespace rabi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad parameters, mismatched dimensions, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed: no convergence, degenerate reference, pole hit.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The ground level is degenerate within tolerance; the ground state is not unique.
class DegenerateGroundState : public NumericalError {
public:
    DegenerateGroundState(const std::string& what, double gap)
        : NumericalError(what), gap_(gap) {}
    double gap() const noexcept { return gap_; }

private:
    double gap_;
};

/// A configured resource cap (truncation, step count) was reached.
class ResourceCapError : public Error {
public:
    using Error::Error;
};

}  // namespace rabi
