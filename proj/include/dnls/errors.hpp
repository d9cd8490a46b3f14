#pragma once

#include <stdexcept>
#include <string>

namespace dnls {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inputs that violate an operation's preconditions.
class DomainError : public Error {
public:
    using Error::Error;
};

class LatticeMismatch : public DomainError {
public:
    LatticeMismatch() : DomainError("fields live on different lattices") {}
};

// Iterations that fail to converge, singular solves, overflow.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// A verdict that cannot be decided at the current window size.
class Indeterminate : public Error {
public:
    using Error::Error;
};

// A homological solve whose shift sits too close to the continuous spectrum
// or on a resonant monomial.
class SmallDivisor : public Error {
public:
    using Error::Error;
};

}  // namespace dnls
