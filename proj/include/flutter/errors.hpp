#pragma once

#include <stdexcept>
#include <string>

namespace flutter {

// Argument outside the domain where a formula is real-valued.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Base for failures of a numerical procedure (exit code 3 in the CLI).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A branch equation has no root for the requested wavenumber.
class NoRoot : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// No sign change inside an analytic bracket.
class BracketFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Step-size collapse, step budget exhausted, or an energy-drift check that
// still fails after tolerance tightening.
class IntegrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace flutter
