#pragma once

#include <stdexcept>
#include <string>

namespace dlgeo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the supported evaluation domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Contour construction produced an invalid configuration (ordering, overlap).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A parameter set violates its declared invariant.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// An unbounded path segment was discretized without a decay certificate.
class CertificateError : public Error {
public:
    using Error::Error;
};

/// Backward Painleve integration left the Hastings-McLeod separatrix.
class BlowupError : public Error {
public:
    using Error::Error;
};

/// A self-check between two resolutions failed.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A Cauchy/Vandermonde denominator vanished.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Requested work exceeds the configured evaluation budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

} // namespace dlgeo
