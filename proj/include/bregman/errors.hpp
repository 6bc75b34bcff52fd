#pragma once

#include <stdexcept>
#include <string>

namespace bregman {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point lies outside the (closure of the) domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A Hessian entry is infinite or the Hessian cannot be factorized.
class SingularHessian : public Error {
public:
    using Error::Error;
};

/// A direction solver received a nonpositive metric scale.
class InvalidScale : public Error {
public:
    using Error::Error;
};

/// The affine constraint vector is zero (or the KKT system is singular).
class DegenerateConstraint : public Error {
public:
    using Error::Error;
};

/// No smooth-adaptable certificate is known for an objective/kernel pair.
class UnsupportedPair : public Error {
public:
    using Error::Error;
};

/// An iterative routine hit its iteration cap.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Invalid instance specification or run manifest.
class SpecError : public Error {
public:
    using Error::Error;
};

/// Nothing to plot.
class EmptyTrace : public Error {
public:
    using Error::Error;
};

/// File could not be read, written or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bregman
