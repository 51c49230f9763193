#pragma once

#include <stdexcept>
#include <string>

namespace satdesign {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownModelError : public Error {
public:
    using Error::Error;
};

/// A parameter vector violates a model constraint; the message names it.
class ParameterError : public Error {
public:
    using Error::Error;
};

class DesignSpaceError : public Error {
public:
    using Error::Error;
};

class DesignError : public Error {
public:
    using Error::Error;
};

/// The transform K (or c-vector a) is not contained in range(M).
class EstimabilityError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class CriterionError : public Error {
public:
    using Error::Error;
};

/// No complete class is registered for the model at these parameters.
class NoCompleteClassError : public Error {
public:
    using Error::Error;
};

class ClosedFormError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace satdesign
