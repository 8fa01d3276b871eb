#pragma once

#include <stdexcept>
#include <string>

namespace svx {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incomplete input files and frame sequences.
class IngestError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

/// Index or level outside the available range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A record or request violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The request names a participant, session or video that does not exist.
class NotFoundError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// The request conflicts with existing state (duplicate session or answer).
class ConflictError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

}  // namespace svx
