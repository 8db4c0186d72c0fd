#pragma once

#include <stdexcept>
#include <string>

namespace shuftext {

// Base of every error the toolkit raises. Callers that only need a
// diagnostic can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or missing input data: malformed lines, empty splits, reserved labels.
class DataError : public Error {
public:
    using Error::Error;
};

// Misuse of a model (predict before fit, unknown label, bad config).
class ModelError : public Error {
public:
    using Error::Error;
};

// External adapter failures: crash, timeout, protocol violation.
class AdapterError : public ModelError {
public:
    using ModelError::ModelError;
};

// Filesystem failures while writing or reading reports.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace shuftext
