#pragma once

#include <stdexcept>
#include <string>

namespace treepde {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user input: flags, config files, problem declarations.
struct ConfigError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct PoleError : NumericalError {
    using NumericalError::NumericalError;
};

struct SingularityError : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateTableError : NumericalError {
    using NumericalError::NumericalError;
};

struct TreeCapExceeded : NumericalError {
    using NumericalError::NumericalError;
};

struct MaxAttemptsError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace treepde
