#pragma once

#include <stdexcept>
#include <string>

namespace mutakill {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or an unsatisfiable request (CLI exit code 1).
struct UsageError : Error {
  using Error::Error;
};

/// Malformed or internally inconsistent input data (CLI exit code 2).
struct DataError : Error {
  using Error::Error;
};

/// A prediction row references an input_id absent from the ground truth.
struct UnknownInputError final : DataError {
  using DataError::DataError;
};

/// The same (model_id, instance_id, input_id) cell appears more than once.
struct DuplicateCellError final : DataError {
  using DataError::DataError;
};

/// A model instance is missing predictions for some ground-truth input.
struct RaggedInstanceError final : DataError {
  using DataError::DataError;
};

/// Structural CSV problems: bad header, wrong field count, empty file.
struct FormatError final : DataError {
  using DataError::DataError;
};

}  // namespace mutakill
