#pragma once

#include <stdexcept>
#include <string>

namespace hubcast {

/// Base class for all hubcast errors. Subclasses map onto CLI exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, malformed spec files, bad flag values. Exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Inconsistent or insufficient data: missing hubs, cold starts,
/// broken paths, misaligned record scopes. Exit code 3.
class DataError : public Error {
public:
  using Error::Error;
};

/// Dimension or schema mismatch between a model and its input.
class ShapeError : public DataError {
public:
  using DataError::DataError;
};

/// Model training failed (divergence, empty training set). Exit code 4.
class TrainError : public Error {
public:
  using Error::Error;
};

} // namespace hubcast
