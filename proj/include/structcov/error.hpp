#pragma once

#include <stdexcept>
#include <string>

namespace structcov {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or sizes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar or parameter outside its admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Not enough information in the data to form an estimate.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Linearly dependent or otherwise non-identifiable component sets.
class IdentifiabilityError : public Error {
 public:
  using Error::Error;
};

/// A numerical solver failed to converge or hit an inconsistent state.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Malformed files, configs or command-line input.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace structcov
