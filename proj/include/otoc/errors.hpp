#pragma once

#include <stdexcept>
#include <string>

namespace otoc {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes (config/parameter problems -> 2, numerical -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// A builder produced something that should have been Hermitian but is not.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace otoc
