#pragma once

#include <stdexcept>
#include <string>

namespace scdim {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes (2 = invalid input, 3 = cap exceeded).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DomainError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ScaleMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class PreconditionError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace scdim
