#pragma once

#include <stdexcept>
#include <string>

namespace alee {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the operation's domain (non-finite entries, x < 1, p not in (0,1), ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Matrix failed the relative SPD / invertibility test.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

// The data do not identify the parameter (arm never pulled, singular Gram matrix, ...).
class DegenerateDesign : public Error {
 public:
  using Error::Error;
};

}  // namespace alee
