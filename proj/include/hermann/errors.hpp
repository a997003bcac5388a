#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hermann {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimensions, block sizes, flags).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A triad description file that cannot be parsed or validated.
class TriadFormatError : public InputError {
 public:
  using InputError::InputError;
};

/// A point was singular where a regular point is required.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// Numerically degenerate data: inseparable clusters, failed certificates,
/// unstable finite differences, missing periods.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// An integrand that is not H-invariant; carries a witness pair (x, h·x)
/// as Cartan images.
class InvarianceError : public Error {
 public:
  InvarianceError(const std::string& what, std::string witness) : Error(what), witness_(std::move(witness)) {}
  const std::string& witness() const { return witness_; }

 private:
  std::string witness_;
};

}  // namespace hermann
