#pragma once

#include <stdexcept>
#include <string>

namespace fockopt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Occupation vector incompatible with the particle statistics or shape.
class InvalidOccupation : public Error {
 public:
  using Error::Error;
};

/// Mode count, particle number or index out of agreement.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// A superposition cancelled to the zero vector.
class ZeroState : public Error {
 public:
  using Error::Error;
};

class NotUnitary : public Error {
 public:
  using Error::Error;
};

/// A herald or post-selection whose success probability is numerically zero.
class ZeroOutcome : public Error {
 public:
  using Error::Error;
};

class InvalidCircuit : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Multi-particle fermion state requested in a single mode.
class PauliForbidden : public Error {
 public:
  using Error::Error;
};

/// Hidden-variable beam splitter asked to place particles on two zero amplitudes.
class DegenerateAmplitude : public Error {
 public:
  using Error::Error;
};

/// Malformed input document. Line and column are 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(what), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace fockopt
