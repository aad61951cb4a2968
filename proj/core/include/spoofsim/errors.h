#ifndef SPOOFSIM_ERRORS_H_
#define SPOOFSIM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace spoofsim {

// Base of every exception thrown by the library. The CLI maps these onto exit
// codes: ArgumentError/ValidationError are usage or data failures, the rest are
// data failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed container or header.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed input using an encoding this library does not read.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InsufficientDecayError : public Error {
 public:
  using Error::Error;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

class DegenerateCostError : public Error {
 public:
  using Error::Error;
};

}  // namespace spoofsim

#endif  // SPOOFSIM_ERRORS_H_
