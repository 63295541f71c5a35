#pragma once

#include <stdexcept>
#include <string>

namespace qsyn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch or a size beyond the supported range.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Wrong number of parameters for a gate or structure.
class ArityError : public Error {
 public:
  using Error::Error;
};

// Input failed a domain check (unitarity, hermiticity, graph connectivity...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unknown name (benchmark, gate kind).
class LookupError : public Error {
 public:
  using Error::Error;
};

// Malformed text input (JSON, QASM).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsyn
