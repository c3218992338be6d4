#pragma once

#include <stdexcept>
#include <string>

namespace oadm {

// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument value (negative threshold, non-positive penalty, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment or generator configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The requested operation is not available for this problem structure
// (e.g. an x-subproblem with no closed form and no user-supplied solver).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A matrix does not have the structure an operation requires
// (e.g. a singular matrix where an invertible one is needed).
class StructureError : public Error {
 public:
  using Error::Error;
};

// API misuse (out-of-order rounds, certificate/schedule mismatch).
class UsageError : public Error {
 public:
  using Error::Error;
};

// File input/output failure; message carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace oadm
