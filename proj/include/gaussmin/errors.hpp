#pragma once

#include <stdexcept>
#include <string>

namespace gaussmin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a kernel or operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Off-grid query against a tabulated kernel, or an invalid grid.
class GridError : public Error {
 public:
  using Error::Error;
};

class StationarityError : public Error {
 public:
  using Error::Error;
};

/// Analytic derivative requested at a point where it does not exist.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class IntervalError : public Error {
 public:
  using Error::Error;
};

class AssumptionError : public Error {
 public:
  using Error::Error;
};

/// Gamma(h) == Gamma(0), so the three-point coefficient is undefined.
class DegenerateKernelError : public Error {
 public:
  using Error::Error;
};

class KernelKindError : public Error {
 public:
  using Error::Error;
};

class EmptyMeasureError : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// The process is not pinned at the origin (Var X(0) != 0).
class PinnedOriginError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (CSV, config).
class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gaussmin
